"""Domain types for SMART designs with ordinal outcomes.

Everything here is immutable after construction and safe to share across
threads. Outcome categories are integers ``1..J`` with higher = better.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadRate,
    EmptyDataset,
    InvalidDesign,
    InvalidTrajectory,
    MismatchedJ,
    NegativeEntry,
    SchemaError,
    SumNotOne,
    TooFewCategories,
)

PMF_SUM_TOL = 1e-9

ArmKey = tuple[str, ...]


@dataclass(frozen=True)
class OrdinalPmf:
    """Probability vector over J ordered outcome categories (category 1 = worst)."""

    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.probs) < 2:
            raise TooFewCategories(f"need at least 2 categories, got {len(self.probs)}")
        for p in self.probs:
            if p < 0:
                raise NegativeEntry(f"negative probability {p}")
            if p > 1:
                raise SumNotOne(f"probability {p} exceeds 1")

    @property
    def j(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __len__(self):
        return len(self.probs)


def validate_pmf(probs: Sequence[float], tol: float = PMF_SUM_TOL) -> OrdinalPmf:
    """Validate a raw probability vector and return it exactly renormalized.

    The raw sum must lie within ``tol`` of 1 (default 1e-9); entries are then
    divided by their sum so downstream computations see an exact pmf. Pass a
    looser ``tol`` (e.g. 0.02) to admit published tables rounded to 2 decimals.
    """
    probs = tuple(float(p) for p in probs)
    if len(probs) < 2:
        raise TooFewCategories(f"need at least 2 categories, got {len(probs)}")
    for p in probs:
        if p < 0:
            raise NegativeEntry(f"negative probability {p}")
    total = math.fsum(probs)
    if abs(total - 1.0) > tol:
        raise SumNotOne(f"probabilities sum to {total!r}, not 1 (tol={tol})")
    if total != 1.0:
        probs = tuple(p / total for p in probs)
    return OrdinalPmf(probs)


def small_cell_flags(pmf: OrdinalPmf, threshold: float = 0.05) -> list[int]:
    """1-based indices of categories with probability below ``threshold``.

    Estimates involving such cells deserve caution: their MLEs are noisy and
    the asymptotic variance can be badly calibrated.
    """
    if not 0 < threshold < 1:
        raise BadRate(f"threshold must be in (0,1), got {threshold}")
    return [i + 1 for i, p in enumerate(pmf.probs) if p < threshold]


@dataclass(frozen=True)
class TwoStageRegimeModel:
    """One embedded two-stage regime: respond with probability ``response_rate``
    and draw the outcome from ``responder_pmf``, otherwise from ``nonresponder_pmf``.

    ``labels`` names the stage-1 treatment and the stage-2 treatment taken by
    non-responders (responders continue stage 1 in a restricted design).
    """

    response_rate: float
    responder_pmf: OrdinalPmf
    nonresponder_pmf: OrdinalPmf
    labels: tuple[str, str] = ("A", "E")

    def __post_init__(self):
        if not 0 <= self.response_rate <= 1:
            raise BadRate(f"response rate {self.response_rate} outside [0,1]")
        if self.responder_pmf.j != self.nonresponder_pmf.j:
            raise MismatchedJ(
                f"responder pmf has J={self.responder_pmf.j}, "
                f"non-responder pmf has J={self.nonresponder_pmf.j}"
            )

    @property
    def j(self) -> int:
        return self.responder_pmf.j

    @property
    def responder_arm(self) -> ArmKey:
        # Responders continue stage 1 and are never re-randomized, so their
        # arm key is the bare stage-1 path. This keeps the key distinct from a
        # non-responder arm whose stage-2 option reuses the stage-1 label.
        return (self.labels[0],)

    @property
    def nonresponder_arm(self) -> ArmKey:
        return (self.labels[0], self.labels[1])

    def marginal_pmf(self) -> tuple[float, ...]:
        """Response-rate-weighted mixture of the two arm pmfs."""
        g = self.response_rate
        return tuple(
            g * r + (1 - g) * n
            for r, n in zip(self.responder_pmf.probs, self.nonresponder_pmf.probs)
        )

    def to_kstage(self) -> "KStageRegimeModel":
        return KStageRegimeModel(
            stage_response_rates=(self.response_rate,),
            terminal_pmfs=(self.responder_pmf, self.nonresponder_pmf),
            labels=self.labels,
        )


@dataclass(frozen=True)
class KStageRegimeModel:
    """Embedded regime in a K-stage SMART (K >= 2).

    ``stage_response_rates[k-1]`` is the probability of responding to the
    stage-k treatment, k = 1..K-1. ``terminal_pmfs[k-1]`` is the outcome pmf
    for patients whose first response occurs after stage k; the last entry is
    the pmf for patients who never respond. ``labels[k-1]`` names the
    treatment introduced at stage k.
    """

    stage_response_rates: tuple[float, ...]
    terminal_pmfs: tuple[OrdinalPmf, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        k = len(self.terminal_pmfs)
        if k < 2:
            raise InvalidDesign(f"K-stage model needs K >= 2 terminal strata, got {k}")
        if len(self.stage_response_rates) != k - 1:
            raise InvalidDesign(
                f"{k} terminal strata require {k - 1} stage response rates, "
                f"got {len(self.stage_response_rates)}"
            )
        for g in self.stage_response_rates:
            if not 0 <= g <= 1:
                raise BadRate(f"response rate {g} outside [0,1]")
        j = self.terminal_pmfs[0].j
        for pmf in self.terminal_pmfs[1:]:
            if pmf.j != j:
                raise MismatchedJ("terminal pmfs do not share the same J")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"T{i+1}" for i in range(k)))
        elif len(self.labels) != k:
            raise InvalidDesign(f"expected {k} stage labels, got {len(self.labels)}")

    @property
    def k(self) -> int:
        return len(self.terminal_pmfs)

    @property
    def j(self) -> int:
        return self.terminal_pmfs[0].j

    def stratum_weights(self) -> tuple[float, ...]:
        """Path probability of each terminal stratum.

        First response at stage k has probability gamma_k * prod_{j<k}(1-gamma_j);
        the final stratum collects patients who never respond.
        """
        weights = []
        carry = 1.0
        for g in self.stage_response_rates:
            weights.append(carry * g)
            carry *= 1 - g
        weights.append(carry)
        return tuple(weights)

    def stratum_key(self, index: int) -> ArmKey:
        """Treatment-path key of terminal stratum ``index`` (0-based): the
        distinct treatments received before (first) response. For K=2 the keys
        coincide with the two-stage arm keys (t1,) and (t1,t2)."""
        if index < self.k - 1:
            return tuple(self.labels[: index + 1])
        return tuple(self.labels)

    def marginal_pmf(self) -> tuple[float, ...]:
        weights = self.stratum_weights()
        j = self.j
        return tuple(
            math.fsum(w * pmf.probs[cat] for w, pmf in zip(weights, self.terminal_pmfs))
            for cat in range(j)
        )

    def to_two_stage(self) -> TwoStageRegimeModel:
        if self.k != 2:
            raise InvalidDesign(f"only K=2 models convert to two-stage form, got K={self.k}")
        return TwoStageRegimeModel(
            response_rate=self.stage_response_rates[0],
            responder_pmf=self.terminal_pmfs[0],
            nonresponder_pmf=self.terminal_pmfs[1],
            labels=(self.labels[0], self.labels[1]),
        )


def shared_path_pair(
    response_rate: float,
    responder_pmf: Sequence[float] | OrdinalPmf,
    nonresponder_pmf_ref: Sequence[float] | OrdinalPmf,
    nonresponder_pmf_cmp: Sequence[float] | OrdinalPmf,
    stage1: str = "A",
    stage2_ref: str = "E",
    stage2_cmp: str = "F",
) -> tuple[TwoStageRegimeModel, TwoStageRegimeModel]:
    """Build the (reference, comparison) models of a shared-path pair.

    Both regimes start with the same treatment, share the response rate and
    the responder outcome distribution, and differ only in the non-responder
    switch treatment.
    """
    resp = responder_pmf if isinstance(responder_pmf, OrdinalPmf) else validate_pmf(responder_pmf)

    def as_pmf(p):
        return p if isinstance(p, OrdinalPmf) else validate_pmf(p)

    ref = TwoStageRegimeModel(response_rate, resp, as_pmf(nonresponder_pmf_ref),
                              labels=(stage1, stage2_ref))
    cmp_ = TwoStageRegimeModel(response_rate, resp, as_pmf(nonresponder_pmf_cmp),
                               labels=(stage1, stage2_cmp))
    return ref, cmp_


@dataclass(frozen=True)
class SmartDesign:
    """Structure of a restricted two-stage SMART.

    ``stage2_options`` lists the re-randomization options for non-responders
    of each stage-1 arm; responders continue their stage-1 treatment.
    Randomization probabilities default to uniform at every node.
    """

    stage1_arms: tuple[str, ...]
    stage2_options: Mapping[str, tuple[str, ...]]
    restricted: bool = True
    stage1_probs: Mapping[str, float] | None = None
    stage2_probs: Mapping[str, Mapping[str, float]] | None = None

    def __post_init__(self):
        if not self.stage1_arms:
            raise InvalidDesign("design needs at least one stage-1 arm")
        if len(set(self.stage1_arms)) != len(self.stage1_arms):
            raise InvalidDesign("duplicate stage-1 arms")
        for arm in self.stage1_arms:
            if arm not in self.stage2_options:
                raise InvalidDesign(f"no stage-2 options for stage-1 arm {arm!r}")
            if not self.stage2_options[arm]:
                raise InvalidDesign(f"empty stage-2 options for stage-1 arm {arm!r}")
        if self.stage1_probs is not None:
            if set(self.stage1_probs) != set(self.stage1_arms):
                raise InvalidDesign("stage1_probs keys do not match stage-1 arms")
            if abs(math.fsum(self.stage1_probs.values()) - 1) > 1e-9:
                raise InvalidDesign("stage-1 randomization probabilities do not sum to 1")
            if any(p < 0 for p in self.stage1_probs.values()):
                raise InvalidDesign("negative stage-1 randomization probability")
        if self.stage2_probs is not None:
            for arm, probs in self.stage2_probs.items():
                if set(probs) != set(self.stage2_options[arm]):
                    raise InvalidDesign(f"stage2_probs for {arm!r} do not match its options")
                if abs(math.fsum(probs.values()) - 1) > 1e-9:
                    raise InvalidDesign(f"stage-2 probabilities for {arm!r} do not sum to 1")

    def stage1_probability(self, arm: str) -> float:
        if self.stage1_probs is not None:
            return float(self.stage1_probs[arm])
        return 1.0 / len(self.stage1_arms)

    def stage2_probability(self, stage1: str, stage2: str) -> float:
        if self.stage2_probs is not None:
            return float(self.stage2_probs[stage1][stage2])
        return 1.0 / len(self.stage2_options[stage1])

    def arms(self) -> list[ArmKey]:
        """All terminal arms: one responder arm ``(t1,)`` per initial treatment
        plus one ``(t1, t2)`` arm per non-responder option."""
        out: list[ArmKey] = []
        for t1 in self.stage1_arms:
            out.append((t1,))
            for t2 in self.stage2_options[t1]:
                out.append((t1, t2))
        return out

    @staticmethod
    def two_by_two(stage1: tuple[str, str] = ("A", "B"),
                   stage2: tuple[str, str] = ("E", "F")) -> "SmartDesign":
        """The canonical restricted design: two initial treatments, two switch options each."""
        return SmartDesign(
            stage1_arms=stage1,
            stage2_options={arm: stage2 for arm in stage1},
        )


@dataclass(frozen=True)
class Trajectory:
    patient_id: str
    stage1: str
    responder: bool
    stage2: str
    outcome: int

    @property
    def arm(self) -> ArmKey:
        return (self.stage1,) if self.responder else (self.stage1, self.stage2)


@dataclass(frozen=True)
class SmartDataset:
    """Per-patient trajectories from one restricted SMART."""

    design: SmartDesign
    trajectories: tuple[Trajectory, ...]
    j: int

    def __post_init__(self):
        if not self.trajectories:
            raise EmptyDataset("dataset has no trajectories")
        for t in self.trajectories:
            if t.stage1 not in self.design.stage1_arms:
                raise InvalidTrajectory(
                    f"patient {t.patient_id}: unknown stage-1 treatment {t.stage1!r}")
            if t.responder:
                if self.design.restricted and t.stage2 != t.stage1:
                    raise InvalidTrajectory(
                        f"patient {t.patient_id}: responder must continue "
                        f"{t.stage1!r} in a restricted design, got {t.stage2!r}")
            elif t.stage2 not in self.design.stage2_options[t.stage1]:
                raise InvalidTrajectory(
                    f"patient {t.patient_id}: {t.stage2!r} is not a stage-2 "
                    f"option after {t.stage1!r}")
            if not 1 <= t.outcome <= self.j:
                raise InvalidTrajectory(
                    f"patient {t.patient_id}: outcome {t.outcome} outside 1..{self.j}")

    @property
    def n(self) -> int:
        return len(self.trajectories)


@dataclass(frozen=True)
class ContinuousSmartDataset:
    """Same trajectory structure with a real-valued primary outcome."""

    design: SmartDesign
    patient_ids: tuple[str, ...]
    stage1: tuple[str, ...]
    responder: tuple[bool, ...]
    stage2: tuple[str, ...]
    outcome: tuple[float, ...]

    def __post_init__(self):
        n = len(self.patient_ids)
        if n == 0:
            raise EmptyDataset("dataset has no trajectories")
        for seq in (self.stage1, self.responder, self.stage2, self.outcome):
            if len(seq) != n:
                raise InvalidTrajectory("column lengths differ")

    @property
    def n(self) -> int:
        return len(self.patient_ids)


CSV_HEADER = ["patient_id", "stage1", "responder", "stage2", "outcome"]


def _parse_rows(text: str) -> Iterable[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != CSV_HEADER:
        raise SchemaError(
            f"expected header {','.join(CSV_HEADER)!r}, got {reader.fieldnames!r}")
    return reader


def read_trajectories(text: str, design: SmartDesign, j: int) -> SmartDataset:
    """Parse the trajectory CSV schema into a dataset (ordinal outcomes)."""
    rows = []
    for lineno, row in enumerate(_parse_rows(text), start=2):
        if row["responder"] not in ("0", "1"):
            raise SchemaError(f"line {lineno}: responder must be 0 or 1, got {row['responder']!r}")
        try:
            outcome = int(row["outcome"])
        except (TypeError, ValueError):
            raise SchemaError(f"line {lineno}: outcome {row['outcome']!r} is not an integer")
        rows.append(Trajectory(
            patient_id=row["patient_id"],
            stage1=row["stage1"],
            responder=row["responder"] == "1",
            stage2=row["stage2"],
            outcome=outcome,
        ))
    return SmartDataset(design=design, trajectories=tuple(rows), j=j)


def read_continuous_trajectories(text: str, design: SmartDesign) -> ContinuousSmartDataset:
    ids, s1, resp, s2, y = [], [], [], [], []
    for lineno, row in enumerate(_parse_rows(text), start=2):
        if row["responder"] not in ("0", "1"):
            raise SchemaError(f"line {lineno}: responder must be 0 or 1, got {row['responder']!r}")
        try:
            outcome = float(row["outcome"])
        except (TypeError, ValueError):
            raise SchemaError(f"line {lineno}: outcome {row['outcome']!r} is not a number")
        ids.append(row["patient_id"])
        s1.append(row["stage1"])
        resp.append(row["responder"] == "1")
        s2.append(row["stage2"])
        y.append(outcome)
    return ContinuousSmartDataset(
        design=design,
        patient_ids=tuple(ids),
        stage1=tuple(s1),
        responder=tuple(resp),
        stage2=tuple(s2),
        outcome=tuple(y),
    )


def write_trajectories(data: SmartDataset) -> str:
    """Emit the CSV trajectory schema; round-trips through read_trajectories."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t in data.trajectories:
        writer.writerow([t.patient_id, t.stage1, int(t.responder), t.stage2, t.outcome])
    return buf.getvalue()
