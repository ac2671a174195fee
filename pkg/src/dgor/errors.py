"""Exception hierarchy shared by the whole package.

Every error carries a machine-readable ``code`` (dotted, stable) so the CLI and
the HTTP service can surface structured problem documents.
"""


class DgorError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context


class PmfError(DgorError):
    code = "pmf.invalid"


class NegativeEntry(PmfError):
    code = "pmf.negative_entry"


class SumNotOne(PmfError):
    code = "pmf.sum_not_one"


class TooFewCategories(PmfError):
    code = "pmf.too_few_categories"


class NotThreeCategories(PmfError):
    code = "pmf.not_three_categories"


class MismatchedJ(DgorError):
    code = "model.mismatched_j"


class NotBinary(DgorError):
    code = "model.not_binary"


class BadRate(DgorError):
    code = "model.bad_rate"


class InvalidDesign(DgorError):
    code = "design.invalid"


class InvalidTrajectory(DgorError):
    code = "dataset.invalid_trajectory"


class EmptyDataset(DgorError):
    code = "dataset.empty"


class EmptyArm(DgorError):
    code = "dataset.empty_arm"


class MissingArm(DgorError):
    code = "dataset.missing_arm"


class BadCategory(DgorError):
    code = "dataset.bad_category"


class MissingY2ForNonResponder(DgorError):
    code = "dataset.missing_y2_for_nonresponder"


class SchemaError(DgorError):
    code = "dataset.schema"


class DegenerateDenominator(DgorError):
    """Raised only when a log-scale quantity is requested from a dGOR of 0 or +inf."""

    code = "result.degenerate_denominator"


class MissingRate(DgorError):
    code = "weights.missing_rate"


class ZeroWeight(DgorError):
    code = "weights.zero_weight"


class OutOfRange(DgorError):
    code = "value.out_of_range"


class ZeroEffect(DgorError):
    code = "inference.zero_effect"


class NonFiniteEstimate(DgorError):
    code = "inference.non_finite_estimate"


class IncompleteTruth(DgorError):
    code = "simulation.incomplete_truth"


class AllReplicationsFailed(DgorError):
    code = "simulation.all_replications_failed"


class UsageError(DgorError):
    code = "cli.usage"
