"""Barycentric coordinates for 3-category outcome distributions.

Each pmf maps to a point in the equilateral triangle with category-1 mass
pulling toward (0,0), category 2 toward (1,0), and category 3 toward the
apex. The CSV output feeds any external plotting tool.
"""
from dgor import barycentric_coords, validate_pmf
from dgor.simulate import coords_csv

scenario_pmfs = [
    ("responders_A", (0.23, 0.51, 0.26)),
    ("nonresponders_A", (0.50, 0.41, 0.09)),
    ("responders_B", (0.31, 0.50, 0.19)),
    ("nonresponders_B", (0.14, 0.47, 0.39)),
    ("centroid", (1 / 3, 1 / 3, 1 / 3)),
]

for label, probs in scenario_pmfs:
    x, y = barycentric_coords(validate_pmf(probs))
    print(f"{label:>16}: ({x:.4f}, {y:.4f})")

print("\nCSV form:")
print(coords_csv([(label, validate_pmf(p)) for label, p in scenario_pmfs]))
