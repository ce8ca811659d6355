import numpy as np

from hybridsn_cli.data.cube import GroundTruthMap

# Labeled pixels per class in the three benchmark scenes.
INDIAN_PINES_TOTALS = (46, 1428, 830, 237, 483, 730, 28, 478, 20, 972, 2455, 593, 205, 1265, 386, 93)
PAVIA_UNIVERSITY_TOTALS = (6631, 18649, 2099, 3064, 1354, 5029, 1330, 3682, 947)
SALINAS_TOTALS = (2009, 3726, 1976, 1394, 2678, 3959, 3579, 11271, 6203, 3278, 1068, 1927, 916, 1070, 7268, 1807)

# per-class training counts reported for Indian Pines at 5 %
INDIAN_PINES_REPORTED_TRAIN = (3, 72, 41, 12, 24, 37, 2, 24, 1, 48, 122, 30, 10, 63, 20, 4)


def ground_truth_with_totals(totals, shape, seed=0) -> GroundTruthMap:
    """Scatter ``totals[c]`` pixels of class c + 1 over an otherwise unlabeled grid."""
    labels = np.repeat(np.arange(1, len(totals) + 1), totals)
    grid = np.zeros(shape[0] * shape[1], dtype=np.int64)
    grid[: labels.size] = labels
    grid = np.random.default_rng(seed).permutation(grid)
    return GroundTruthMap(grid.reshape(shape), num_classes=len(totals))
