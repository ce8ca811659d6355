import numpy as np

HEIGHT, WIDTH, BANDS = 12, 12, 10
CLASS_NAMES = ["water", "field", "forest"]
PALETTE = [[0, 0, 0], [0, 0, 255], [255, 255, 0], [0, 128, 0]]

RUN_CONFIG_TOML = """\
dataset = "{manifest}"
out = "{out}"
seed = 3

[preprocess]
window = 5
pca_k = 8
fractions = [0.2, 0.2]

[model]
conv3d_specs = [[2, [3, 3, 3]], [2, [3, 3, 3]], [2, [1, 3, 3]], [2, [1, 3, 3]]]
conv2d_spec = [4, [3, 3]]
sep_conv_spec = [4, [3, 3]]
se_reduction = 2
fc_dims = [8, 6]
dropout_rate = 0.25

[training]
batch_size = 16
max_epochs = 3
patience = 3
threads = 1
"""


def toy_labels() -> np.ndarray:
    """Three column stripes of four pixels, first row unlabeled."""
    labels = np.repeat(np.arange(WIDTH)[None, :] // 4 + 1, HEIGHT, axis=0)
    labels[0, :] = 0
    return labels
