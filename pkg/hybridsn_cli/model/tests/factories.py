from hybridsn_cli.model import SeHybridSnConfig


def tiny_config(**overrides) -> SeHybridSnConfig:
    """Window 5, 8 components, 2 classes: small enough for finite differences."""
    values = dict(
        window=5,
        pca_k=8,
        num_classes=2,
        conv3d_specs=((2, (3, 3, 3)), (2, (3, 3, 3)), (2, (1, 3, 3)), (2, (1, 3, 3))),
        conv2d_spec=(4, (3, 3)),
        sep_conv_spec=(4, (3, 3)),
        se_reduction=2,
        fc_dims=(8, 6),
        dropout_rate=0.25,
        seed=11,
    )
    values.update(overrides)
    return SeHybridSnConfig(**values)
