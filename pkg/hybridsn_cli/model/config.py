from dataclasses import asdict, dataclass, field, fields
from typing import Any

from hybridsn_cli.errors import ConfigError

ARCHITECTURES = ("se-hybridsn", "hybridsn")
HEADS = ("average", "flatten")
SE_POSITIONS = ("post-activation", "pre-activation")
DTYPES = ("float64", "float32")

ConvSpec = tuple[int, tuple[int, ...]]


def _default_conv3d_specs() -> tuple[ConvSpec, ...]:
    return ((8, (7, 3, 3)), (16, (5, 3, 3)), (16, (3, 3, 3)), (16, (3, 3, 3)))


@dataclass(frozen=True)
class SeHybridSnConfig:
    """Network hyperparameters.

    ``fc_dims`` lists the hidden classifier widths; the final layer always
    maps to ``num_classes``. 3D kernels are (spectral, height, width).
    """

    window: int = 19
    pca_k: int = 30
    num_classes: int = 16
    conv3d_specs: tuple[ConvSpec, ...] = field(default_factory=_default_conv3d_specs)
    conv2d_spec: ConvSpec = (64, (3, 3))
    sep_conv_spec: ConvSpec = (128, (3, 3))
    se_reduction: int = 8
    fc_dims: tuple[int, ...] = (256, 128)
    dropout_rate: float = 0.4
    seed: int = 0
    architecture: str = "se-hybridsn"
    use_se: bool = True
    head: str = "average"
    se_position: str = "post-activation"
    dtype: str = "float64"

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ConfigError(f"window must be a positive odd number, got {self.window}")
        if self.pca_k < 1:
            raise ConfigError(f"pca_k must be >= 1, got {self.pca_k}")
        if self.num_classes < 1:
            raise ConfigError(f"num_classes must be >= 1, got {self.num_classes}")
        if self.architecture not in ARCHITECTURES:
            raise ConfigError(f"architecture must be one of {', '.join(ARCHITECTURES)}, got {self.architecture!r}")
        if self.head not in HEADS:
            raise ConfigError(f"head must be one of {', '.join(HEADS)}, got {self.head!r}")
        if self.se_position not in SE_POSITIONS:
            raise ConfigError(f"se_position must be one of {', '.join(SE_POSITIONS)}, got {self.se_position!r}")
        if self.dtype not in DTYPES:
            raise ConfigError(f"dtype must be one of {', '.join(DTYPES)}, got {self.dtype!r}")
        if self.se_reduction < 1:
            raise ConfigError(f"se_reduction must be >= 1, got {self.se_reduction}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if not self.conv3d_specs:
            raise ConfigError("conv3d_specs must list at least one layer")
        if self.architecture == "se-hybridsn" and len(self.conv3d_specs) != 4:
            raise ConfigError(f"se-hybridsn uses four 3D convolutions, got {len(self.conv3d_specs)}")
        for out_channels, kernel in self.conv3d_specs:
            if out_channels < 1 or len(kernel) != 3:
                raise ConfigError(f"invalid 3D convolution spec ({out_channels}, {kernel})")
        for name, (out_channels, kernel) in (("conv2d_spec", self.conv2d_spec), ("sep_conv_spec", self.sep_conv_spec)):
            if out_channels < 1 or len(kernel) != 2:
                raise ConfigError(f"invalid {name} ({out_channels}, {kernel})")
        if any(width < 1 for width in self.fc_dims):
            raise ConfigError(f"fc_dims must be positive, got {self.fc_dims}")

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return tuple(self.fc_dims) + (self.num_classes,)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["conv3d_specs"] = [[c, list(k)] for c, k in self.conv3d_specs]
        data["conv2d_spec"] = [self.conv2d_spec[0], list(self.conv2d_spec[1])]
        data["sep_conv_spec"] = [self.sep_conv_spec[0], list(self.sep_conv_spec[1])]
        data["fc_dims"] = list(self.fc_dims)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SeHybridSnConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown model config keys: {', '.join(unknown)}")

        values = dict(data)
        try:
            if "conv3d_specs" in values:
                specs = values["conv3d_specs"]
                values["conv3d_specs"] = tuple((int(c), tuple(int(k) for k in kernel)) for c, kernel in specs)
            for key in ("conv2d_spec", "sep_conv_spec"):
                if key in values:
                    channels, kernel = values[key]
                    values[key] = (int(channels), tuple(int(k) for k in kernel))
            if "fc_dims" in values:
                values["fc_dims"] = tuple(int(d) for d in values["fc_dims"])
            return cls(**values)
        except (TypeError, ValueError) as error:
            raise ConfigError(f"Invalid model config: {error}") from error


def hybridsn_baseline_config(
    window: int = 19, pca_k: int = 30, num_classes: int = 16, **overrides: Any
) -> SeHybridSnConfig:
    """Plain HybridSN: three valid 3D convolutions, one 2D convolution, flattened head, no attention."""
    values: dict[str, Any] = dict(
        window=window,
        pca_k=pca_k,
        num_classes=num_classes,
        conv3d_specs=((8, (7, 3, 3)), (16, (5, 3, 3)), (32, (3, 3, 3))),
        conv2d_spec=(64, (3, 3)),
        architecture="hybridsn",
        use_se=False,
        head="flatten",
    )
    values.update(overrides)
    return SeHybridSnConfig(**values)
