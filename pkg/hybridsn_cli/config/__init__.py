from hybridsn_cli.config.settings import (
    RESOLVED_CONFIG_FILE,
    PreprocessConfig,
    RunConfig,
    check_prepared_components,
    resolve_run_config,
)

__all__ = [
    "PreprocessConfig",
    "RESOLVED_CONFIG_FILE",
    "RunConfig",
    "check_prepared_components",
    "resolve_run_config",
]
