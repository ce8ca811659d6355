from hybridsn_cli.metrics.confusion import (
    ConfusionMatrix,
    MetricsReport,
    average_accuracy,
    kappa,
    merge_all,
    metrics_report,
    overall_accuracy,
    per_class_accuracy,
)

__all__ = [
    "ConfusionMatrix",
    "MetricsReport",
    "average_accuracy",
    "kappa",
    "merge_all",
    "metrics_report",
    "overall_accuracy",
    "per_class_accuracy",
]
