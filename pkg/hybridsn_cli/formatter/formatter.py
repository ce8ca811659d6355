from typing import Optional, Sequence

from rich import print
from rich.panel import Panel
from rich.table import Table
from rich.text import Text


def format_percent(value: Optional[float]) -> str:
    return "-" if value is None else f"{100.0 * value:.2f}"


def format_mean_std(summary) -> str:
    if summary is None:
        return "-"
    return f"{100.0 * summary.mean:.2f} ± {100.0 * summary.std:.2f}"


class Formatter:
    def __init__(self):
        pass

    def _to_renderable(self, message):
        if isinstance(message, str):
            return message
        return Text(str(message))

    def print_error_panel(self, message, title="Error"):
        error_panel = Panel(
            self._to_renderable(message),
            title=f"[bold red]{title}[/bold red]",
            title_align="left",
            style="bold red",
            expand=False,
            padding=(1, 1),
        )
        print(error_panel)

    def print_success_panel(self, message):
        success_panel = Panel(
            self._to_renderable(message),
            title="[bold green]Success[/bold green]",
            title_align="left",
            style="bold green",
            expand=False,
        )
        print(success_panel)

    def print_warning_panel(self, message, title="Warning"):
        warning_panel = Panel(
            self._to_renderable(message),
            title=f"[bold yellow]{title}[/bold yellow]",
            title_align="left",
            style="bold yellow",
            expand=False,
            padding=(1, 1),
        )
        print(warning_panel)

    def split_table(self, rows: Sequence[Sequence], title: str = "Samples per class") -> Table:
        """Rows are (number, class name, training, validation, testing, total); a Total row is appended."""
        table = Table(title=title)
        table.add_column("Number", justify="right")
        table.add_column("Class", justify="left")
        for column in ("Training", "Validation", "Testing", "Total"):
            table.add_column(column, justify="right")

        sums = [0, 0, 0, 0]
        for index, (number, name, *counts) in enumerate(rows):
            table.add_row(str(number), name, *(str(c) for c in counts), end_section=index == len(rows) - 1)
            sums = [s + c for s, c in zip(sums, counts)]
        table.add_row("", "Total", *(str(s) for s in sums))
        return table

    def metrics_table(self, report, class_names: Sequence[str], title: str = "Classification results") -> Table:
        table = Table(title=title)
        table.add_column("Number", justify="right")
        table.add_column("Class", justify="left")
        table.add_column("Accuracy (%)", justify="right")

        for index, (name, accuracy) in enumerate(zip(class_names, report.per_class)):
            table.add_row(str(index + 1), name, format_percent(accuracy), end_section=index == len(class_names) - 1)
        table.add_row("", "OA", format_percent(report.oa))
        table.add_row("", "AA", format_percent(report.aa))
        table.add_row("", "Kappa×100", format_percent(report.kappa))
        return table

    def aggregate_table(self, report, class_names: Sequence[str], title: str = "Mean ± std over runs") -> Table:
        table = Table(title=f"{title} ({report.completed} runs)")
        table.add_column("Number", justify="right")
        table.add_column("Class", justify="left")
        table.add_column("Accuracy (%)", justify="right")

        for index, (name, summary) in enumerate(zip(class_names, report.per_class)):
            table.add_row(str(index + 1), name, format_mean_std(summary), end_section=index == len(class_names) - 1)
        table.add_row("", "OA", format_mean_std(report.oa))
        table.add_row("", "AA", format_mean_std(report.aa))
        table.add_row("", "Kappa×100", format_mean_std(report.kappa))
        return table

    def selfcheck_table(self, results) -> Table:
        table = Table(title="Self-check")
        table.add_column("Check", justify="left")
        table.add_column("Status", justify="center")
        table.add_column("Detail", justify="left")
        for result in results:
            table.add_row(result.name, "✅" if result.passed else "❌", result.detail)
        return table

    def print_table(self, table: Table):
        print(table)
