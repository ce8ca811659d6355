from hybridsn_cli.errors import ConfigError, NumericalError
from hybridsn_cli.handler import Handler
from hybridsn_cli.selfcheck import check_names, run_selfcheck


class SelfCheckHandler(Handler):
    error_title = "Self-check Failed"

    def run(self, **kwargs) -> int:
        only = list(kwargs.get("only") or [])
        unknown = sorted(set(only) - set(check_names()))
        if unknown:
            raise ConfigError(f"Unknown checks: {', '.join(unknown)}. Available: {', '.join(check_names())}")

        results = run_selfcheck(seed=kwargs.get("seed") or 0, only=only or None)
        self.formatter.print_table(self.formatter.selfcheck_table(results))

        failed = [result.name for result in results if not result.passed]
        if failed:
            raise NumericalError(f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}")

        self.formatter.print_success_panel(f"All {len(results)} checks passed")
        return 0
