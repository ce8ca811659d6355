from hybridsn_cli.selfcheck.suite import CHECKS, CheckResult, check_names, run_selfcheck

__all__ = ["CHECKS", "CheckResult", "check_names", "run_selfcheck"]
