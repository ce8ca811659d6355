import logging

from hybridsn_cli.errors import DataError, HybridSNError
from hybridsn_cli.formatter.formatter import Formatter

logger = logging.getLogger(__name__)


class Handler:
    """Base class of the command handlers; ``execute`` returns the process exit code."""

    error_title = "Error"

    def __init__(self):
        self.formatter = Formatter()

    def execute(self, **kwargs) -> int:
        try:
            return self.run(**kwargs)
        except HybridSNError as error:
            self.formatter.print_error_panel(error, title=self.error_title)
            return error.exit_code
        except OSError as error:
            logger.debug("I/O failure", exc_info=True)
            wrapped = DataError(error.strerror or str(error), path=error.filename)
            self.formatter.print_error_panel(wrapped, title=self.error_title)
            return wrapped.exit_code

    def run(self, **kwargs) -> int:  # pragma: no cover
        raise NotImplementedError()
