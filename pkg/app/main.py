import logging
import sys

import click

from app import __version__
from app.config.config import configure_logging
from app.errors import ToolkitException
from app.routes.certify import certify_route
from app.routes.norms import norms_route
from app.routes.probe import probe_route
from app.routes.sobolev import sobolev_route
from app.routes.solve import solve_route
from app.routes.validate import validate_route

logger = logging.getLogger(__name__)

cli = click.CommandCollection(
    name="dphase",
    help="Numerical toolkit for double phase N-functions with variable exponents.",
    sources=[validate_route, norms_route, sobolev_route, certify_route, probe_route, solve_route],
)
cli = click.version_option(__version__, prog_name="dphase")(cli)


def main(argv=None) -> int:
    """
    Run one command and map the outcome to an exit code.

    Returns:
        int: 0 on success, 2 for a negative verdict, 1 for any error.
    """
    configure_logging()
    try:
        result = cli.main(args=argv, prog_name="dphase", standalone_mode=False)
    except ToolkitException as exc:
        logger.error("%s: %s", type(exc).__name__, exc.detail)
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except Exception:
        logger.exception("Unexpected error")
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
