import logging

from os import environ
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Numerical defaults shared by every command
LOG_LEVEL = environ.get('DPH_LOG_LEVEL', 'INFO').upper()
SEED = int(environ.get('DPH_SEED', '0'))
THREADS = int(environ.get('DPH_THREADS', '1'))
QUAD_TOL = float(environ.get('DPH_QUAD_TOL', '1e-10'))
OUTPUT_DIR = environ.get('DPH_OUTPUT_DIR', './runs')
SOBOLEV_PER_DECADE = int(environ.get('DPH_SOBOLEV_PER_DECADE', '512'))

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level=None):
    """
    Configure the root logger once for command-line runs.

    Args:
        level (Optional[str]): Overrides DPH_LOG_LEVEL when given.
    """
    logging.basicConfig(level=(level or LOG_LEVEL), format=LOG_FORMAT)
