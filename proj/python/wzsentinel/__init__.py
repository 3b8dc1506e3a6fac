"""Python access to the work-zone conflict forecasting core."""

from ._wzsentinel import *  # noqa: F401,F403
from ._wzsentinel import WzError, __version__, run_cli  # noqa: F401
