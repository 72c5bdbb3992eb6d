"""Prime-block random walk laboratory.

Everything lives in the compiled core; this package just re-exports it.
"""

from zxlab._core import *  # noqa: F401,F403
