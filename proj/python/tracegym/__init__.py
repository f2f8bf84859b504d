"""Einstein-product tensor trace inequalities and tail bounds."""

try:
    from ._tracegym import *  # noqa: F401,F403
    from ._tracegym import __version__  # noqa: F401
except ImportError:
    from _tracegym import *  # noqa: F401,F403
    from _tracegym import __version__  # noqa: F401
