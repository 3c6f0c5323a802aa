"""Likelihood-weighting inference over rule programs and Bayesian networks.

Thin wrapper around the compiled _cslw extension. The extension lives inside
this package when pip-installed, or next to it on sys.path when running
against a CMake build tree.
"""

try:
    from ._cslw import *  # noqa: F401,F403
    from . import _cslw as _impl
except ImportError:  # CMake build tree: _cslw.so sits on sys.path directly
    from _cslw import *  # noqa: F401,F403
    import _cslw as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
