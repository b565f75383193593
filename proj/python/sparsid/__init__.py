"""Sparse stiffness-damage identification for planar trusses."""

try:
    from ._sparsid import *  # noqa: F401,F403
    from ._sparsid import __doc__  # noqa: F401
except ImportError:  # pragma: no cover - in-tree test layout
    from _sparsid import *  # type: ignore # noqa: F401,F403

__version__ = "0.1.0"
