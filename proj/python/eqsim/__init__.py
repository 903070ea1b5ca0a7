"""Iterative Gaussian (Kalman) equalization of linear ISI channels.

Thin Python layer over the C++ core: Gaussian message algebra in precision
form, soft-bit conversions (standard and Minka, with damping), state-space
channel models, the iterative equalizer with schedules A/B, BCJR baselines,
a convolutional turbo chain, and the seeded Monte-Carlo BER harness.
"""

try:
    from ._eqsim import *  # noqa: F401,F403  (installed package layout)
    from . import _eqsim as _impl
except ImportError:  # pragma: no cover - in-tree builds put the module on sys.path
    from _eqsim import *  # noqa: F401,F403
    import _eqsim as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
