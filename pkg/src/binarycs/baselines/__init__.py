from .basis_pursuit import BasisPursuitConfig, BasisPursuitResult, basis_pursuit_decode
from .expander import ExpanderDecodeConfig, ExpanderResult, default_max_iters, expander_decode

__all__ = [
    "BasisPursuitConfig",
    "BasisPursuitResult",
    "basis_pursuit_decode",
    "ExpanderDecodeConfig",
    "ExpanderResult",
    "default_max_iters",
    "expander_decode",
]
