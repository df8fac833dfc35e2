from ._attack import WhiteboxConfig, run_whitebox
from ._reconstruct import reconstruct_byte, reconstruct_bytes

__all__ = [
    "WhiteboxConfig",
    "run_whitebox",
    "reconstruct_byte",
    "reconstruct_bytes",
]
