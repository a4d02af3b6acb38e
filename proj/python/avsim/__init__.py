from avsim._avsim import *  # noqa: F401,F403
from avsim import _avsim as _ext

__all__ = [name for name in dir(_ext) if not name.startswith("_")]
