"""Kernel selection: compiled ``_core`` when importable, else ``_pycore``.

Set ``ARENA_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pycore

if os.environ.get("ARENA_PURE_PYTHON", "") not in ("", "0"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:  # pragma: no cover - depends on build environment
        _core = None

if _core is not None:
    State = _core.State
    policy_probs = _core.policy_probs
    BACKEND = "compiled"
else:
    State = _pycore.State
    policy_probs = _pycore.policy_probs
    BACKEND = "python"

PyState = _pycore.State
CState = _core.State if _core is not None else None
