"""Pommerman arena: forward model, FEMCTS and baseline agents, tournaments."""

__version__ = "0.1.0"

from ._backend import BACKEND, State
from .engine import (
    FULL,
    Action,
    ConfigError,
    GameConfig,
    GameOutcome,
    Mode,
    Observation,
    Tile,
    generate_board,
    legal_placements,
    observe,
    outcome,
    step,
)

__all__ = [
    "__version__", "BACKEND", "FULL", "Action", "ConfigError", "GameConfig", "GameOutcome", "Mode",
    "Observation", "State", "Tile", "generate_board", "legal_placements", "observe",
    "outcome", "step",
]
