"""Per-evaluation log rows shared by the engine, baselines and metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class TrajectoryRecord:
    """One row of a run.

    ``t`` numbers evaluations from 1; ``round`` is 0 for initial design
    points and counts optimisation rounds afterwards. A record with
    ``x is None`` marks a round that declared infeasibility and made no query.
    """

    t: int
    round: int
    x: Optional[np.ndarray]
    F_true: Optional[np.ndarray]
    G_true: Optional[np.ndarray]
    y_f: Optional[np.ndarray]
    y_g: Optional[np.ndarray]
    beta: float = float("nan")
    theta: Optional[np.ndarray] = None
    declared: bool = False
    feasible_set_size: int = -1
    max_min_ucb: float = float("nan")
    aux_x: Optional[np.ndarray] = None

    @property
    def queried(self) -> bool:
        return self.x is not None

    @property
    def feasible_true(self) -> bool:
        if self.G_true is None:
            return False
        return bool(np.all(self.G_true >= 0))
