"""Attack domain entities"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from bulbpatch.core.detect.entities import PERSON
from bulbpatch.core.imaging.entities import GaussianPatchParams, Patch


class AttackMode(str, Enum):
    GAUSSIAN = "gaussian"
    PIXEL = "pixel"


class OptimizerKind(str, Enum):
    SGD_MOMENTUM_FD = "sgd-momentum-fd"
    NELDER_MEAD = "nelder-mead"
    ANALYTIC_SGD = "analytic-sgd"


class InitScheme(str, Enum):
    UNIFORM = "uniform"
    GRID = "grid"


DEFAULT_LEARNING_RATE = {AttackMode.GAUSSIAN: 2.0, AttackMode.PIXEL: 0.01}


class AttackConfig(BaseModel):
    """
    Optimizer settings.

    ``optimizer`` and ``learning_rate`` default per mode: gaussian runs
    sgd-momentum-fd at 2.0 px, pixel runs analytic-sgd at 0.01.
    """
    model_config = ConfigDict(frozen=True)

    mode: AttackMode = AttackMode.GAUSSIAN
    tv_weight: float = 0.1
    batch_size: int = 8
    iterations: int = 100
    learning_rate: Optional[float] = None
    momentum: float = 0.9
    eot_draws: int = 1
    fd_step: float = 0.5
    optimizer: Optional[OptimizerKind] = None
    nelder_mead_evals: int = 100
    seed: int = 0
    workers: int = 1
    target_class: str = PERSON

    @model_validator(mode="after")
    def _check(self) -> "AttackConfig":
        if not self.tv_weight >= 0:
            raise ValueError("tv_weight (lambda) must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be > 0")
        if self.eot_draws < 1:
            raise ValueError("eot_draws must be >= 1")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.learning_rate is not None and not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.nelder_mead_evals < 1:
            raise ValueError("nelder_mead_evals must be >= 1")
        if self.mode == AttackMode.PIXEL and self.optimizer not in (None, OptimizerKind.ANALYTIC_SGD):
            raise ValueError(f"pixel mode only supports {OptimizerKind.ANALYTIC_SGD.value}")
        return self

    @property
    def resolved_optimizer(self) -> OptimizerKind:
        if self.optimizer is not None:
            return self.optimizer
        return OptimizerKind.ANALYTIC_SGD if self.mode == AttackMode.PIXEL else OptimizerKind.SGD_MOMENTUM_FD

    @property
    def resolved_learning_rate(self) -> float:
        return self.learning_rate if self.learning_rate is not None else DEFAULT_LEARNING_RATE[self.mode]


class LossBreakdown(NamedTuple):
    """(L, L_obj term, L_tv term) with L = L_obj + lambda * L_tv."""
    total: float
    objectness: float
    tv: float


class LossRecord(NamedTuple):
    iteration: int
    total: float
    objectness: float
    tv: float


PatchParams = Union[GaussianPatchParams, Patch]


@dataclass
class AttackState:
    """Optimizer state; ``history`` holds one record per completed iteration."""
    params: PatchParams
    momentum: np.ndarray
    iteration: int = 0
    history: List[LossRecord] = field(default_factory=list)

    def record(self, loss: LossBreakdown) -> None:
        self.history.append(LossRecord(self.iteration, loss.total, loss.objectness, loss.tv))
        self.iteration += 1

    def smoothed(self, window: int = 5, head: bool = False, column: str = "objectness") -> float:
        """Mean of the first (head) or last ``window`` recorded values."""
        if not self.history:
            return float("nan")
        values = [getattr(r, column) for r in self.history]
        part = values[:window] if head else values[-window:]
        return float(np.mean(part))


class PatchSpec(BaseModel):
    """Geometry and bulb profile of the patch being optimized."""
    model_config = ConfigDict(frozen=True)

    side_px: int = 300
    M: int = 22
    s: float = GaussianPatchParams.model_fields["s"].default
    sigma: float = GaussianPatchParams.model_fields["sigma"].default
    mu: float = GaussianPatchParams.model_fields["mu"].default
    init_scheme: InitScheme = InitScheme.UNIFORM
    per_spot_profiles: bool = False
    amplitudes: Optional[List[float]] = None
    sigmas: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self) -> "PatchSpec":
        if self.side_px < 1:
            raise ValueError("side_px must be >= 1")
        if self.M < 0:
            raise ValueError("M must be >= 0")
        if self.per_spot_profiles:
            for name in ("amplitudes", "sigmas"):
                values = getattr(self, name)
                if values is not None and len(values) != self.M:
                    raise ValueError(f"per-spot {name} needs exactly M={self.M} entries")
        return self

    def template(self) -> GaussianPatchParams:
        """Profile shared by every spot; per-spot lists only when enabled."""
        per_spot = self.per_spot_profiles
        return GaussianPatchParams(
            s=self.s,
            sigma=self.sigma,
            mu=self.mu,
            amplitudes=self.amplitudes if per_spot else None,
            sigmas=self.sigmas if per_spot else None,
            centers=[(0.0, 0.0)] * self.M if per_spot and (self.amplitudes or self.sigmas) else [],
        )
