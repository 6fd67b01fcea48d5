"""Loss assembly and patch optimization"""

from bulbpatch.core.attack.entities import (
    AttackConfig,
    AttackMode,
    AttackState,
    InitScheme,
    LossBreakdown,
    LossRecord,
    OptimizerKind,
    PatchParams,
    PatchSpec,
)
from bulbpatch.core.attack.losses import FrozenBatch, attack_loss, freeze_batch
from bulbpatch.core.attack.params import init_params, parameter_count, project_params, render_params
from bulbpatch.core.attack.use_cases import fd_gradient, momentum_step, optimize_patch

__all__ = [
    "AttackConfig",
    "AttackMode",
    "AttackState",
    "FrozenBatch",
    "InitScheme",
    "LossBreakdown",
    "LossRecord",
    "OptimizerKind",
    "PatchParams",
    "PatchSpec",
    "attack_loss",
    "fd_gradient",
    "freeze_batch",
    "init_params",
    "momentum_step",
    "optimize_patch",
    "parameter_count",
    "project_params",
    "render_params",
]
