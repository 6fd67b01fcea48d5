"""Attack use cases - the patch optimization loop"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from bulbpatch.core.attack.entities import (
    AttackConfig,
    AttackMode,
    AttackState,
    LossBreakdown,
    OptimizerKind,
    PatchParams,
    PatchSpec,
)
from bulbpatch.core.attack.losses import FrozenBatch, as_sample, freeze_batch
from bulbpatch.core.attack.params import (
    from_vector,
    init_params,
    parameter_count,
    project_params,
    render_params,
    render_vector,
    to_vector,
)
from bulbpatch.core.detect.entities import Capability
from bulbpatch.core.detect.ports import DetectorAdapter
from bulbpatch.core.detect.use_cases import require_capability
from bulbpatch.core.imaging.rendering import render_gradient
from bulbpatch.core.transforms.entities import TransformConfig
from bulbpatch.utils.exceptions import NonFiniteLossError, ValidationError
from bulbpatch.utils.observability import log_event, track_operation
from bulbpatch.utils.rng import substream

logger = logging.getLogger(__name__)

# iteration keys never reach this, so the init stream is disjoint from step streams
INIT_STREAM_KEY = 2 ** 40


def fd_gradient(loss_fn: Callable[[np.ndarray], float], theta: np.ndarray, step: float) -> np.ndarray:
    """Central differences (L(theta + h e_j) - L(theta - h e_j)) / 2h over every coordinate."""
    grad = np.zeros_like(theta, dtype=np.float64)
    for j in range(theta.size):
        shifted = theta.astype(np.float64, copy=True)
        shifted[j] = theta[j] + step
        upper = loss_fn(shifted)
        shifted[j] = theta[j] - step
        lower = loss_fn(shifted)
        grad[j] = (upper - lower) / (2.0 * step)
    return grad


def momentum_step(state: AttackState, grad: np.ndarray, config: AttackConfig, side: int) -> None:
    """v <- m v - lr g; params <- project(params + v)."""
    state.momentum = config.momentum * state.momentum - config.resolved_learning_rate * grad
    state.params = from_vector(to_vector(state.params) + state.momentum, state.params, side)


def _finite(loss: LossBreakdown) -> bool:
    """Steps skip their update on a non-finite loss so the state stays the one that produced it."""
    return all(math.isfinite(v) for v in loss)


def _fd_step(state: AttackState, frozen: FrozenBatch, config: AttackConfig, side: int) -> LossBreakdown:
    params = state.params
    loss = frozen.loss(render_params(params, side))
    theta = to_vector(params)
    if theta.size and _finite(loss):
        grad = fd_gradient(lambda v: frozen.loss(render_vector(v, params, side)).total, theta, config.fd_step)
        momentum_step(state, grad, config, side)
    return loss


def _analytic_step(state: AttackState, frozen: FrozenBatch, config: AttackConfig, side: int) -> LossBreakdown:
    params = state.params
    loss, patch_grad = frozen.loss_and_gradient(render_params(params, side))
    if state.momentum.size and _finite(loss):
        if config.mode == AttackMode.GAUSSIAN:
            grad = render_gradient(params, side, patch_grad).reshape(-1)
        else:
            grad = patch_grad.reshape(-1)
        momentum_step(state, grad, config, side)
    return loss


def _nelder_mead_step(state: AttackState, frozen: FrozenBatch, config: AttackConfig, side: int) -> LossBreakdown:
    """Budgeted Nelder-Mead on the frozen batch loss, started from the current centers."""
    params = state.params
    loss = frozen.loss(render_params(params, side))
    theta = to_vector(params)
    if not theta.size:
        return loss

    def objective(v: np.ndarray) -> float:
        return frozen.loss(render_vector(np.clip(v, 0.0, float(side)), params, side)).total

    result = minimize(
        objective,
        theta,
        method="Nelder-Mead",
        options={"maxfev": config.nelder_mead_evals, "xatol": 1e-3, "fatol": 1e-9},
    )
    if np.isfinite(result.fun) and result.fun < loss.total:
        state.params = from_vector(result.x, params, side)
    return loss


_STEPS = {
    OptimizerKind.SGD_MOMENTUM_FD: _fd_step,
    OptimizerKind.ANALYTIC_SGD: _analytic_step,
    OptimizerKind.NELDER_MEAD: _nelder_mead_step,
}


def _step_batch(samples, adapters, config, transform_config, iteration, map_fn) -> FrozenBatch:
    chooser = substream(config.seed, iteration)
    replace = len(samples) < config.batch_size
    picks = chooser.choice(len(samples), size=config.batch_size, replace=replace)
    rngs = [substream(config.seed, iteration, slot) for slot in range(config.batch_size)]
    return freeze_batch(
        [samples[i] for i in picks],
        adapters,
        config.tv_weight,
        rngs,
        transform_config,
        config.eot_draws,
        config.target_class,
        map_fn=map_fn,
    )


def optimize_patch(
    dataset: Sequence,
    adapters: Sequence[DetectorAdapter],
    config: AttackConfig,
    patch_spec: Optional[PatchSpec] = None,
    transform_config: Optional[TransformConfig] = None,
    initial: Optional[PatchParams] = None,
) -> Tuple[PatchParams, AttackState]:
    """
    Minimize batch-mean ensemble objectness plus lambda * TV.

    Each iteration draws a batch and its transforms from streams keyed by
    (seed, iteration, slot), records the batch loss at the current params,
    then updates them. Deterministic given the seed.
    """
    spec = patch_spec or PatchSpec()
    side = spec.side_px
    samples = [s for s in (as_sample(item) for item in dataset) if s[1]]
    if not samples:
        raise ValidationError("dataset has no annotated persons to place the patch on")
    if not adapters:
        raise ValidationError("at least one detector adapter is required")

    optimizer = config.resolved_optimizer
    if optimizer == OptimizerKind.ANALYTIC_SGD:
        require_capability(adapters, Capability.IMAGE_GRADIENTS, config.mode.value)

    if initial is None:
        initial = init_params(
            config.mode, spec.M, side, substream(config.seed, INIT_STREAM_KEY), spec.init_scheme, spec.template()
        )
    params = project_params(initial, side)
    state = AttackState(params=params, momentum=np.zeros(to_vector(params).size))
    step = _STEPS[optimizer]
    n_params = parameter_count(config.mode, spec.M if config.mode == AttackMode.GAUSSIAN else 0, side)

    with ExitStack() as stack:
        map_fn = map
        if config.workers > 1:
            map_fn = stack.enter_context(ThreadPoolExecutor(max_workers=config.workers)).map
        with track_operation(
            "attack.optimize",
            mode=config.mode.value,
            optimizer=optimizer.value,
            params=n_params,
            iterations=config.iterations,
            seed=config.seed,
        ) as obs:
            for iteration in range(config.iterations):
                frozen = _step_batch(samples, adapters, config, transform_config, iteration, map_fn)
                loss = step(state, frozen, config, side)
                if not _finite(loss):
                    raise NonFiniteLossError(iteration, state)
                state.record(loss)
                log_event(
                    "attack.step",
                    level=logging.DEBUG,
                    iteration=iteration,
                    loss=loss.total,
                    obj=loss.objectness,
                    tv=loss.tv,
                )
            if state.history:
                obs["first_loss"] = state.history[0].total
                obs["final_loss"] = state.history[-1].total
    return state.params, state
