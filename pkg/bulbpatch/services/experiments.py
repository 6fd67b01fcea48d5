"""
Experiment Service

Runs the attack and evaluation protocols configured in an ExperimentConfig:
- optimize a patch against the attack detectors
- condition suite (none / adversarial / blank / noise) on the evaluate split
- size sweep over patch scales
- spot-count sweep under a shared seed
- single vs ensemble transfer to held-out detectors
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from bulbpatch.config.models import ExperimentConfig
from bulbpatch.core.attack import (
    AttackMode,
    AttackState,
    PatchParams,
    PatchSpec,
    optimize_patch,
    parameter_count,
    render_params,
)
from bulbpatch.core.detect import DetectorAdapter
from bulbpatch.core.evaluate import APReport, Condition, LabeledPatch, default_conditions, run_condition_suite
from bulbpatch.core.imaging import Patch
from bulbpatch.core.scenegen import AnnotatedImage, Dataset
from bulbpatch.services.detectors import DetectorRegistry
from bulbpatch.utils.observability import log_event, track_operation

logger = logging.getLogger(__name__)


@dataclass
class OptimizeResult:
    params: PatchParams
    state: AttackState
    patch: Patch
    side_px: int
    parameter_count: int


class ExperimentService:
    """
    Experiment workflows with injectable detectors.

    Uses dependency injection for the detector registry so tests can run the
    protocols against in-process adapters.
    """

    def __init__(self, config: ExperimentConfig, registry: Optional[DetectorRegistry] = None):
        self.config = config
        self.registry = registry or DetectorRegistry(config)

    def close(self) -> None:
        self.registry.close()

    def patch_spec(self, M: Optional[int] = None) -> PatchSpec:
        if M is None or M == self.config.patch.M:
            return self.config.patch
        return self.config.patch.model_copy(update={"M": M})

    def eval_split(self, dataset: Dataset) -> List[AnnotatedImage]:
        return dataset.split(self.config.evaluation.split)

    def optimize(
        self,
        train: Sequence[AnnotatedImage],
        adapters: Optional[List[DetectorAdapter]] = None,
        M: Optional[int] = None,
        initial: Optional[PatchParams] = None,
    ) -> OptimizeResult:
        spec = self.patch_spec(M)
        attack = self.config.attack_config()
        adapters = adapters if adapters is not None else self.registry.for_role("attack")
        params, state = optimize_patch(
            train,
            adapters,
            attack,
            patch_spec=spec,
            transform_config=self.config.transforms,
            initial=initial,
        )
        n_params = parameter_count(attack.mode, spec.M, spec.side_px)
        if attack.mode == AttackMode.GAUSSIAN:
            pixel_params = parameter_count(AttackMode.PIXEL, 0, spec.side_px)
            log_event("attack.parameter_count", gaussian=n_params, pixel=pixel_params, ratio=pixel_params / max(n_params, 1))
        return OptimizeResult(
            params=params,
            state=state,
            patch=render_params(params, spec.side_px),
            side_px=spec.side_px,
            parameter_count=n_params,
        )

    def _suite(
        self,
        test: Sequence[AnnotatedImage],
        patches: Sequence[LabeledPatch],
        adapters: Optional[List[DetectorAdapter]] = None,
        scales: Sequence[float] = (1.0,),
    ) -> List[APReport]:
        ev = self.config.evaluation
        adapters = adapters if adapters is not None else self.registry.for_role("evaluate")
        return run_condition_suite(
            test,
            adapters,
            patches,
            transform_config=self.config.transforms,
            eval_seed=ev.eval_seed,
            scales=scales,
            iou_threshold=ev.iou_threshold,
            target_class=self.config.attack.target_class,
        )

    def conditions(self, patch: Optional[Patch]) -> List[LabeledPatch]:
        ev = self.config.evaluation
        side = patch.side if patch is not None else self.config.patch.side_px
        return default_conditions(patch, side, control_seed=ev.control_seed, blank_value=ev.blank_value)

    def evaluate(
        self,
        test: Sequence[AnnotatedImage],
        patch: Optional[Patch],
        adapters: Optional[List[DetectorAdapter]] = None,
    ) -> List[APReport]:
        """Condition suite at the nominal patch size."""
        with track_operation("experiment.evaluate", images=len(test)):
            return self._suite(test, self.conditions(patch), adapters)

    def size_sweep(
        self,
        test: Sequence[AnnotatedImage],
        patch: Patch,
        adapters: Optional[List[DetectorAdapter]] = None,
    ) -> List[APReport]:
        """Every condition at every configured scale ("none" once, at scale 1)."""
        scales = self.config.evaluation.scales
        with track_operation("experiment.size_sweep", images=len(test), scales=len(scales)):
            return self._suite(test, self.conditions(patch), adapters, scales)

    def count_sweep(
        self,
        train: Sequence[AnnotatedImage],
        test: Sequence[AnnotatedImage],
        counts: Optional[Sequence[int]] = None,
    ) -> List[APReport]:
        """One optimized patch per spot count, all from the same seed; labels are ``M=<count>``."""
        counts = list(counts if counts is not None else self.config.evaluation.counts)
        patches = [LabeledPatch("none", Condition.NONE)]
        with track_operation("experiment.count_sweep", counts=counts):
            for m in counts:
                result = self.optimize(train, M=m)
                patches.append(LabeledPatch(f"M={m}", Condition.ADVERSARIAL, result.patch))
            return self._suite(test, patches)

    def transfer(self, train: Sequence[AnnotatedImage], test: Sequence[AnnotatedImage]) -> List[APReport]:
        """
        Patches trained on the single detector and on the ensemble, both
        evaluated on the held-out detectors. Labels are ``single`` and ``ensemble``.
        """
        names = self.config.transfer
        holdout = self.registry.many(names.holdout)
        with track_operation("experiment.transfer", single=names.single, ensemble=names.ensemble, holdout=names.holdout):
            single = self.optimize(train, adapters=self.registry.many([names.single]))
            ensemble = self.optimize(train, adapters=self.registry.many(names.ensemble))
            patches = [
                LabeledPatch("none", Condition.NONE),
                LabeledPatch("single", Condition.ADVERSARIAL, single.patch),
                LabeledPatch("ensemble", Condition.ADVERSARIAL, ensemble.patch),
            ]
            return self._suite(test, patches, holdout)
