"""Experiment configuration models (hard validation of config.json)"""

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from bulbpatch.core.attack.entities import AttackConfig, PatchSpec
from bulbpatch.core.board.entities import DEFAULT_BOARD_CM, DEFAULT_MIN_SPACING_CM
from bulbpatch.core.calibrate.entities import DEFAULT_CAMERA_SPAN
from bulbpatch.core.detect.entities import ToyTemplateConfig
from bulbpatch.core.evaluate.entities import BLANK_VALUE, DEFAULT_IOU_THRESHOLD, SIZE_SCALES
from bulbpatch.core.scenegen.entities import SceneConfig
from bulbpatch.core.transforms.entities import TransformConfig

DetectorRole = Literal["attack", "evaluate"]


class ExperimentSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = 0
    output_dir: str = "runs/latest"
    dataset_dir: str = "data/synthetic"
    workers: int = Field(default=1, ge=1)
    image_format: Literal["png", "pgm"] = "png"


class DetectorSpec(BaseModel):
    """
    One detector adapter.

    ``kind`` toy builds the in-process template detector from ``toy``;
    ``kind`` external connects over ``transport`` (subprocess command, tcp
    host/port or http url).
    """
    model_config = ConfigDict(frozen=True)

    name: str
    kind: Literal["toy", "external"] = "toy"
    roles: List[DetectorRole] = Field(default_factory=lambda: ["attack", "evaluate"])
    toy: ToyTemplateConfig = Field(default_factory=ToyTemplateConfig)
    transport: Literal["subprocess", "tcp", "http"] = "subprocess"
    command: List[str] = Field(default_factory=list)
    host: str = "127.0.0.1"
    port: int = 7733
    url: str = "http://127.0.0.1:8000"
    pool_size: int = Field(default=1, ge=1)
    threshold: float = Field(default=0.5, gt=0.0, lt=1.0)
    timeout: float = Field(default=30.0, gt=0.0)


class SceneSection(SceneConfig):
    n_train: int = Field(default=50, ge=0)
    n_test: int = Field(default=20, ge=0)

    def scene_config(self) -> SceneConfig:
        return SceneConfig(**self.model_dump(exclude={"n_train", "n_test"}))


class EvaluationSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    iou_threshold: float = Field(default=DEFAULT_IOU_THRESHOLD, gt=0.0, le=1.0)
    eval_seed: int = 1234
    control_seed: int = 7
    blank_value: float = Field(default=BLANK_VALUE, ge=0.0, le=1.0)
    split: Literal["train", "test"] = "test"
    scales: List[float] = Field(default_factory=lambda: list(SIZE_SCALES))
    counts: List[int] = Field(default_factory=lambda: [9, 15, 22, 25, 36])

    @model_validator(mode="after")
    def _check(self) -> "EvaluationSection":
        if any(not s > 0 for s in self.scales):
            raise ValueError("evaluation scales must be > 0")
        if any(c < 0 for c in self.counts):
            raise ValueError("evaluation counts must be >= 0")
        return self


class CalibrationSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    camera_span: Tuple[float, float] = DEFAULT_CAMERA_SPAN

    @model_validator(mode="after")
    def _check(self) -> "CalibrationSection":
        if not self.camera_span[1] > self.camera_span[0]:
            raise ValueError("calibration.camera_span must satisfy T_max > T_min")
        return self


class BoardSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    board_cm: float = Field(default=DEFAULT_BOARD_CM, gt=0.0)
    min_spacing_cm: float = Field(default=DEFAULT_MIN_SPACING_CM, ge=0.0)


class TransferSection(BaseModel):
    """Detector names for the single-vs-ensemble transfer protocol."""
    model_config = ConfigDict(frozen=True)

    single: str = "toy"
    ensemble: List[str] = Field(default_factory=lambda: ["toy", "toy_wide"])
    holdout: List[str] = Field(default_factory=lambda: ["toy_tight"])


class LoggingSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: str = "INFO"


class ExperimentConfig(BaseModel):
    """The whole experiment config document."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    patch: PatchSpec = Field(default_factory=PatchSpec)
    attack: AttackConfig = Field(default_factory=AttackConfig)
    transforms: TransformConfig = Field(default_factory=TransformConfig)
    detectors: List[DetectorSpec] = Field(default_factory=lambda: [DetectorSpec(name="toy")])
    scene: SceneSection = Field(default_factory=SceneSection)
    evaluation: EvaluationSection = Field(default_factory=EvaluationSection)
    calibration: CalibrationSection = Field(default_factory=CalibrationSection)
    board: BoardSection = Field(default_factory=BoardSection)
    transfer: TransferSection = Field(default_factory=TransferSection)
    logging: LoggingSection = Field(default_factory=LoggingSection)

    @model_validator(mode="after")
    def _check_detectors(self) -> "ExperimentConfig":
        names = [d.name for d in self.detectors]
        if not names:
            raise ValueError("at least one detector must be configured")
        if len(set(names)) != len(names):
            raise ValueError("detector names must be unique")
        return self

    def attack_config(self, **updates) -> AttackConfig:
        """Attack settings with the experiment seed and worker count applied."""
        fields = {"seed": self.experiment.seed, "workers": self.experiment.workers}
        fields.update(updates)
        return AttackConfig(**{**self.attack.model_dump(), **fields})

    def detector_spec(self, name: str) -> Optional[DetectorSpec]:
        return next((d for d in self.detectors if d.name == name), None)

    def detectors_for(self, role: DetectorRole) -> List[DetectorSpec]:
        return [d for d in self.detectors if role in d.roles]
