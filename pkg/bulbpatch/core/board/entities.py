"""Physical board entities - lengths in centimetres"""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

DEFAULT_BOARD_CM = 35.0
DEFAULT_MIN_SPACING_CM = 1.0


class BulbPosition(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    x_cm: float
    y_cm: float


class BoardLayout(BaseModel):
    """Bulb positions on a square board; ``close_pairs`` lists (id_a, id_b, spacing_cm) below the minimum."""
    model_config = ConfigDict(frozen=True)

    board_cm: float = DEFAULT_BOARD_CM
    bulbs: List[BulbPosition] = []
    min_spacing_cm: float = DEFAULT_MIN_SPACING_CM
    close_pairs: List[Tuple[int, int, float]] = []
    warnings: List[str] = []

    @model_validator(mode="after")
    def _check(self) -> "BoardLayout":
        if not self.board_cm > 0:
            raise ValueError("board_cm must be > 0")
        ids = [b.id for b in self.bulbs]
        if len(set(ids)) != len(ids):
            raise ValueError("bulb ids must be unique")
        for b in self.bulbs:
            if not (0.0 <= b.x_cm <= self.board_cm and 0.0 <= b.y_cm <= self.board_cm):
                raise ValueError(f"bulb {b.id} at ({b.x_cm}, {b.y_cm}) lies off the {self.board_cm} cm board")
        return self
