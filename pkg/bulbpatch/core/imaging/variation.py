"""Total variation of a patch grid with zero contribution from out-of-grid neighbours."""

from typing import Union

import numpy as np

from bulbpatch.core.imaging.entities import Patch

GridLike = Union[Patch, np.ndarray]


def _grid(patch: GridLike) -> np.ndarray:
    return patch.pixels if isinstance(patch, Patch) else np.asarray(patch, dtype=np.float64)


def _differences(p: np.ndarray):
    down = np.zeros_like(p)
    right = np.zeros_like(p)
    down[:-1, :] = p[:-1, :] - p[1:, :]
    right[:, :-1] = p[:, :-1] - p[:, 1:]
    return down, right


def total_variation(patch: GridLike) -> float:
    """Sum over (i, j) of sqrt((p[i,j] - p[i+1,j])^2 + (p[i,j] - p[i,j+1])^2)."""
    down, right = _differences(_grid(patch))
    return float(np.sum(np.sqrt(down ** 2 + right ** 2)))


def total_variation_gradient(patch: GridLike, eps: float = 1e-8) -> np.ndarray:
    """Gradient of the eps-smoothed total variation with respect to every pixel."""
    down, right = _differences(_grid(patch))
    norm = np.sqrt(down ** 2 + right ** 2 + eps)
    nd = down / norm
    nr = right / norm
    grad = nd + nr
    grad[1:, :] -= nd[:-1, :]
    grad[:, 1:] -= nr[:, :-1]
    return grad
