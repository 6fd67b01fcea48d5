"""PR curve figures from exported PR point tables"""

import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib as mpl

mpl.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

PLOT_STYLE = {
    "axes.labelsize": 10,
    "font.size": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}


def plot_pr_curves(
    points: pd.DataFrame,
    path: Union[str, Path],
    adapter: Optional[str] = None,
    scale: Optional[float] = 1.0,
    title: Optional[str] = None,
) -> Path:
    """
    One step curve per (label, adapter, scale) group, recall on x and precision on y.

    ``adapter``/``scale`` filter the table; None keeps every value.
    """
    df = points
    if adapter is not None:
        df = df[df["adapter"] == adapter]
    if scale is not None:
        df = df[(df["scale"] - scale).abs() < 1e-9]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with mpl.rc_context(PLOT_STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        try:
            for (label, adapter_name, group_scale), group in df.groupby(["label", "adapter", "scale"], sort=False):
                group = group.sort_values("point")
                recall = [0.0] + group["recall"].tolist()
                precision = [group["precision"].iloc[0]] + group["precision"].tolist()
                name = label if adapter is not None else f"{label} ({adapter_name})"
                if scale is None:
                    name = f"{name} x{group_scale:g}"
                ax.step(recall, precision, where="post", label=name)
            ax.set_xlim(0.0, 1.0)
            ax.set_ylim(0.0, 1.05)
            ax.set_xlabel("Recall")
            ax.set_ylabel("Precision")
            if title:
                ax.set_title(title)
            if not df.empty:
                ax.legend(loc="lower left")
            fig.savefig(path, bbox_inches="tight")
        finally:
            plt.close(fig)
    logger.info(f"Wrote PR plot to {path}")
    return path
