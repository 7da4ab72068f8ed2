"""
그림 스타일과 16단계 색상 램프
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib as mpl
from matplotlib.colors import ListedColormap

# viridis 계열 16단계
FIDELITY_RAMP = [
    "#440154", "#481a6c", "#472f7d", "#414487",
    "#39568c", "#31688e", "#2a788e", "#23888e",
    "#1f988b", "#22a884", "#35b779", "#54c568",
    "#7ad151", "#a5db36", "#d2e21b", "#fde725",
]

CURVE_COLORS = {
    "sx_qs": "#31688e",
    "sy_qs": "#35b779",
    "sx_reconstructed": "#440154",
    "sx_direct": "#fde725",
}

STYLE = {
    "figure.figsize": (6, 4),
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": False,
    "lines.linewidth": 1.5,
    "svg.fonttype": "none",
    "svg.hashsalt": "hamlink",
    "path.simplify": False,
}

# SVG 파일에 날짜를 남기지 않는다
SVG_METADATA = {"Date": None, "Creator": None}


def fidelity_colormap() -> ListedColormap:
    return ListedColormap(FIDELITY_RAMP, name="hamlink_fidelity")


def apply_style() -> None:
    mpl.rcParams.update(STYLE)
