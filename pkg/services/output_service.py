"""
CSV 출력과 SVG 렌더링

그림은 CSV 파일만으로 다시 그릴 수 있다.
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from templates.plot_style import CURVE_COLORS, SVG_METADATA, apply_style, fidelity_colormap

import matplotlib.pyplot as plt

logger = logging.getLogger(__name__)

COMMENT_PREFIX = "# config: "


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


class OutputService:
    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)

    def prepare(self) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def write_csv(self, name: str, config_line: str, header: Sequence[str],
                  rows: Iterable[Sequence]) -> Path:
        """첫 줄은 설정 주석, 둘째 줄은 헤더"""
        self.prepare()
        path = self.path(name)
        with path.open("w", newline="", encoding="utf-8") as handle:
            handle.write(COMMENT_PREFIX + config_line + "\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])
        logger.info(f"CSV 작성: {path}")
        return path

    # -------------------------------------------------------------------
    # 렌더링
    # -------------------------------------------------------------------

    def render_curves(self, csv_name: str, svg_name: str, x_column: str = "t",
                      x_label: str = r"$\chi t$", y_label: str = r"$\langle S_x \rangle$") -> Path:
        _, header, rows = read_csv(self.path(csv_name))
        data = _columns(header, rows)

        apply_style()
        fig, ax = plt.subplots()
        try:
            for column in header:
                if column == x_column:
                    continue
                ax.plot(data[x_column], data[column], label=column,
                        color=CURVE_COLORS.get(column), linestyle="--" if column == "sx_direct" else "-")
            ax.set_xlabel(x_label)
            ax.set_ylabel(y_label)
            ax.legend(loc="best")
            path = self.path(svg_name)
            fig.savefig(path, format="svg", metadata=SVG_METADATA)
        finally:
            plt.close(fig)
        logger.info(f"그림 작성: {path}")
        return path

    def render_heatmap(self, csv_name: str, svg_name: str, title: str = "") -> Path:
        """long format (chi_t, ratio, fidelity) CSV 로부터 heatmap"""
        _, header, rows = read_csv(self.path(csv_name))
        x, y, z = heatmap_from_rows(header, rows)

        apply_style()
        fig, ax = plt.subplots()
        try:
            mesh = ax.pcolormesh(x, y, z, cmap=fidelity_colormap(), vmin=0.0, vmax=1.0,
                                 shading="nearest", rasterized=False)
            if len(y) > 1 and y.min() > 0 and y.max() / y.min() >= 10.0:
                ax.set_yscale("log")
            ax.set_xlabel(r"$\chi t$")
            ax.set_ylabel(r"$\beta / \alpha$")
            if title:
                ax.set_title(title)
            fig.colorbar(mesh, ax=ax, label="fidelity")
            path = self.path(svg_name)
            fig.savefig(path, format="svg", metadata=SVG_METADATA)
        finally:
            plt.close(fig)
        logger.info(f"그림 작성: {path}")
        return path


def read_csv(path: Path) -> Tuple[str, List[str], List[List[float]]]:
    """(설정 주석, 헤더, 숫자 행)"""
    with Path(path).open(encoding="utf-8") as handle:
        comment = handle.readline().rstrip("\n")
        reader = csv.reader(handle)
        header = next(reader)
        rows = [[_parse_cell(cell) for cell in row] for row in reader if row]
    if comment.startswith(COMMENT_PREFIX):
        comment = comment[len(COMMENT_PREFIX):]
    return comment, header, rows


def _parse_cell(cell: str) -> float:
    if cell == "true":
        return 1.0
    if cell == "false":
        return 0.0
    return float(cell)


def _columns(header: Sequence[str], rows: Sequence[Sequence[float]]) -> Dict[str, np.ndarray]:
    table = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: table[:, i] for i, name in enumerate(header)}


def heatmap_from_rows(header: Sequence[str], rows: Sequence[Sequence[float]]):
    data = _columns(header, rows)
    x = np.array(list(dict.fromkeys(data["chi_t"])))
    y = np.array(list(dict.fromkeys(data["ratio"])))
    z = data["fidelity"].reshape(len(y), len(x))
    return x, y, z
