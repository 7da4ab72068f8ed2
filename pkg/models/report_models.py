"""
시뮬레이션 결과 레코드
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ContractError, DimensionError, ParameterError

FIDELITY_SLACK = 1e-10


def _as_float_array(values: Sequence[float]) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Trajectory:
    """시간 격자, 시간별 관측값 레코드, 표시된 시간의 상태 스냅샷"""
    times: np.ndarray
    records: List[Dict[str, float]]
    snapshots: Dict[int, Any] = field(default_factory=dict)

    def __post_init__(self):
        times = _as_float_array(self.times)
        object.__setattr__(self, "times", times)
        if np.any(np.diff(times) <= 0):
            raise ParameterError("시간 격자는 순증가해야 합니다")
        if len(self.records) != len(times):
            raise DimensionError(f"레코드 수 {len(self.records)} != 시간 수 {len(times)}")
        if self.records:
            labels = set(self.records[0])
            for record in self.records[1:]:
                if set(record) != labels:
                    raise ContractError("모든 레코드는 같은 관측량 레이블을 가져야 합니다")

    @property
    def labels(self) -> List[str]:
        return list(self.records[0]) if self.records else []

    def series(self, label: str) -> np.ndarray:
        if label not in self.labels:
            raise ContractError(f"궤적에 '{label}' 레이블이 없습니다 (있는 레이블: {self.labels})")
        return np.array([record[label] for record in self.records])


@dataclass(frozen=True)
class ConnectorReport:
    times: np.ndarray
    xi_real: np.ndarray
    xi_imag: np.ndarray
    overlap_abs: np.ndarray
    residual0: float
    saturated: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("times", "xi_real", "xi_imag", "overlap_abs"):
            object.__setattr__(self, name, _as_float_array(getattr(self, name)))
        n = len(self.times)
        if not (len(self.xi_real) == len(self.xi_imag) == len(self.overlap_abs) == n):
            raise DimensionError("ConnectorReport 열 길이가 일치하지 않습니다")
        if np.any(self.overlap_abs > 1.0 + FIDELITY_SLACK):
            raise ContractError(f"|overlap| > 1: {self.overlap_abs.max():.15f}")
        saturated = np.zeros(n, dtype=bool) if self.saturated is None else np.asarray(self.saturated, dtype=bool)
        object.__setattr__(self, "saturated", saturated)

    @property
    def max_xi_imag(self) -> float:
        return float(self.xi_imag.max()) if len(self.xi_imag) else 0.0

    def rows(self) -> Iterator[Tuple[float, float, float, float]]:
        yield from zip(self.times, self.xi_real, self.xi_imag, self.overlap_abs)


@dataclass(frozen=True)
class ReconstructionRecord:
    times: np.ndarray
    sx_qs: np.ndarray
    sy_qs: np.ndarray
    sx_target_reconstructed: np.ndarray
    sx_target_direct: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("times", "sx_qs", "sy_qs", "sx_target_reconstructed"):
            object.__setattr__(self, name, _as_float_array(getattr(self, name)))
        if self.sx_target_direct is not None:
            direct = _as_float_array(self.sx_target_direct)
            if len(direct) != len(self.times):
                raise DimensionError("직접 계산 열의 길이가 시간 격자와 다릅니다")
            object.__setattr__(self, "sx_target_direct", direct)
        if np.any(self.sx_target_reconstructed < 0):
            raise ContractError("재구성 값은 음수가 될 수 없습니다")

    def with_direct(self, sx_direct: Sequence[float]) -> "ReconstructionRecord":
        return ReconstructionRecord(self.times, self.sx_qs, self.sy_qs,
                                    self.sx_target_reconstructed, sx_direct)

    def max_deviation(self) -> float:
        if self.sx_target_direct is None:
            raise ContractError("직접 계산 열이 채워지지 않았습니다")
        return float(np.max(np.abs(self.sx_target_reconstructed - self.sx_target_direct)))


@dataclass(frozen=True)
class KickRecord:
    index: int
    duration: float
    residual: float
    commutator_norm: float
    running_fidelity: float
    parameter: Optional[float] = None


@dataclass
class KickReport:
    records: List[KickRecord] = field(default_factory=list)

    def append(self, record: KickRecord) -> None:
        if not -FIDELITY_SLACK <= record.running_fidelity <= 1.0 + FIDELITY_SLACK:
            raise ContractError(f"fidelity 범위 밖: {record.running_fidelity}")
        self.records.append(record)

    @property
    def step_count(self) -> int:
        return len(self.records)

    @property
    def final_fidelity(self) -> float:
        if not self.records:
            return 1.0
        return self.records[-1].running_fidelity

    @property
    def total_duration(self) -> float:
        return float(sum(r.duration for r in self.records))


@dataclass(frozen=True)
class HeatmapGrid:
    """x: chi*t, y: beta/alpha, z[y_index, x_index]: fidelity"""
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    label: str = ""

    def __post_init__(self):
        x = _as_float_array(self.x)
        y = _as_float_array(self.y)
        z = np.array(self.z, dtype=float)
        if z.shape != (len(y), len(x)):
            raise DimensionError(f"z 모양 {z.shape} != ({len(y)}, {len(x)})")
        if z.size and (z.min() < -FIDELITY_SLACK or z.max() > 1.0 + FIDELITY_SLACK):
            raise ContractError("heatmap 값은 [0, 1] 범위여야 합니다")
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def long_rows(self) -> Iterator[Tuple[float, float, float]]:
        """(chi_t, ratio, fidelity) 를 ratio 우선 순서로"""
        for j, ratio in enumerate(self.y):
            for i, chi_t in enumerate(self.x):
                yield chi_t, ratio, self.z[j, i]

    def mean(self) -> float:
        return float(self.z.mean())

    def value_at(self, chi_t: float, ratio: float) -> float:
        i = int(np.argmin(np.abs(self.x - chi_t)))
        j = int(np.argmin(np.abs(self.y - ratio)))
        return float(self.z[j, i])


@dataclass(frozen=True)
class MatchResult:
    spec: Any
    parameter: str
    value: float
    objective: str
    objective_value: float
    evaluations: int
