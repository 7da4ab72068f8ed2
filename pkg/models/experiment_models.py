"""
실험 설정 및 HTTP 요청/응답 모델
"""

import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from config.settings import get_settings


class ExperimentKind(str, Enum):
    FIG2 = "fig2"
    FIG3 = "fig3"
    GHZ = "ghz"
    KICKS = "kicks"
    SWEEP = "sweep"


class Frame(str, Enum):
    LAB = "lab"
    ROTATING = "rotating"


class ParityConstantMode(str, Enum):
    FIXED = "fixed"
    SECOND_ORDER = "second_order"


class RatioSpacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class SweepAxis(str, Enum):
    RATIO = "ratio"
    N_SITES = "n_sites"
    CHI = "chi"
    TIME_MAX = "time_max"


class KickMatcherMode(str, Enum):
    NONE = "none"
    RESIDUAL = "residual"
    OVERLAP = "overlap"


class KickInitialState(str, Enum):
    COHERENT_X = "coherent_x"
    CONNECTOR_EIGENSTATE = "connector_eigenstate"


# 실행 환경에만 관련된 필드: CSV 주석 줄에서 제외
EXECUTION_FIELDS = ("output_dir", "threads")

_LIST_FIELDS = ("sites_list", "sweep_values")


def _default_output_dir() -> str:
    return get_settings().OUTPUT_DIR


def _default_threads() -> int:
    return get_settings().DEFAULT_THREADS


class ExperimentConfig(BaseModel):
    experiment: ExperimentKind = Field(ExperimentKind.FIG2, description="실험 종류")

    n_sites: int = Field(5, ge=2, description="스핀 개수 N")
    sites_list: Optional[List[int]] = Field(None, description="여러 N을 도는 실험의 N 목록")
    chi: float = Field(1.0, gt=0.0, description="OAT 세기")
    ratio: float = Field(40.0, gt=0.0, description="beta/alpha")
    alpha: Optional[float] = Field(None, ge=0.0, description="명시적 alpha (beta와 함께)")
    beta: Optional[float] = Field(None, ge=0.0, description="명시적 beta (alpha와 함께)")
    parity_constant: Optional[ParityConstantMode] = Field(
        None, description="홀수 N 상수: fixed(설정값) 또는 second_order (없으면 실험별 기본값)"
    )
    ferromagnetic: Optional[bool] = Field(None, description="교환 부호 (없으면 설정값)")

    time_max: float = Field(math.pi, gt=0.0, description="chi*t 최댓값")
    time_samples: int = Field(200, ge=2, description="시간 표본 수")

    ratio_min: float = Field(2.0, gt=0.0)
    ratio_max: float = Field(80.0, gt=0.0)
    ratio_samples: int = Field(24, ge=2)
    ratio_spacing: RatioSpacing = RatioSpacing.LOG
    frame: Frame = Frame.LAB

    ghz_time: float = Field(math.pi / 2, gt=0.0, description="GHZ 확인 시각 chi*t")

    n_kicks: int = Field(8, ge=1)
    kick_matcher: KickMatcherMode = KickMatcherMode.NONE
    kick_state: KickInitialState = KickInitialState.CONNECTOR_EIGENSTATE
    alpha_scale: float = Field(1.0, gt=0.0, description="kick 해밀토니안 alpha 배율")
    search_low: float = Field(0.5, gt=0.0, description="matcher 탐색 구간 하한 (alpha 배율)")
    search_high: float = Field(1.5, gt=0.0, description="matcher 탐색 구간 상한 (alpha 배율)")

    sweep_axis: SweepAxis = SweepAxis.RATIO
    sweep_values: Optional[List[float]] = None

    backend: Optional[str] = Field(None, description="dense_eig 또는 krylov (없으면 자동)")
    seed: int = 0
    output_dir: str = Field(default_factory=_default_output_dir)
    threads: int = Field(default_factory=_default_threads, ge=1)

    @field_validator(*_LIST_FIELDS, mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            items = [item.strip() for item in value.split(",") if item.strip()]
            return items or None
        if isinstance(value, (int, float)):
            return [value]
        return value

    @field_validator("n_sites")
    @classmethod
    def _within_max_sites(cls, value: int) -> int:
        max_sites = get_settings().MAX_SITES
        if value > max_sites:
            raise ValueError(f"n_sites={value}가 MAX_SITES={max_sites}를 초과합니다")
        return value

    @field_validator("sites_list")
    @classmethod
    def _check_sites(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is None:
            return value
        max_sites = get_settings().MAX_SITES
        for n in value:
            if not 2 <= n <= max_sites:
                raise ValueError(f"sites_list 의 N={n}은 2..{max_sites} 범위여야 합니다")
        return value

    @field_validator("backend")
    @classmethod
    def _check_backend(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in ("dense_eig", "krylov"):
            raise ValueError(f"알 수 없는 backend: {value}")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if (self.alpha is None) != (self.beta is None):
            raise ValueError("alpha 와 beta 는 함께 지정해야 합니다")
        if not self.ratio_min < self.ratio_max:
            raise ValueError(f"ratio_min({self.ratio_min}) < ratio_max({self.ratio_max}) 이어야 합니다")
        if not self.search_low < self.search_high:
            raise ValueError("search_low < search_high 이어야 합니다")
        if self.sweep_values is not None:
            if len(self.sweep_values) < 1:
                raise ValueError("sweep_values 가 비어 있습니다")
            if self.sweep_axis == SweepAxis.N_SITES and any(v != int(v) or v < 2 for v in self.sweep_values):
                raise ValueError("n_sites 축의 값은 2 이상의 정수여야 합니다")
            if any(not v > 0 for v in self.sweep_values):
                raise ValueError("sweep_values 는 양수여야 합니다")
        return self

    def resolved_items(self) -> Dict[str, str]:
        """재현에 필요한 설정 (실행 환경 필드 제외)"""
        items = {}
        for name, value in self.model_dump(mode="json", exclude=set(EXECUTION_FIELDS)).items():
            if isinstance(value, list):
                value = ",".join(_format_value(v) for v in value)
            items[name] = _format_value(value)
        return items

    def resolved_line(self) -> str:
        return "; ".join(f"{key}={value}" for key, value in self.resolved_items().items())


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ExperimentResponse(BaseModel):
    experiment: ExperimentKind
    files: List[str]
    metrics: Dict[str, float]
    elapsed_seconds: float
    cached: bool = False
