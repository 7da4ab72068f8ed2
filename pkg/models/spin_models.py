"""
스핀 체인 파라미터 및 해밀토니안 명세 모델
"""

import math
from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import get_settings
from core.errors import ParameterError


def _default_ferromagnetic() -> bool:
    return get_settings().FERROMAGNETIC_EXCHANGE


class SpinChainParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_sites: int = Field(..., ge=1, description="스핀 개수 N")
    chi: float = Field(1.0, description="one-axis twisting 세기")
    beta: float = Field(0.0, ge=0.0, description="교환 세기")
    alpha: float = Field(0.0, ge=0.0, description="교대 자기장 진폭")
    omega: Optional[float] = Field(None, description="회전 좌표계 주파수 (없으면 교대 자기장에서 계산)")
    ferromagnetic: bool = Field(default_factory=_default_ferromagnetic, description="교환 부호 -beta/4")
    periodic: bool = Field(False, description="주기 경계 조건")

    @field_validator("chi", "beta", "alpha")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"유한한 값이어야 합니다: {value}")
        return value

    @field_validator("n_sites")
    @classmethod
    def _within_max_sites(cls, value: int) -> int:
        max_sites = get_settings().MAX_SITES
        if value > max_sites:
            raise ValueError(f"n_sites={value}가 MAX_SITES={max_sites}를 초과합니다")
        return value


class HamiltonianKind(str, Enum):
    OAT = "oat"
    XX = "xx"
    XXX_STAGGERED = "xxx_staggered"
    XXX_FIELD = "xxx_field"
    LMG = "lmg"
    Z_POLY = "z_poly"
    TACT = "tact"


class TactCoefficients(BaseModel):
    """chi(SxSy+SySx) + alpha Sx + beta Sy + gamma Sz 계수"""
    model_config = ConfigDict(frozen=True)

    chi: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0


class HamiltonianSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: HamiltonianKind
    params: SpinChainParams
    lmg_omega: float = Field(0.0, description="LMG 모델의 Omega")
    gammas: Tuple[float, ...] = Field((), description="Z_POLY 계수 gamma_1, gamma_2, ...")
    tact: TactCoefficients = Field(default_factory=TactCoefficients)
    field: float = Field(0.0, description="XXX_FIELD 균일 z 자기장")

    @field_validator("gammas")
    @classmethod
    def _check_gammas(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        max_terms = get_settings().ZPOLY_MAX_TERMS
        if len(value) > max_terms:
            raise ValueError(f"Z_POLY 계수가 {len(value)}개로 최대 {max_terms}개를 초과합니다")
        if not all(math.isfinite(g) for g in value):
            raise ValueError("Z_POLY 계수는 유한해야 합니다")
        return value

    @model_validator(mode="after")
    def _check_chain_length(self) -> "HamiltonianSpec":
        chain_kinds = {HamiltonianKind.XX, HamiltonianKind.XXX_STAGGERED, HamiltonianKind.XXX_FIELD}
        if self.kind in chain_kinds and self.params.n_sites < 2:
            raise ValueError(f"{self.kind.value} 체인은 N >= 2가 필요합니다")
        return self

    def get_parameter(self, name: str) -> float:
        if name in SpinChainParams.model_fields:
            return getattr(self.params, name)
        if name in HamiltonianSpec.model_fields:
            return getattr(self, name)
        raise ParameterError(f"알 수 없는 파라미터: {name}")

    def with_parameter(self, name: str, value: float) -> "HamiltonianSpec":
        """스칼라 파라미터 하나만 바꾼 새 명세"""
        if name in ("lmg_omega", "field"):
            return self.model_copy(update={name: value})
        if name in ("chi", "beta", "alpha", "omega"):
            params = SpinChainParams(**{**self.params.model_dump(), name: value})
            return self.model_copy(update={"params": params})
        raise ParameterError(f"조정할 수 없는 파라미터: {name}")
