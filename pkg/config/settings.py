"""
환경 설정 관리 (수치 허용오차, 백엔드 선택, 출력 경로)
"""

import os
from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    MAX_SITES: int = int(os.getenv("HAMLINK_MAX_SITES", "14"))
    DENSE_MAX_SITES: int = int(os.getenv("HAMLINK_DENSE_MAX_SITES", "10"))

    KRYLOV_TOL: float = float(os.getenv("HAMLINK_KRYLOV_TOL", "1e-10"))
    KRYLOV_MAX_DIM: int = int(os.getenv("HAMLINK_KRYLOV_MAX_DIM", "60"))
    KRYLOV_MAX_SPLITS: int = int(os.getenv("HAMLINK_KRYLOV_MAX_SPLITS", "40"))

    ODD_PARITY_CONSTANT: float = float(os.getenv("HAMLINK_ODD_PARITY_CONSTANT", "1.299"))
    ZPOLY_MAX_TERMS: int = int(os.getenv("HAMLINK_ZPOLY_MAX_TERMS", "8"))
    FERROMAGNETIC_EXCHANGE: bool = os.getenv("HAMLINK_FERROMAGNETIC_EXCHANGE", "true").lower() == "true"

    HERMITIAN_TOL: float = float(os.getenv("HAMLINK_HERMITIAN_TOL", "1e-12"))
    NORM_TOL: float = float(os.getenv("HAMLINK_NORM_TOL", "1e-10"))
    CONNECTOR_RESIDUAL_TOL: float = float(os.getenv("HAMLINK_CONNECTOR_RESIDUAL_TOL", "1e-8"))
    CONNECTOR_MIN_FIDELITY: float = float(os.getenv("HAMLINK_CONNECTOR_MIN_FIDELITY", "0.999999"))

    DEFAULT_THREADS: int = int(os.getenv("HAMLINK_DEFAULT_THREADS", "1"))
    OUTPUT_DIR: str = os.getenv("HAMLINK_OUTPUT_DIR", "./output")

    USE_CACHE: bool = os.getenv("HAMLINK_USE_CACHE", "true").lower() == "true"
    CACHE_TTL: int = int(os.getenv("HAMLINK_CACHE_TTL", "3600"))

    LOG_LEVEL: str = os.getenv("HAMLINK_LOG_LEVEL", "INFO")

    model_config = SettingsConfigDict(env_file=".env", env_prefix="HAMLINK_", extra="ignore")

    def get_backend_info(self) -> dict:
        """현재 전파자 백엔드 정책"""
        return {
            "dense_max_sites": self.DENSE_MAX_SITES,
            "dense_max_dim": 2 ** self.DENSE_MAX_SITES,
            "krylov_tol": self.KRYLOV_TOL,
            "krylov_max_dim": self.KRYLOV_MAX_DIM,
        }

    def validate_settings(self) -> list:
        """설정 검증 및 경고 반환"""
        warnings = []

        if self.MAX_SITES > 16:
            warnings.append(f"MAX_SITES={self.MAX_SITES}: 2^N 상태 벡터 메모리가 매우 큽니다.")

        if self.DENSE_MAX_SITES > self.MAX_SITES:
            warnings.append("DENSE_MAX_SITES가 MAX_SITES보다 큽니다. Krylov 백엔드는 사용되지 않습니다.")

        if self.DENSE_MAX_SITES > 12:
            warnings.append("DENSE_MAX_SITES > 12: 고유값 분해 비용이 큽니다.")

        if not 1.0 <= self.ODD_PARITY_CONSTANT <= 2.0:
            warnings.append(f"ODD_PARITY_CONSTANT={self.ODD_PARITY_CONSTANT} 값이 일반적인 범위를 벗어났습니다.")

        if self.KRYLOV_MAX_DIM < 10:
            warnings.append("KRYLOV_MAX_DIM이 너무 작습니다. 시간 분할이 많아집니다.")

        if not self.FERROMAGNETIC_EXCHANGE:
            warnings.append("반강자성 교환 부호: 정합된 시뮬레이터는 -chi Sz^2 를 재현합니다.")

        return warnings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
