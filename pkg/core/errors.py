"""
hamlink 예외 계층
"""


class HamlinkError(Exception):
    """모든 hamlink 오류의 기반 클래스"""


class ParameterError(HamlinkError, ValueError):
    """물리 파라미터가 전제조건을 만족하지 않음"""


class SiteIndexError(HamlinkError, IndexError):
    """사이트 인덱스가 1..N 범위를 벗어남"""


class DimensionError(HamlinkError, ValueError):
    """연산자/상태의 Hilbert 공간 차원이 맞지 않음"""


class ContractError(HamlinkError):
    """함수 계약(에르미트성, 고유상태 조건 등) 위반"""


class NumericError(HamlinkError, ArithmeticError):
    """수치 계산 실패 (수렴 실패, 노름 손실, 근 없음)"""


class ConfigError(HamlinkError):
    """실험 설정 파일 또는 CLI 인자 오류"""
