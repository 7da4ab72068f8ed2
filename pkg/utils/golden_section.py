"""
구간 [a, b] 위의 단봉 함수 최소화 (golden-section search)
"""

import math
from dataclasses import dataclass
from typing import Callable, List

from core.errors import NumericError, ParameterError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class GoldenSectionResult:
    argmin: float
    minimum: float
    evaluations: int
    flat: bool


def golden_section_minimize(func: Callable[[float], float], lower: float, upper: float,
                            xtol: float = 1e-10, max_iterations: int = 200) -> GoldenSectionResult:
    """[lower, upper] 안의 최소점. 목적함수가 평평하면 구간 중점을 돌려준다.

    xtol 은 구간 폭에 대한 상대 허용오차.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)) or not lower < upper:
        raise ParameterError(f"잘못된 탐색 구간: [{lower}, {upper}]")

    values: List[float] = []

    def evaluate(x: float) -> float:
        value = float(func(x))
        if not math.isfinite(value):
            raise NumericError(f"목적함수 값이 유한하지 않습니다: f({x}) = {value}")
        values.append(value)
        return value

    a, b = lower, upper
    width = b - a
    c = a + INV_PHI_SQUARE * width
    d = a + INV_PHI * width
    fc = evaluate(c)
    fd = evaluate(d)

    target = xtol * (upper - lower)
    iterations = 0
    while b - a > target and iterations < max_iterations:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI_SQUARE * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = evaluate(d)
        iterations += 1

    f_lower = evaluate(lower)
    f_upper = evaluate(upper)

    spread = max(values) - min(values)
    if spread <= 1e-15 * (1.0 + abs(min(values))):
        midpoint = 0.5 * (lower + upper)
        return GoldenSectionResult(midpoint, float(func(midpoint)), len(values) + 1, True)

    if fc <= fd:
        x_best, f_best = c, fc
    else:
        x_best, f_best = d, fd
    # 최소점이 구간 끝에 있는 경우
    if f_lower < f_best:
        x_best, f_best = lower, f_lower
    if f_upper < f_best:
        x_best, f_best = upper, f_upper

    return GoldenSectionResult(x_best, f_best, len(values), False)
