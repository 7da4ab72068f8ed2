"""
해밀토니안 빌더와 시뮬레이터-타겟 파라미터 정합 조건

- 타겟: one-axis twisting chi S_z^2
- 시뮬레이터: 최근접 Heisenberg XXX + 교대 자기장 (열린 경계, 사이트 1이 -alpha/2)
- 교환 항 부호는 SpinChainParams.ferromagnetic 으로 결정 (기본 강자성, -beta/4)
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from config.settings import get_settings
from core.errors import NumericError, ParameterError
from core.spin_algebra import (
    HilbertSpace,
    Operator,
    collective_spin,
    magnetization_values,
    op_combine,
    op_product,
    pauli_site,
)
from models.spin_models import HamiltonianKind, HamiltonianSpec, SpinChainParams

logger = logging.getLogger(__name__)


def _diagonal(space: HilbertSpace, values: np.ndarray) -> Operator:
    matrix = sp.diags(np.asarray(values, dtype=complex), format="csr")
    matrix.eliminate_zeros()
    return Operator(space, matrix, hermitian=True)


def _require_chain(params: SpinChainParams) -> HilbertSpace:
    if params.n_sites < 2:
        raise ParameterError(f"체인 해밀토니안은 N >= 2가 필요합니다 (N={params.n_sites})")
    return HilbertSpace(params.n_sites)


def chain_bonds(n_sites: int, periodic: bool = False) -> List[Tuple[int, int]]:
    """최근접 결합 (i, i+1) 목록. 주기 경계는 N > 2에서만 (N, 1) 결합을 추가한다."""
    bonds = [(i, i + 1) for i in range(1, n_sites)]
    if periodic and n_sites > 2:
        bonds.append((n_sites, 1))
    return bonds


def _bond_terms(space: HilbertSpace, bonds: Sequence[Tuple[int, int]], axes: str,
                coefficient: float) -> List[Tuple[float, Operator]]:
    terms = []
    for i, j in bonds:
        for axis in axes:
            bond = op_product(pauli_site(axis, i, space), pauli_site(axis, j, space), hermitian=True)
            terms.append((coefficient, bond))
    return terms


def exchange_sign(params: SpinChainParams) -> float:
    return -1.0 if params.ferromagnetic else 1.0


def staggered_signs(n_sites: int) -> np.ndarray:
    """(-1)^i, i = 1..N"""
    return np.array([(-1) ** i for i in range(1, n_sites + 1)], dtype=float)


def staggered_field(space: HilbertSpace, alpha: float) -> Operator:
    """alpha/2 sum_i (-1)^i sigma^z_i (대각)"""
    n = space.n_sites
    indices = np.arange(space.dim)
    # 사이트 i의 비트 위치는 N - i
    bits = (indices[:, None] >> (n - np.arange(1, n + 1))) & 1
    sigma_z = 1.0 - 2.0 * bits
    values = 0.5 * alpha * (sigma_z @ staggered_signs(n))
    return _diagonal(space, values)


def build_oat(params: SpinChainParams) -> Operator:
    """chi S_z^2"""
    space = HilbertSpace(params.n_sites)
    return _diagonal(space, params.chi * magnetization_values(space) ** 2)


def build_xx(params: SpinChainParams) -> Operator:
    """beta/4 sum_i (sigma^x_i sigma^x_{i+1} + sigma^y_i sigma^y_{i+1})"""
    space = _require_chain(params)
    bonds = chain_bonds(params.n_sites, params.periodic)
    return op_combine(_bond_terms(space, bonds, "xy", params.beta / 4.0))


def _exchange_terms(params: SpinChainParams, space: HilbertSpace) -> List[Tuple[float, Operator]]:
    bonds = chain_bonds(params.n_sites, params.periodic)
    return _bond_terms(space, bonds, "xyz", exchange_sign(params) * params.beta / 4.0)


def build_xxx(params: SpinChainParams) -> Operator:
    """등방 Heisenberg 교환 항만 (자기장 없음)"""
    space = _require_chain(params)
    return op_combine(_exchange_terms(params, space))


def build_xxx_staggered(params: SpinChainParams) -> Operator:
    """∓beta/4 sum_i sigma_i·sigma_{i+1} + alpha/2 sum_i (-1)^i sigma^z_i"""
    space = _require_chain(params)
    terms = _exchange_terms(params, space)
    terms.append((1.0, staggered_field(space, params.alpha)))
    return op_combine(terms)


def build_xxx_field(params: SpinChainParams, field: float) -> Operator:
    """XXX 교환 항 + field * S_z"""
    space = _require_chain(params)
    terms = _exchange_terms(params, space)
    terms.append((field, collective_spin("z", space)))
    return op_combine(terms)


def build_lmg(space: HilbertSpace, omega: float) -> Operator:
    """S_x^2 + S_y^2 + Omega S_z"""
    sx = collective_spin("x", space)
    sy = collective_spin("y", space)
    return op_combine([
        (1.0, op_product(sx, sx, hermitian=True)),
        (1.0, op_product(sy, sy, hermitian=True)),
        (omega, collective_spin("z", space)),
    ])


def build_zpoly(space: HilbertSpace, gammas: Sequence[float]) -> Operator:
    """sum_{n>=1} gamma_n S_z^n"""
    max_terms = get_settings().ZPOLY_MAX_TERMS
    if len(gammas) > max_terms:
        raise ParameterError(f"Z_POLY 계수 {len(gammas)}개가 최대 {max_terms}개를 초과합니다")
    if not all(math.isfinite(g) for g in gammas):
        raise ParameterError("Z_POLY 계수는 유한해야 합니다")

    m = magnetization_values(space)
    values = np.zeros(space.dim)
    for power, gamma in enumerate(gammas, start=1):
        values = values + gamma * m ** power
    return _diagonal(space, values)


def build_tact(space: HilbertSpace, chi: float, alpha: float, beta: float, gamma: float) -> Operator:
    """chi(S_x S_y + S_y S_x) + alpha S_x + beta S_y + gamma S_z"""
    sx, sy, sz = (collective_spin(axis, space) for axis in "xyz")
    anticommutator = op_combine([(1.0, op_product(sx, sy)), (1.0, op_product(sy, sx))])
    twisting = Operator(space, anticommutator.matrix, hermitian=True)
    return op_combine([(chi, twisting), (alpha, sx), (beta, sy), (gamma, sz)])


def build_hamiltonian(spec: HamiltonianSpec) -> Operator:
    """HamiltonianSpec 디스패처"""
    params = spec.params
    kind = spec.kind

    if kind == HamiltonianKind.OAT:
        return build_oat(params)
    if kind == HamiltonianKind.XX:
        return build_xx(params)
    if kind == HamiltonianKind.XXX_STAGGERED:
        return build_xxx_staggered(params)
    if kind == HamiltonianKind.XXX_FIELD:
        return build_xxx_field(params, spec.field)

    space = HilbertSpace(params.n_sites)
    if kind == HamiltonianKind.LMG:
        return build_lmg(space, spec.lmg_omega)
    if kind == HamiltonianKind.Z_POLY:
        return build_zpoly(space, spec.gammas)
    if kind == HamiltonianKind.TACT:
        t = spec.tact
        return build_tact(space, t.chi, t.alpha, t.beta, t.gamma)

    raise ParameterError(f"지원하지 않는 해밀토니안 종류: {kind}")


# ---------------------------------------------------------------------------
# 정합 조건
# ---------------------------------------------------------------------------

def second_order_parity_constant(n_sites: int) -> float:
    """2차 섭동에서 유효 twisting 세기가 chi가 되게 하는 상수 (짝수 N은 1)"""
    if n_sites % 2 == 0:
        return 1.0
    n2 = float(n_sites) ** 2
    return math.sqrt(3.0 * n2 / (2.0 * (n2 - 1.0)))


def parity_constant(n_sites: int, odd_constant: Optional[float] = None) -> float:
    if n_sites % 2 == 0:
        return 1.0
    if odd_constant is None:
        return get_settings().ODD_PARITY_CONSTANT
    if not odd_constant > 0:
        raise ParameterError(f"odd_constant는 양수여야 합니다: {odd_constant}")
    return float(odd_constant)


def _check_matching_inputs(n_sites: int, chi: float) -> None:
    if isinstance(n_sites, bool) or not isinstance(n_sites, (int, np.integer)) or n_sites < 2:
        raise ParameterError(f"정합 조건은 정수 N >= 2가 필요합니다: {n_sites!r}")
    if not (math.isfinite(chi) and chi > 0):
        raise ParameterError(f"chi는 양수여야 합니다: {chi}")


def alpha_matched(n_sites: int, chi: float, beta: float, odd_constant: Optional[float] = None) -> float:
    """c * sqrt(N-1) * sqrt(chi^2 + chi*beta), c는 N의 홀짝에 따른 상수"""
    _check_matching_inputs(n_sites, chi)
    if not (math.isfinite(beta) and beta >= 0):
        raise ParameterError(f"beta는 0 이상이어야 합니다: {beta}")
    c = parity_constant(n_sites, odd_constant)
    return c * math.sqrt(n_sites - 1) * math.sqrt(chi * chi + chi * beta)


def solve_params(n_sites: int, chi: float, ratio: float,
                 odd_constant: Optional[float] = None) -> Tuple[float, float]:
    """beta/alpha = ratio 와 정합 조건을 동시에 만족하는 (alpha, beta)

    alpha^2 - C*ratio*chi*alpha - C*chi^2 = 0, C = c^2 (N-1) 의 양의 근.
    """
    _check_matching_inputs(n_sites, chi)
    if not (math.isfinite(ratio) and ratio > 0):
        raise ParameterError(f"ratio는 양수여야 합니다: {ratio}")

    c = parity_constant(n_sites, odd_constant)
    big_c = c * c * (n_sites - 1)
    b = big_c * ratio * chi
    k = big_c * chi * chi
    alpha = 0.5 * (b + math.sqrt(b * b + 4.0 * k))
    if not (math.isfinite(alpha) and alpha > 0):
        raise NumericError(f"양의 근이 없습니다 (N={n_sites}, chi={chi}, ratio={ratio})")

    beta = ratio * alpha
    check = alpha_matched(n_sites, chi, beta, odd_constant=c if n_sites % 2 else None)
    if abs(check - alpha) > 1e-10 * alpha:
        raise NumericError(f"정합 조건 재대입 불일치: {check!r} vs {alpha!r}")
    return alpha, beta


def matched_params(n_sites: int, chi: float, ratio: float, odd_constant: Optional[float] = None,
                   ferromagnetic: Optional[bool] = None) -> SpinChainParams:
    alpha, beta = solve_params(n_sites, chi, ratio, odd_constant)
    fields = {"n_sites": n_sites, "chi": chi, "alpha": alpha, "beta": beta}
    if ferromagnetic is not None:
        fields["ferromagnetic"] = ferromagnetic
    return SpinChainParams(**fields)


def frame_frequency(params: SpinChainParams) -> float:
    """alpha * sum_i (-1)^i / N : 홀수 N은 -alpha/N, 짝수 N은 0"""
    if params.omega is not None:
        return params.omega
    return params.alpha * float(staggered_signs(params.n_sites).sum()) / params.n_sites


def effective_twisting_rate(params: SpinChainParams) -> float:
    """정합 조건을 chi에 대해 역으로 푼 2차 추정치"""
    if params.n_sites < 2:
        raise ParameterError("유효 twisting 세기는 N >= 2에서만 정의됩니다")
    c = second_order_parity_constant(params.n_sites)
    a2 = params.alpha ** 2 / (c * c * (params.n_sites - 1))
    beta = params.beta
    root = math.sqrt(beta * beta + 4.0 * a2)
    if beta + root == 0.0:
        return 0.0
    return 2.0 * a2 / (beta + root)
