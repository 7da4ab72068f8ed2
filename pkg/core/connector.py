"""
커넥터 연산자 h(t): e^{ih} = e^{itH_qs} e^{-itH_t}

xi(t) 진단으로 시뮬레이션 타당성을 판단한다. Im xi = -ln|<psi|e^{itH_qs}e^{-itH_t}|psi>|.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from config.settings import get_settings
from core.errors import ContractError, DimensionError, ParameterError
from core.spin_algebra import Operator, StateVector, hermitian_deviation, max_abs, op_combine, op_product
from models.report_models import ConnectorReport
from providers.propagator import PropagatorBackend, PropagatorFactory

logger = logging.getLogger(__name__)

OVERLAP_FLOOR = 1e-300
_PHASE_WARN = 0.9 * math.pi
_ZERO_COMMUTATOR_EPS = 64 * np.finfo(float).eps


def _check_same_space(a: Operator, b: Operator) -> None:
    if a.space != b.space:
        raise DimensionError(f"공간 불일치: N={a.space.n_sites} vs N={b.space.n_sites}")


def commutator(a: Operator, b: Operator) -> Operator:
    """[A, B] = AB - BA"""
    _check_same_space(a, b)
    return op_combine([(1.0, op_product(a, b)), (-1.0, op_product(b, a))])


def _zero_if_negligible(op: Operator, scale: float) -> Operator:
    if op.max_abs() <= _ZERO_COMMUTATOR_EPS * scale:
        zero = sp.csr_matrix(op.matrix.shape, dtype=complex)
        return Operator(op.space, zero)
    return op


def _hermitian_term(op: Operator, coefficient: complex, scale: float, order: int) -> Operator:
    """coefficient * op 이 에르미트인지 확인하고 정확히 대칭화한다"""
    matrix = complex(coefficient) * op.matrix
    deviation = hermitian_deviation(matrix)
    tol = get_settings().HERMITIAN_TOL * max(max_abs(matrix), abs(coefficient) * scale)
    if deviation > tol:
        raise ContractError(f"BCH {order}차 항이 에르미트가 아닙니다: max|A - A^†| = {deviation:.3e}")
    symmetric = 0.5 * (matrix + matrix.conj().T)
    if sp.issparse(symmetric):
        symmetric = symmetric.tocsr()
    return Operator(op.space, symmetric, hermitian=True)


def bch_connector(h_qs: Operator, h_t: Operator, t: float, order: int = 2) -> Operator:
    """3차까지 자른 BCH 급수

    1차: t(H_qs - H_t)
    2차: + (i t^2 / 2) [H_qs, -H_t]
    3차: + (t^3 / 12) ([H_qs, [H_qs, H_t]] - [H_t, [H_t, H_qs]])
    """
    _check_same_space(h_qs, h_t)
    if isinstance(order, bool) or order not in (1, 2, 3):
        raise ParameterError(f"BCH 차수는 1..3 이어야 합니다: {order}")

    terms = [(t, h_qs), (-t, h_t)]
    if order >= 2:
        norm_qs, norm_t = h_qs.max_abs(), h_t.max_abs()
        first = _zero_if_negligible(commutator(h_qs, h_t), norm_qs * norm_t)
        terms.append((1.0, _hermitian_term(first, -0.5j * t * t, norm_qs * norm_t, 2)))

        if order == 3:
            scale3 = norm_qs * norm_t * max(norm_qs, norm_t)
            nested = op_combine([
                (1.0, commutator(h_qs, first)),
                (1.0, commutator(h_t, first)),
            ])
            nested = _zero_if_negligible(nested, scale3)
            terms.append((1.0, _hermitian_term(nested, t ** 3 / 12.0, scale3, 3)))

    return op_combine(terms)


def bch_defect(h_qs: Operator, h_t: Operator, t: float, order: int) -> float:
    """|| e^{i h_order(t)} - e^{itH_qs} e^{-itH_t} ||_2 (밀집 계산)"""
    h = bch_connector(h_qs, h_t, t, order)
    exact = la.expm(1j * t * h_qs.to_dense()) @ la.expm(-1j * t * h_t.to_dense())
    return float(np.linalg.norm(la.expm(1j * h.to_dense()) - exact, 2))


def eigenstate_residual(h: Operator, psi: StateVector) -> float:
    """|| h psi - <psi|h|psi> psi ||_2"""
    if not h.hermitian:
        raise ContractError("eigenstate_residual 은 에르미트 연산자가 필요합니다")
    if h.space != psi.space:
        raise DimensionError(f"공간 불일치: N={h.space.n_sites} vs N={psi.space.n_sites}")
    applied = h.apply(psi.amplitudes)
    mean = np.vdot(psi.amplitudes, applied).real
    return float(np.linalg.norm(applied - mean * psi.amplitudes))


def conjugate_observable(observable: Operator, h: Operator) -> Operator:
    """e^{-ih} O e^{ih} (밀집 분석 도구)"""
    _check_same_space(observable, h)
    dense_max = get_settings().DENSE_MAX_SITES
    if h.space.n_sites > dense_max:
        raise ParameterError(f"conjugate_observable 은 N <= {dense_max} 에서만 지원합니다")

    unitary = la.expm(-1j * h.to_dense())
    conjugated = unitary @ observable.to_dense() @ unitary.conj().T
    if observable.hermitian:
        conjugated = 0.5 * (conjugated + conjugated.conj().T)
    return Operator(h.space, conjugated, hermitian=observable.hermitian)


def xi_phase(h_qs: Operator, h_t: Operator, psi0: StateVector, times: Sequence[float],
             backend: Optional[PropagatorBackend] = None) -> ConnectorReport:
    """o(t) = <e^{-itH_qs}psi | e^{-itH_t}psi>, xi = -i log o (위상 연속 전개)"""
    _check_same_space(h_qs, h_t)
    times = np.asarray(times, dtype=float)

    qs_states = PropagatorFactory.create(h_qs, backend).evolve_many(psi0, times)
    t_states = PropagatorFactory.create(h_t, backend).evolve_many(psi0, times)
    overlaps = np.array([a.overlap(b) for a, b in zip(qs_states, t_states)])

    overlap_abs = np.abs(overlaps)
    saturated = overlap_abs < OVERLAP_FLOOR
    xi_imag = -np.log(np.maximum(overlap_abs, OVERLAP_FLOOR))

    raw_phase = np.angle(overlaps)
    # 포화된 표본은 직전 위상을 유지
    for i in np.flatnonzero(saturated):
        raw_phase[i] = raw_phase[i - 1] if i > 0 else 0.0
    xi_real = np.unwrap(raw_phase)

    increments = np.abs(np.diff(xi_real))
    if increments.size and increments.max() > _PHASE_WARN:
        logger.warning(
            f"xi 위상 증분이 pi에 가깝습니다 (최대 {increments.max():.3f} rad): 시간 격자를 더 촘촘히 하세요"
        )
    if saturated.any():
        logger.warning(f"|overlap| < {OVERLAP_FLOOR:g} 인 표본 {int(saturated.sum())}개: Im xi 포화")

    h_diff = op_combine([(1.0, h_qs), (-1.0, h_t)])
    return ConnectorReport(
        times=times,
        xi_real=xi_real,
        xi_imag=xi_imag,
        overlap_abs=overlap_abs,
        residual0=eigenstate_residual(h_diff, psi0),
        saturated=saturated,
    )
