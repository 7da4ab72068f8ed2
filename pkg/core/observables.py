"""
기댓값, fidelity, 회전 좌표계, <S_x>_T 재구성
"""

import logging
from typing import Tuple

import numpy as np

from core.errors import ContractError, DimensionError, NumericError, ParameterError
from core.spin_algebra import AXES, Operator, StateVector, magnetization_values, product_state
from models.report_models import ReconstructionRecord, Trajectory

logger = logging.getLogger(__name__)

SX_LABEL = "Sx"
SY_LABEL = "Sy"
SZ_LABEL = "Sz"

IMAG_RESIDUE_TOL = 1e-10


def _same_space(a, b) -> None:
    if a.space != b.space:
        raise DimensionError(f"공간 불일치: N={a.space.n_sites} vs N={b.space.n_sites}")


def expect(op: Operator, psi: StateVector) -> float:
    """<psi|O|psi> (에르미트 O만 허용)"""
    if not op.hermitian:
        raise ContractError("기댓값은 에르미트 연산자에 대해서만 계산합니다")
    _same_space(op, psi)

    applied = op.apply(psi.amplitudes)
    value = complex(np.vdot(psi.amplitudes, applied))
    scale = max(1.0, float(np.linalg.norm(applied)))
    if abs(value.imag) > IMAG_RESIDUE_TOL * scale:
        raise NumericError(f"기댓값 허수부가 너무 큽니다: {value.imag:.3e}")
    return value.real


def fidelity(psi1: StateVector, psi2: StateVector) -> float:
    """|<psi1|psi2>|^2"""
    return abs(psi1.overlap(psi2)) ** 2


def rotating_frame(psi: StateVector, t: float, omega: float) -> StateVector:
    """exp(i t omega S_z) 적용"""
    phases = np.exp(1j * t * omega * magnetization_values(psi.space))
    return StateVector.from_amplitudes(psi.space, phases * psi.amplitudes)


def reconstruct_sx(traj: Trajectory) -> ReconstructionRecord:
    """sqrt(<S_x>_QS^2 + <S_y>_QS^2), 직접 계산 열은 호출자가 채운다"""
    missing = [label for label in (SX_LABEL, SY_LABEL) if label not in traj.labels]
    if missing:
        raise ContractError(f"재구성에 필요한 레이블이 없습니다: {missing}")

    sx = traj.series(SX_LABEL)
    sy = traj.series(SY_LABEL)
    return ReconstructionRecord(
        times=traj.times,
        sx_qs=sx,
        sy_qs=sy,
        sx_target_reconstructed=np.hypot(sx, sy),
    )


def ghz_branch_overlaps(psi: StateVector, basis_axis: str) -> Tuple[complex, complex]:
    up = product_state(psi.space, basis_axis, 1)
    down = product_state(psi.space, basis_axis, -1)
    return up.overlap(psi), down.overlap(psi)


def ghz_fidelity(psi: StateVector, basis_axis: str = "z") -> float:
    """max_phi |<GHZ_phi|psi>|^2 = (|a| + |b|)^2 / 2"""
    a, b = ghz_branch_overlaps(psi, basis_axis)
    return 0.5 * (abs(a) + abs(b)) ** 2


def oat_ghz_axis(n_sites: int) -> str:
    """chi*t = pi/2 의 OAT 상태가 GHZ가 되는 축: 짝수 N은 x, 홀수 N은 y"""
    if n_sites < 1:
        raise ParameterError(f"n_sites는 1 이상이어야 합니다: {n_sites}")
    return "x" if n_sites % 2 == 0 else "y"


def best_ghz_axis(psi: StateVector) -> Tuple[str, float]:
    scores = [(axis, ghz_fidelity(psi, axis)) for axis in AXES]
    return max(scores, key=lambda item: item[1])


def oat_sx_analytic(n_sites: int, chi_t: np.ndarray) -> np.ndarray:
    """coherent_x 에서 시작한 OAT의 <S_x> = (N/2) cos^{N-1}(chi t)"""
    return 0.5 * n_sites * np.cos(np.asarray(chi_t, dtype=float)) ** (n_sites - 1)
