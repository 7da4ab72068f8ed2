"""
시간 전파 백엔드 (고유값 분해 / Krylov-Lanczos) 와 궤적 샘플러
"""

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from config.settings import get_settings
from core.errors import ContractError, DimensionError, NumericError, ParameterError
from core.observables import expect
from core.spin_algebra import Operator, StateVector
from models.report_models import Trajectory

logger = logging.getLogger(__name__)

# Lanczos 한 스텝이 감당할 ||H|| dt 의 초기 상한
_KRYLOV_STEP_PHASE = 20.0


class PropagatorBackend(str, Enum):
    DENSE_EIG = "dense_eig"
    KRYLOV = "krylov"


class Propagator(ABC):
    """고정된 해밀토니안 H에 대한 e^{-itH}. 생성 후 불변이며 스레드 간 공유 가능."""

    backend: PropagatorBackend

    def __init__(self, hamiltonian: Operator):
        if not hamiltonian.hermitian:
            raise ContractError("전파자는 에르미트 해밀토니안만 받습니다")
        self.hamiltonian = hamiltonian
        self.norm_tol = get_settings().NORM_TOL

    @property
    def space(self):
        return self.hamiltonian.space

    def evolve(self, psi0: StateVector, t: float) -> StateVector:
        self._check_state(psi0)
        if t == 0:
            return psi0
        return self._finish(self._propagate(psi0.amplitudes, float(t)), t)

    def evolve_many(self, psi0: StateVector, times: Sequence[float]) -> List[StateVector]:
        return [self.evolve(psi0, t) for t in times]

    @abstractmethod
    def _propagate(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        pass

    def get_backend_name(self) -> str:
        return self.backend.value

    def _check_state(self, psi0: StateVector) -> None:
        if psi0.space != self.space:
            raise DimensionError(
                f"상태 공간 N={psi0.space.n_sites} 과 해밀토니안 공간 N={self.space.n_sites} 불일치"
            )

    def _finish(self, amplitudes: np.ndarray, t: float) -> StateVector:
        norm = float(np.linalg.norm(amplitudes))
        if not math.isfinite(norm) or abs(norm - 1.0) > self.norm_tol:
            raise NumericError(f"t={t}에서 노름 보존 실패: ||psi|| = {norm:.15f}")
        return StateVector(self.space, amplitudes / norm)


class DenseEigPropagator(Propagator):
    """한 번의 에르미트 고유값 분해로 모든 시간을 계산"""

    backend = PropagatorBackend.DENSE_EIG

    def __init__(self, hamiltonian: Operator):
        super().__init__(hamiltonian)
        dense = hamiltonian.to_dense()
        eigenvalues, eigenvectors = la.eigh(dense)

        reconstructed = (eigenvectors * eigenvalues) @ eigenvectors.conj().T
        scale = max(1.0, float(np.max(np.abs(dense))) if dense.size else 1.0)
        deviation = float(np.max(np.abs(reconstructed - dense)))
        if deviation > 1e-10 * scale:
            raise NumericError(f"고유값 분해 재구성 오차 {deviation:.3e} (상대 {deviation / scale:.3e})")

        eigenvalues.setflags(write=False)
        eigenvectors.setflags(write=False)
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors

    def _propagate(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        coefficients = self.eigenvectors.conj().T @ amplitudes
        return self.eigenvectors @ (np.exp(-1j * t * self.eigenvalues) * coefficients)

    def evolve_many(self, psi0: StateVector, times: Sequence[float]) -> List[StateVector]:
        self._check_state(psi0)
        coefficients = self.eigenvectors.conj().T @ psi0.amplitudes
        states = []
        for t in times:
            if t == 0:
                states.append(psi0)
                continue
            amplitudes = self.eigenvectors @ (np.exp(-1j * t * self.eigenvalues) * coefficients)
            states.append(self._finish(amplitudes, t))
        return states


class KrylovPropagator(Propagator):
    """Lanczos 부분공간에서 삼중대각 지수함수를 계산하고 필요하면 시간 구간을 반분"""

    backend = PropagatorBackend.KRYLOV

    def __init__(self, hamiltonian: Operator, tol: Optional[float] = None,
                 max_dim: Optional[int] = None, max_splits: Optional[int] = None):
        super().__init__(hamiltonian)
        settings = get_settings()
        self.tol = settings.KRYLOV_TOL if tol is None else tol
        self.max_dim = settings.KRYLOV_MAX_DIM if max_dim is None else max_dim
        self.max_splits = settings.KRYLOV_MAX_SPLITS if max_splits is None else max_splits
        if self.tol <= 0 or self.max_dim < 2:
            raise ParameterError(f"잘못된 Krylov 설정: tol={self.tol}, max_dim={self.max_dim}")

        self._matrix = hamiltonian.to_sparse()
        # 1-노름은 스펙트럼 반지름의 상한
        self._norm_bound = float(abs(self._matrix).sum(axis=0).max()) if self._matrix.nnz else 0.0

    def _propagate(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        steps = max(1, math.ceil(self._norm_bound * abs(t) / _KRYLOV_STEP_PHASE))
        dt = t / steps
        vector = np.array(amplitudes, dtype=complex)
        for _ in range(steps):
            vector = self._advance(vector, dt, depth=0)
        return vector

    def _advance(self, vector: np.ndarray, dt: float, depth: int) -> np.ndarray:
        result, error = self._lanczos_exp(vector, dt)
        if result is not None:
            return result
        if depth >= self.max_splits:
            raise NumericError(
                f"Krylov 전파 수렴 실패: 잔차 추정 {error:.3e} > tol {self.tol:.1e} "
                f"(dt={dt:.3e}, 부분공간 {self.max_dim})"
            )
        half = self._advance(vector, dt / 2.0, depth + 1)
        return self._advance(half, dt / 2.0, depth + 1)

    def _lanczos_exp(self, vector: np.ndarray, dt: float) -> Tuple[Optional[np.ndarray], float]:
        """(e^{-i dt H} v, 0) 또는 수렴 실패 시 (None, 잔차 추정)"""
        v_norm = float(np.linalg.norm(vector))
        basis = np.zeros((self.max_dim, vector.size), dtype=complex)
        basis[0] = vector / v_norm
        diagonal: List[float] = []
        off_diagonal: List[float] = []
        error = math.inf

        for j in range(self.max_dim):
            w = self._matrix @ basis[j]
            diagonal.append(float(np.vdot(basis[j], w).real))
            # 완전 재직교화
            w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
            w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
            b = float(np.linalg.norm(w))

            y = self._tridiagonal_exp(diagonal, off_diagonal, dt)
            invariant = b <= 1e-14 * max(1.0, abs(diagonal[-1]))
            error = b * abs(y[-1])
            if invariant or error <= self.tol:
                return v_norm * (basis[: j + 1].T @ y), 0.0
            if j + 1 < self.max_dim:
                off_diagonal.append(b)
                basis[j + 1] = w / b

        return None, error

    @staticmethod
    def _tridiagonal_exp(diagonal: List[float], off_diagonal: List[float], dt: float) -> np.ndarray:
        if len(diagonal) == 1:
            return np.array([np.exp(-1j * dt * diagonal[0])])
        theta, q = la.eigh_tridiagonal(np.array(diagonal), np.array(off_diagonal))
        return q @ (np.exp(-1j * dt * theta) * q[0].conj())


class PropagatorFactory:
    """백엔드 선택 팩토리"""

    @staticmethod
    def create(hamiltonian: Operator, backend: Optional[PropagatorBackend] = None,
               tol: Optional[float] = None) -> Propagator:
        settings = get_settings()
        if backend is None:
            if hamiltonian.space.n_sites <= settings.DENSE_MAX_SITES:
                backend = PropagatorBackend.DENSE_EIG
            else:
                backend = PropagatorBackend.KRYLOV
        backend = PropagatorBackend(backend)

        if backend == PropagatorBackend.DENSE_EIG:
            return DenseEigPropagator(hamiltonian)
        return KrylovPropagator(hamiltonian, tol=tol)

    @staticmethod
    def get_available_backends() -> Dict[str, bool]:
        return {backend.value: True for backend in PropagatorBackend}


def evolve(prop: Propagator, psi0: StateVector, t: float) -> StateVector:
    """e^{-itH} psi0"""
    return prop.evolve(psi0, t)


def trajectory(prop: Propagator, psi0: StateVector, times: Sequence[float],
               observables: Sequence[Tuple[str, Operator]],
               snapshot_marks: Sequence[int] = ()) -> Trajectory:
    """시간 격자의 관측값 기록. snapshot_marks 는 상태를 보관할 격자 인덱스."""
    for label, op in observables:
        if not op.hermitian:
            raise ContractError(f"관측량 '{label}' 이 에르미트가 아닙니다")
        if op.space != prop.space:
            raise DimensionError(f"관측량 '{label}' 의 공간이 전파자와 다릅니다")

    times = np.asarray(times, dtype=float)
    marks = set(int(m) for m in snapshot_marks)
    if any(not 0 <= m < len(times) for m in marks):
        raise ParameterError(f"스냅샷 인덱스가 격자 범위 밖입니다: {sorted(marks)}")

    states = prop.evolve_many(psi0, times)
    records = [{label: expect(op, state) for label, op in observables} for state in states]
    snapshots = {index: states[index] for index in sorted(marks)}
    return Trajectory(times=times, records=records, snapshots=snapshots)
