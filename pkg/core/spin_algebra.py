"""
스핀-1/2 체인 연산자와 표준 상태

기저 순서: 사이트 1이 최상위 비트이고 |0> = |↑> (sigma_z 고유값 +1).
집단 스핀 규약: S_a = 1/2 * sum_i sigma_i^a.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from config.settings import get_settings
from core.errors import ContractError, DimensionError, ParameterError, SiteIndexError

logger = logging.getLogger(__name__)

AXES = ("x", "y", "z")

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (axis, sign) -> 단일 사이트 고유벡터
_SINGLE_SITE_STATES = {
    ("z", 1): np.array([1, 0], dtype=complex),
    ("z", -1): np.array([0, 1], dtype=complex),
    ("x", 1): np.array([1, 1], dtype=complex) / np.sqrt(2),
    ("x", -1): np.array([1, -1], dtype=complex) / np.sqrt(2),
    ("y", 1): np.array([1, 1j], dtype=complex) / np.sqrt(2),
    ("y", -1): np.array([1, -1j], dtype=complex) / np.sqrt(2),
}

STATE_NORM_TOL = 1e-12

MatrixLike = Union[sp.spmatrix, np.ndarray]


def _check_axis(axis: str) -> str:
    if axis not in AXES:
        raise ParameterError(f"알 수 없는 축: {axis!r} (허용: {AXES})")
    return axis


def max_abs(matrix: MatrixLike) -> float:
    """행렬 원소 절댓값의 최대값"""
    if sp.issparse(matrix):
        if matrix.nnz == 0:
            return 0.0
        return float(abs(matrix).max())
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix)))


def hermitian_deviation(matrix: MatrixLike) -> float:
    return max_abs(matrix - matrix.conj().T)


@dataclass(frozen=True)
class HilbertSpace:
    """N 사이트 스핀-1/2 체인의 전체 2^N 차원 공간"""
    n_sites: int

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or not isinstance(self.n_sites, (int, np.integer)):
            raise ParameterError(f"n_sites는 정수여야 합니다: {self.n_sites!r}")
        if self.n_sites < 1:
            raise ParameterError(f"n_sites는 1 이상이어야 합니다: {self.n_sites}")
        max_sites = get_settings().MAX_SITES
        if self.n_sites > max_sites:
            raise ParameterError(f"n_sites={self.n_sites}가 MAX_SITES={max_sites}를 초과합니다")

    @property
    def dim(self) -> int:
        return 2 ** int(self.n_sites)


@dataclass(frozen=True, eq=False)
class Operator:
    """공간 위의 (희소 또는 밀집) 복소 행렬. 생성 후 수정하지 않는다."""
    space: HilbertSpace
    matrix: MatrixLike
    hermitian: bool = False

    def __post_init__(self):
        dim = self.space.dim
        if self.matrix.shape != (dim, dim):
            raise DimensionError(f"연산자 모양 {self.matrix.shape} != ({dim}, {dim})")
        if self.hermitian:
            tol = get_settings().HERMITIAN_TOL
            deviation = hermitian_deviation(self.matrix)
            if deviation > tol * max_abs(self.matrix):
                raise ContractError(f"에르미트 플래그가 설정되었으나 max|A - A^†| = {deviation:.3e}")

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    def to_sparse(self) -> sp.csr_matrix:
        if self.is_sparse:
            return self.matrix.tocsr()
        return sp.csr_matrix(self.matrix)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return np.asarray(self.matrix @ vector)

    def max_abs(self) -> float:
        return max_abs(self.matrix)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, hermitian=self.hermitian)

    def __add__(self, other: "Operator") -> "Operator":
        return op_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "Operator") -> "Operator":
        return op_combine([(1.0, self), (-1.0, other)])

    def __rmul__(self, coefficient: complex) -> "Operator":
        return op_combine([(coefficient, self)])


@dataclass(frozen=True, eq=False)
class StateVector:
    """정규화된 복소 진폭 벡터 (읽기 전용)"""
    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (self.space.dim,):
            raise DimensionError(f"상태 길이 {amps.shape[0]} != dim {self.space.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ContractError(f"상태가 정규화되지 않았습니다: ||psi|| = {norm:.15f}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, space: HilbertSpace, amplitudes: np.ndarray) -> "StateVector":
        """임의 벡터를 정규화하여 상태 생성"""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm == 0.0:
            raise ParameterError("영 벡터 또는 유한하지 않은 벡터는 정규화할 수 없습니다")
        return cls(space, amps / norm)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>"""
        if other.space != self.space:
            raise DimensionError(f"공간 불일치: N={self.space.n_sites} vs N={other.space.n_sites}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@lru_cache(maxsize=512)
def pauli_site(kind: str, site: int, space: HilbertSpace) -> Operator:
    """site 위치의 Pauli 행렬 I⊗…⊗sigma^kind⊗…⊗I"""
    _check_axis(kind)
    n = space.n_sites
    if isinstance(site, bool) or not isinstance(site, (int, np.integer)) or not 1 <= site <= n:
        raise SiteIndexError(f"site={site}가 범위 1..{n}을 벗어났습니다")

    left = sp.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sp.identity(2 ** (n - site), dtype=complex, format="csr")
    single = sp.csr_matrix(PAULI[kind])
    matrix = sp.kron(sp.kron(left, single, format="csr"), right, format="csr")
    return Operator(space, matrix, hermitian=True)


@lru_cache(maxsize=64)
def magnetization_values(space: HilbertSpace) -> np.ndarray:
    """계산 기저 각 상태의 S_z 고유값 N/2 - (#down)"""
    indices = np.arange(space.dim)
    bits = (indices[:, None] >> np.arange(space.n_sites)) & 1
    values = space.n_sites / 2.0 - bits.sum(axis=1)
    values.setflags(write=False)
    return values


@lru_cache(maxsize=64)
def collective_spin(axis: str, space: HilbertSpace) -> Operator:
    """S_a = 1/2 sum_i sigma_i^a"""
    _check_axis(axis)
    if axis == "z":
        matrix = sp.diags(magnetization_values(space).astype(complex), format="csr")
        return Operator(space, matrix, hermitian=True)

    return op_combine([(0.5, pauli_site(axis, i, space)) for i in range(1, space.n_sites + 1)])


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, sp.identity(space.dim, dtype=complex, format="csr"), hermitian=True)


def op_combine(terms: Sequence[Tuple[complex, Operator]]) -> Operator:
    """선형 결합 sum_k c_k O_k"""
    if not terms:
        raise ParameterError("op_combine에는 최소 한 개의 항이 필요합니다")

    space = terms[0][1].space
    for _, op in terms:
        if op.space != space:
            raise DimensionError(
                f"서로 다른 공간의 연산자는 결합할 수 없습니다: N={space.n_sites} vs N={op.space.n_sites}"
            )

    all_sparse = all(op.is_sparse for _, op in terms)
    if all_sparse:
        matrix = sp.csr_matrix((space.dim, space.dim), dtype=complex)
        for coefficient, op in terms:
            matrix = matrix + complex(coefficient) * op.matrix
        matrix = matrix.tocsr()
        matrix.eliminate_zeros()
    else:
        matrix = np.zeros((space.dim, space.dim), dtype=complex)
        for coefficient, op in terms:
            matrix = matrix + complex(coefficient) * op.to_dense()

    hermitian = all(np.isreal(c) and op.hermitian for c, op in terms)
    return Operator(space, matrix, hermitian=hermitian)


def op_product(left: Operator, right: Operator, hermitian: bool = False) -> Operator:
    """행렬곱 left·right. 에르미트성은 호출자가 주장하고 생성 시 검증된다."""
    if left.space != right.space:
        raise DimensionError(f"공간 불일치: N={left.space.n_sites} vs N={right.space.n_sites}")
    if left.is_sparse and right.is_sparse:
        matrix = (left.matrix @ right.matrix).tocsr()
    else:
        matrix = left.to_dense() @ right.to_dense()
    return Operator(left.space, matrix, hermitian=hermitian)


def op_power(op: Operator, exponent: int) -> Operator:
    if exponent < 0:
        raise ParameterError(f"음의 거듭제곱은 지원하지 않습니다: {exponent}")
    result = identity(op.space)
    for _ in range(exponent):
        result = op_product(result, op, hermitian=op.hermitian)
    return result


def product_state(space: HilbertSpace, axis: str, sign: int = 1) -> StateVector:
    """모든 스핀이 axis 방향 ±로 정렬된 곱 상태"""
    _check_axis(axis)
    if sign not in (1, -1):
        raise ParameterError(f"sign은 +1 또는 -1이어야 합니다: {sign}")
    single = _SINGLE_SITE_STATES[(axis, sign)]
    amplitudes = reduce(np.kron, [single] * space.n_sites)
    return StateVector.from_amplitudes(space, amplitudes)


def coherent_x_state(space: HilbertSpace) -> StateVector:
    """S_x 최대 고유상태 ⊗_i (|↑> + |↓>)/√2"""
    amplitudes = np.full(space.dim, 2.0 ** (-space.n_sites / 2.0), dtype=complex)
    return StateVector.from_amplitudes(space, amplitudes)


def ghz_state(space: HilbertSpace, basis_axis: str = "z", relative_phase: float = 0.0) -> StateVector:
    """(|a…a> + e^{i phi}|b…b>)/√2, a/b는 basis_axis 방향 ± 고유상태"""
    up = product_state(space, basis_axis, 1).amplitudes
    down = product_state(space, basis_axis, -1).amplitudes
    amplitudes = (up + np.exp(1j * relative_phase) * down) / np.sqrt(2.0)
    return StateVector.from_amplitudes(space, amplitudes)


def random_state(space: HilbertSpace, rng: np.random.Generator) -> StateVector:
    amplitudes = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return StateVector.from_amplitudes(space, amplitudes)


def basis_state(space: HilbertSpace, index: int) -> StateVector:
    if not 0 <= index < space.dim:
        raise SiteIndexError(f"기저 인덱스 {index}가 범위 0..{space.dim - 1}을 벗어났습니다")
    amplitudes = np.zeros(space.dim, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(space, amplitudes)


def spin_operators(space: HilbertSpace) -> List[Operator]:
    return [collective_spin(axis, space) for axis in AXES]
