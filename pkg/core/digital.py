"""
Trotter 곱 공식과 커넥터 기반 quantum kick 스킴
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import get_settings
from core.connector import commutator, eigenstate_residual
from core.errors import ContractError, DimensionError, ParameterError
from core.hamiltonians import build_hamiltonian
from core.observables import fidelity
from core.spin_algebra import Operator, StateVector, op_combine
from models.report_models import KickRecord, KickReport, MatchResult
from models.spin_models import HamiltonianSpec
from providers.propagator import Propagator, PropagatorBackend, PropagatorFactory
from utils.golden_section import golden_section_minimize

logger = logging.getLogger(__name__)

KickHamiltonian = Union[Operator, HamiltonianSpec, None]

OBJECTIVES = ("residual", "overlap")


def _propagators(terms: Sequence[Operator], backend: Optional[PropagatorBackend]) -> List[Propagator]:
    if not terms:
        raise ParameterError("Trotter 분해에는 최소 한 개의 항이 필요합니다")
    space = terms[0].space
    for term in terms:
        if term.space != space:
            raise DimensionError(f"항들의 공간이 다릅니다: N={space.n_sites} vs N={term.space.n_sites}")
    return [PropagatorFactory.create(term, backend) for term in terms]


def trotter_evolve(terms: Sequence[Operator], t: float, n: int, psi0: StateVector,
                   order: int = 1, backend: Optional[PropagatorBackend] = None) -> StateVector:
    """(e^{-iH_1 t/n} ... e^{-iH_l t/n})^n psi0, order=2 는 대칭 분할"""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"Trotter 단계 수 n은 1 이상의 정수여야 합니다: {n}")
    if order not in (1, 2):
        raise ParameterError(f"Trotter 차수는 1 또는 2 입니다: {order}")

    props = _propagators(terms, backend)
    dt = t / n
    state = psi0
    for _ in range(n):
        if order == 1:
            for prop in props:
                state = prop.evolve(state, dt)
        else:
            for prop in props[:-1]:
                state = prop.evolve(state, dt / 2.0)
            state = props[-1].evolve(state, dt)
            for prop in reversed(props[:-1]):
                state = prop.evolve(state, dt / 2.0)
    return state


def exact_evolve(terms: Sequence[Operator], t: float, psi0: StateVector,
                 backend: Optional[PropagatorBackend] = None) -> StateVector:
    """e^{-it sum_j H_j} psi0"""
    _propagators(terms, backend)
    total = op_combine([(1.0, term) for term in terms])
    return PropagatorFactory.create(total, backend).evolve(psi0, t)


# ---------------------------------------------------------------------------
# kick 매칭
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KickFamily:
    """스칼라 파라미터 하나로 조정되는 해밀토니안 명세 집합"""
    base: HamiltonianSpec
    parameter: str

    def __post_init__(self):
        self.base.get_parameter(self.parameter)

    def member(self, value: float) -> HamiltonianSpec:
        return self.base.with_parameter(self.parameter, value)


def _kick_objective(objective: str, family: KickFamily, state: StateVector, target: Operator,
                    duration: Optional[float], backend: Optional[PropagatorBackend]):
    if objective == "residual":
        def residual(value: float) -> float:
            h = build_hamiltonian(family.member(value))
            return eigenstate_residual(op_combine([(1.0, h), (-1.0, target)]), state)
        return residual

    if duration is None or not duration > 0:
        raise ParameterError("overlap 목적함수에는 양의 kick 길이가 필요합니다")
    target_state = PropagatorFactory.create(target, backend).evolve(state, duration)

    def overlap_loss(value: float) -> float:
        h = build_hamiltonian(family.member(value))
        kicked = PropagatorFactory.create(h, backend).evolve(state, duration)
        overlap = abs(kicked.overlap(target_state))
        return -math.log(max(overlap, 1e-300))

    return overlap_loss


def match_next_kick(current_state: StateVector, target: Operator, family: KickFamily,
                    search_interval: Tuple[float, float], objective: str = "residual",
                    duration: Optional[float] = None,
                    backend: Optional[PropagatorBackend] = None) -> MatchResult:
    """search_interval 위 golden-section 탐색으로 다음 kick 해밀토니안 선택

    objective="residual": ||(H(theta) - H_T) psi - <.> psi||
    objective="overlap": -ln|<psi| e^{i dt H(theta)} e^{-i dt H_T} |psi>|

    XXX+교대 자기장 계열에서 overlap 으로 정합 alpha 를 1% 안에 찾으려면 chi*dt 가 pi/4 정도여야 한다.
    dt=0.1 이면 약 4% 작게 나온다. residual 은 이 계열에서 구간 하한으로 간다.
    """
    if objective not in OBJECTIVES:
        raise ParameterError(f"알 수 없는 목적함수: {objective!r} (허용: {OBJECTIVES})")
    if current_state.space != target.space:
        raise DimensionError("상태와 타겟 해밀토니안의 공간이 다릅니다")

    lower, upper = search_interval
    loss = _kick_objective(objective, family, current_state, target, duration, backend)
    result = golden_section_minimize(loss, float(lower), float(upper))
    if result.flat:
        logger.info(f"평평한 목적함수: {family.parameter} = 구간 중점 {result.argmin}")

    return MatchResult(
        spec=family.member(result.argmin),
        parameter=family.parameter,
        value=result.argmin,
        objective=objective,
        objective_value=result.minimum,
        evaluations=result.evaluations,
    )


class KickMatcher(ABC):
    """현재 상태로부터 다음 kick 해밀토니안을 정하는 전략"""

    @abstractmethod
    def next_kick(self, state: StateVector, target: Operator, duration: float) -> MatchResult:
        pass


class GoldenSectionMatcher(KickMatcher):

    def __init__(self, family: KickFamily, search_interval: Tuple[float, float],
                 objective: str = "residual", backend: Optional[PropagatorBackend] = None):
        self.family = family
        self.search_interval = search_interval
        self.objective = objective
        self.backend = backend

    def next_kick(self, state: StateVector, target: Operator, duration: float) -> MatchResult:
        return match_next_kick(state, target, self.family, self.search_interval,
                               objective=self.objective, duration=duration, backend=self.backend)


# ---------------------------------------------------------------------------
# kick 스케줄 실행
# ---------------------------------------------------------------------------

@dataclass
class KickSchedule:
    """kick 목록 (해밀토니안, 길이). 해밀토니안이 None 이면 matcher 가 고른다."""
    kicks: List[Tuple[KickHamiltonian, float]]
    target: Operator
    matcher: Optional[KickMatcher] = None
    total_time: Optional[float] = None

    def __post_init__(self):
        if not self.kicks:
            raise ParameterError("kick 스케줄이 비어 있습니다")
        for index, (_, duration) in enumerate(self.kicks):
            if not (math.isfinite(duration) and duration > 0):
                raise ParameterError(f"kick {index}의 길이는 양수여야 합니다: {duration}")
        if self.matcher is None and any(h is None for h, _ in self.kicks):
            raise ParameterError("해밀토니안이 비어 있는 kick 에는 matcher 가 필요합니다")
        if self.total_time is not None:
            total = math.fsum(d for _, d in self.kicks)
            if abs(total - self.total_time) > 1e-12 * max(1.0, abs(self.total_time)):
                raise ParameterError(f"kick 길이 합 {total!r} != 요청 시간 {self.total_time!r}")

    @classmethod
    def uniform(cls, hamiltonian: KickHamiltonian, target: Operator, t: float, n: int,
                matcher: Optional[KickMatcher] = None) -> "KickSchedule":
        """길이 t/n 인 kick n개"""
        if n < 1:
            raise ParameterError(f"kick 수는 1 이상이어야 합니다: {n}")
        return cls([(hamiltonian, t / n)] * n, target, matcher, total_time=t)

    @property
    def duration(self) -> float:
        return math.fsum(d for _, d in self.kicks)


def run_kicks(schedule: KickSchedule, psi0: StateVector,
              backend: Optional[PropagatorBackend] = None) -> Tuple[StateVector, KickReport]:
    """kick 을 순서대로 적용하고 kick 마다 진단값을 기록"""
    target = schedule.target
    if psi0.space != target.space:
        raise DimensionError("초기 상태와 타겟 해밀토니안의 공간이 다릅니다")

    target_prop = PropagatorFactory.create(target, backend)
    built: Dict[HamiltonianSpec, Operator] = {}
    props: Dict[int, Propagator] = {}
    report = KickReport()
    state = psi0
    elapsed = 0.0

    for index, (hamiltonian, duration) in enumerate(schedule.kicks):
        parameter = None
        if hamiltonian is None:
            match = schedule.matcher.next_kick(state, target, duration)
            hamiltonian, parameter = match.spec, match.value

        if isinstance(hamiltonian, HamiltonianSpec):
            if hamiltonian not in built:
                built[hamiltonian] = build_hamiltonian(hamiltonian)
            op = built[hamiltonian]
        else:
            op = hamiltonian
        if op.space != target.space:
            raise DimensionError(f"kick {index}의 해밀토니안 공간이 타겟과 다릅니다")

        residual = eigenstate_residual(op_combine([(1.0, op), (-1.0, target)]), state)
        commutator_norm = commutator(op, target).max_abs()

        if id(op) not in props:
            props[id(op)] = PropagatorFactory.create(op, backend)
        state = props[id(op)].evolve(state, duration)
        elapsed += duration

        exact = target_prop.evolve(psi0, elapsed)
        report.append(KickRecord(
            index=index,
            duration=duration,
            residual=residual,
            commutator_norm=commutator_norm,
            running_fidelity=fidelity(exact, state),
            parameter=parameter,
        ))

    logger.info(f"kick {report.step_count}개 실행, 최종 fidelity {report.final_fidelity:.12f}")
    return state, report


def connector_trotter(o_operator: Operator, target: Operator, psi0: StateVector, t: float, n: int = 1,
                      o_terms: Optional[Sequence[Operator]] = None, order: int = 1,
                      backend: Optional[PropagatorBackend] = None) -> StateVector:
    """[O, H_T] = 0 이고 psi0 가 O - H_T 의 고유상태이면 e^{-itO} 로 e^{-itH_T} 를 대신한다"""
    settings = get_settings()
    if o_operator.space != target.space or psi0.space != target.space:
        raise DimensionError("O, 타겟, 초기 상태의 공간이 일치하지 않습니다")

    scale = max(1.0, o_operator.max_abs() * target.max_abs())
    commutator_norm = commutator(o_operator, target).max_abs()
    if commutator_norm > settings.CONNECTOR_RESIDUAL_TOL * scale:
        raise ContractError(f"[O, H_T] != 0: max-norm {commutator_norm:.3e}")

    residual = eigenstate_residual(op_combine([(1.0, o_operator), (-1.0, target)]), psi0)
    if residual > settings.CONNECTOR_RESIDUAL_TOL:
        raise ContractError(f"초기 상태가 O - H_T 의 고유상태가 아닙니다: residual {residual:.3e}")

    if o_terms:
        total = op_combine([(1.0, term) for term in o_terms])
        mismatch = op_combine([(1.0, total), (-1.0, o_operator)]).max_abs()
        if mismatch > settings.HERMITIAN_TOL * max(1.0, o_operator.max_abs()):
            raise ContractError(f"o_terms 의 합이 O 와 다릅니다: max-norm {mismatch:.3e}")
        state = trotter_evolve(o_terms, t, n, psi0, order=order, backend=backend)
    else:
        state = PropagatorFactory.create(o_operator, backend).evolve(psi0, t)

    exact = PropagatorFactory.create(target, backend).evolve(psi0, t)
    achieved = fidelity(exact, state)
    if achieved < settings.CONNECTOR_MIN_FIDELITY:
        raise ContractError(
            f"커넥터 진화 fidelity {achieved:.12f} < {settings.CONNECTOR_MIN_FIDELITY} "
            f"(commutator {commutator_norm:.3e}, residual {residual:.3e})"
        )
    return state
