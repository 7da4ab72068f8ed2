import math

import numpy as np
import pytest

from core.digital import (
    GoldenSectionMatcher,
    KickFamily,
    KickSchedule,
    connector_trotter,
    exact_evolve,
    match_next_kick,
    run_kicks,
    trotter_evolve,
)
from core.errors import ContractError, DimensionError, ParameterError
from core.hamiltonians import build_oat, build_xx, build_xxx_field, matched_params
from core.observables import fidelity
from core.spin_algebra import (
    HilbertSpace,
    basis_state,
    coherent_x_state,
    collective_spin,
    op_combine,
    op_product,
    pauli_site,
    random_state,
)
from models.report_models import KickRecord, KickReport
from models.spin_models import HamiltonianKind, HamiltonianSpec, SpinChainParams


def _distance(a, b) -> float:
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


@pytest.fixture
def split_terms(space3):
    """비가환 두 항 chi S_z^2, S_x"""
    return [build_oat(SpinChainParams(n_sites=3)), collective_spin("x", space3)]


@pytest.fixture
def field_family():
    params = SpinChainParams(n_sites=4, beta=1.0)
    spec = HamiltonianSpec(kind=HamiltonianKind.XXX_FIELD, params=params)
    return KickFamily(spec, "field"), build_xxx_field(params, 0.7)


class TestTrotter:
    @pytest.mark.parametrize("order, expected", [(1, -1.0), (2, -2.0)])
    def test_error_scaling(self, split_terms, space3, order, expected):
        psi0 = coherent_x_state(space3)
        exact = exact_evolve(split_terms, 1.0, psi0)
        steps = np.array([8, 16, 32, 64])
        errors = [_distance(trotter_evolve(split_terms, 1.0, int(n), psi0, order=order), exact) for n in steps]
        slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
        assert slope == pytest.approx(expected, abs=0.3)

    def test_xx_bond_split_halves_error(self, space4, rng):
        """H_XX = 짝수 결합 + 홀수 결합, N=4, t=1"""
        def bond(i: int, j: int):
            return op_combine([(0.25, op_product(pauli_site(axis, i, space4), pauli_site(axis, j, space4),
                                                  hermitian=True)) for axis in "xy"])

        terms = [op_combine([(1.0, bond(1, 2)), (1.0, bond(3, 4))]), bond(2, 3)]
        assert np.allclose(terms[0].to_dense() + terms[1].to_dense(),
                           build_xx(SpinChainParams(n_sites=4, beta=1.0)).to_dense())

        psi0 = random_state(space4, rng)
        exact = exact_evolve(terms, 1.0, psi0)
        steps = np.array([8, 16, 32, 64])
        errors = np.array([_distance(trotter_evolve(terms, 1.0, int(n), psi0), exact) for n in steps])
        ratios = errors[:-1] / errors[1:]
        assert np.all(ratios > 2.0 / 1.3)
        assert np.all(ratios < 2.0 * 1.3)
        slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
        assert -1.3 <= slope <= -0.7

    def test_commuting_terms_are_exact(self, space3):
        terms = [build_oat(SpinChainParams(n_sites=3)), collective_spin("z", space3)]
        psi0 = coherent_x_state(space3)
        assert _distance(trotter_evolve(terms, 2.0, 1, psi0), exact_evolve(terms, 2.0, psi0)) < 1e-10

    def test_validation(self, split_terms, space3):
        psi0 = coherent_x_state(space3)
        with pytest.raises(ParameterError):
            trotter_evolve(split_terms, 1.0, 0, psi0)
        with pytest.raises(ParameterError):
            trotter_evolve(split_terms, 1.0, 4, psi0, order=3)
        with pytest.raises(ParameterError):
            trotter_evolve([], 1.0, 4, psi0)
        with pytest.raises(DimensionError):
            trotter_evolve([split_terms[0], collective_spin("x", HilbertSpace(2))], 1.0, 4, psi0)


class TestKickMatching:
    def test_residual_objective_finds_planted_field(self, field_family, coherent4):
        family, target = field_family
        result = match_next_kick(coherent4, target, family, (0.0, 2.0), objective="residual")
        assert result.value == pytest.approx(0.7, abs=1e-6)
        assert result.spec.field == result.value
        assert result.objective_value < 1e-5

    def test_overlap_objective_finds_planted_field(self, field_family, coherent4):
        family, target = field_family
        result = match_next_kick(coherent4, target, family, (0.0, 2.0), objective="overlap", duration=0.3)
        assert result.value == pytest.approx(0.7, abs=1e-4)
        assert result.objective == "overlap"

    def test_overlap_objective_recovers_matched_alpha(self):
        params = matched_params(6, 1.0, 40.0)
        family = KickFamily(HamiltonianSpec(kind=HamiltonianKind.XXX_STAGGERED, params=params), "alpha")
        psi0 = coherent_x_state(HilbertSpace(6))
        result = match_next_kick(psi0, build_oat(params), family, (0.5 * params.alpha, 1.5 * params.alpha),
                                 objective="overlap", duration=math.pi / 4)
        assert result.value == pytest.approx(params.alpha, rel=0.01)

    def test_residual_objective_drifts_to_weak_field(self):
        params = matched_params(6, 1.0, 40.0)
        family = KickFamily(HamiltonianSpec(kind=HamiltonianKind.XXX_STAGGERED, params=params), "alpha")
        psi0 = coherent_x_state(HilbertSpace(6))
        result = match_next_kick(psi0, build_oat(params), family, (0.5 * params.alpha, 1.5 * params.alpha))
        assert result.value == pytest.approx(0.5 * params.alpha, rel=1e-6)

    def test_flat_objective_picks_midpoint(self, field_family, space4):
        family, target = field_family
        result = match_next_kick(basis_state(space4, 0), target, family, (0.0, 2.0))
        assert result.value == 1.0

    def test_bad_arguments(self, field_family, coherent4):
        family, target = field_family
        with pytest.raises(ParameterError):
            match_next_kick(coherent4, target, family, (0.0, 2.0), objective="energy")
        with pytest.raises(ParameterError):
            match_next_kick(coherent4, target, family, (0.0, 2.0), objective="overlap")
        with pytest.raises(ParameterError):
            KickFamily(family.base, "gamma")


class TestKickSchedule:
    def test_validation(self, space3):
        target = build_oat(SpinChainParams(n_sites=3))
        with pytest.raises(ParameterError):
            KickSchedule([], target)
        with pytest.raises(ParameterError):
            KickSchedule([(target, -0.1)], target)
        with pytest.raises(ParameterError):
            KickSchedule([(None, 0.1)], target)
        with pytest.raises(ParameterError):
            KickSchedule([(target, 0.1), (target, 0.2)], target, total_time=0.4)

    def test_uniform_schedule(self, space3):
        target = build_oat(SpinChainParams(n_sites=3))
        schedule = KickSchedule.uniform(target, target, 1.0, 3)
        assert len(schedule.kicks) == 3
        assert schedule.duration == pytest.approx(1.0)

    def test_commuting_kicks_on_eigenstate_are_exact(self, space3):
        """[H_k, H_T] = 0 이고 psi0 가 H_k - H_T 의 고유상태이면 fidelity 1"""
        target = build_oat(SpinChainParams(n_sites=3))
        kick = op_combine([(1.0, target), (0.4, collective_spin("z", space3))])
        schedule = KickSchedule.uniform(kick, target, 2.0, 5)
        psi0 = basis_state(space3, 3)

        state, report = run_kicks(schedule, psi0)
        assert report.step_count == 5
        assert report.total_duration == pytest.approx(2.0)
        for record in report.records:
            assert record.residual == pytest.approx(0.0, abs=1e-12)
            assert record.commutator_norm < 1e-12
            assert record.running_fidelity == pytest.approx(1.0, abs=1e-12)

    def test_non_commuting_kicks_lose_fidelity(self, space3):
        target = build_oat(SpinChainParams(n_sites=3))
        kick = op_combine([(1.0, target), (0.4, collective_spin("x", space3))])
        _, report = run_kicks(KickSchedule.uniform(kick, target, 2.0, 4), coherent_x_state(space3))
        assert report.final_fidelity < 1.0 - 1e-6
        assert all(r.commutator_norm > 0.0 for r in report.records)

    def test_matched_kicks(self, field_family, coherent4):
        family, target = field_family
        matcher = GoldenSectionMatcher(family, (0.0, 2.0), objective="residual")
        schedule = KickSchedule.uniform(None, target, 1.0, 2, matcher=matcher)
        _, report = run_kicks(schedule, coherent4)
        for record in report.records:
            assert record.parameter == pytest.approx(0.7, abs=1e-6)
        assert report.final_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_report_rejects_invalid_fidelity(self):
        report = KickReport()
        with pytest.raises(ContractError):
            report.append(KickRecord(index=0, duration=0.1, residual=0.0, commutator_norm=0.0,
                                     running_fidelity=1.5))
        assert report.final_fidelity == 1.0


class TestConnectorTrotter:
    @pytest.fixture
    def setup(self, space3):
        target = build_oat(SpinChainParams(n_sites=3))
        sz = collective_spin("z", space3)
        o_operator = op_combine([(1.0, target), (0.6, sz)])
        return target, sz, o_operator

    def test_reproduces_target(self, setup, space3):
        target, _, o_operator = setup
        psi0 = basis_state(space3, 2)
        state = connector_trotter(o_operator, target, psi0, 1.7)
        exact = exact_evolve([target], 1.7, psi0)
        assert fidelity(state, exact) == pytest.approx(1.0, abs=1e-12)

    def test_trotterized_terms(self, setup, space3):
        target, sz, o_operator = setup
        psi0 = basis_state(space3, 6)
        state = connector_trotter(o_operator, target, psi0, 1.0, n=3, o_terms=[target, 0.6 * sz], order=2)
        assert fidelity(state, exact_evolve([target], 1.0, psi0)) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_commuting(self, setup, space3):
        target, _, _ = setup
        o_operator = op_combine([(1.0, target), (0.6, collective_spin("x", space3))])
        with pytest.raises(ContractError, match="O, H_T"):
            connector_trotter(o_operator, target, basis_state(space3, 0), 1.0)

    def test_rejects_non_eigenstate(self, setup, space3):
        target, _, o_operator = setup
        with pytest.raises(ContractError, match="고유상태"):
            connector_trotter(o_operator, target, coherent_x_state(space3), 1.0)

    def test_rejects_mismatched_terms(self, setup, space3):
        target, sz, o_operator = setup
        with pytest.raises(ContractError, match="o_terms"):
            connector_trotter(o_operator, target, basis_state(space3, 0), 1.0, o_terms=[target, sz])


def test_kick_duration_total_is_exact():
    target = build_oat(SpinChainParams(n_sites=2))
    schedule = KickSchedule.uniform(target, target, math.pi, 7)
    assert schedule.total_time == math.pi


def test_target_kicks_compose_for_any_partition(space3):
    target = build_oat(SpinChainParams(n_sites=3, chi=0.9))
    psi0 = coherent_x_state(space3)
    schedule = KickSchedule([(target, 0.1), (target, 0.55), (target, 0.35)], target)
    state, report = run_kicks(schedule, psi0)
    assert report.final_fidelity == pytest.approx(1.0, abs=1e-12)
    assert _distance(state, exact_evolve([target], 1.0, psi0)) < 1e-10
