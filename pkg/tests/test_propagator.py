import numpy as np
import pytest

from core.errors import ContractError, DimensionError, NumericError, ParameterError
from core.hamiltonians import build_oat, build_xxx_staggered
from core.observables import expect
from core.spin_algebra import HilbertSpace, Operator, coherent_x_state, collective_spin, random_state
from models.spin_models import SpinChainParams
from providers.propagator import (
    DenseEigPropagator,
    KrylovPropagator,
    PropagatorBackend,
    PropagatorFactory,
    evolve,
    trajectory,
)


def _distance(a, b) -> float:
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def test_factory_picks_dense_for_small_chains(chain_params):
    h = build_xxx_staggered(chain_params)
    assert isinstance(PropagatorFactory.create(h), DenseEigPropagator)
    assert isinstance(PropagatorFactory.create(h, PropagatorBackend.KRYLOV), KrylovPropagator)
    assert isinstance(PropagatorFactory.create(h, "krylov"), KrylovPropagator)
    assert PropagatorFactory.get_available_backends() == {"dense_eig": True, "krylov": True}


def test_zero_time_returns_initial_state(chain_params, coherent4):
    prop = PropagatorFactory.create(build_xxx_staggered(chain_params))
    assert evolve(prop, coherent4, 0.0) is coherent4


def test_rejects_non_hermitian(space3):
    with pytest.raises(ContractError):
        PropagatorFactory.create(Operator(space3, np.triu(np.ones((8, 8), dtype=complex))))


def test_rejects_foreign_state(chain_params):
    prop = PropagatorFactory.create(build_xxx_staggered(chain_params))
    with pytest.raises(DimensionError):
        prop.evolve(coherent_x_state(HilbertSpace(3)), 1.0)


@pytest.mark.parametrize("seed", range(20))
def test_backends_agree_on_random_chains(seed):
    rng = np.random.default_rng(seed)
    n_sites = 2 + seed % 7
    params = SpinChainParams(n_sites=n_sites, alpha=float(rng.uniform(0, 3)), beta=float(rng.uniform(0, 3)))
    h = build_xxx_staggered(params)
    psi0 = random_state(h.space, rng)

    dense = PropagatorFactory.create(h, PropagatorBackend.DENSE_EIG)
    krylov = PropagatorFactory.create(h, PropagatorBackend.KRYLOV)
    for t in (0.3, 2.0, -1.5):
        assert _distance(dense.evolve(psi0, t), krylov.evolve(psi0, t)) < 1e-9


def test_evolution_composes(chain_params, coherent4):
    for backend in PropagatorBackend:
        prop = PropagatorFactory.create(build_xxx_staggered(chain_params), backend)
        two_steps = prop.evolve(prop.evolve(coherent4, 0.4), 0.9)
        assert _distance(two_steps, prop.evolve(coherent4, 1.3)) < 1e-9


def test_energy_and_norm_are_conserved(chain_params, coherent4):
    h = build_xxx_staggered(chain_params)
    prop = PropagatorFactory.create(h)
    energy0 = expect(h, coherent4)
    for psi in prop.evolve_many(coherent4, np.linspace(0.0, 5.0, 11)):
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)
        assert expect(h, psi) == pytest.approx(energy0, abs=1e-9)


def test_krylov_small_subspace_splits_time():
    params = SpinChainParams(n_sites=4, alpha=2.0, beta=1.0)
    h = build_xxx_staggered(params)
    psi0 = coherent_x_state(h.space)
    dense = DenseEigPropagator(h).evolve(psi0, 3.0)
    narrow = KrylovPropagator(h, max_dim=4).evolve(psi0, 3.0)
    assert _distance(dense, narrow) < 1e-6


def test_krylov_reports_residual_on_failure():
    params = SpinChainParams(n_sites=4, alpha=2.0, beta=1.0)
    h = build_xxx_staggered(params)
    prop = KrylovPropagator(h, tol=1e-14, max_dim=2, max_splits=0)
    with pytest.raises(NumericError, match="잔차"):
        prop.evolve(coherent_x_state(h.space), 50.0)


def test_krylov_settings_are_validated(chain_params):
    with pytest.raises(ParameterError):
        KrylovPropagator(build_xxx_staggered(chain_params), max_dim=1)


def test_oat_phases_match_closed_form(space4):
    params = SpinChainParams(n_sites=4, chi=0.7)
    psi0 = coherent_x_state(space4)
    state = PropagatorFactory.create(build_oat(params)).evolve(psi0, 1.1)
    m = collective_spin("z", space4).to_dense().diagonal().real
    expected = np.exp(-1j * 1.1 * 0.7 * m ** 2) * psi0.amplitudes
    assert np.allclose(state.amplitudes, expected, atol=1e-12)


class TestTrajectory:
    def test_records_and_snapshots(self, chain_params, coherent4):
        prop = PropagatorFactory.create(build_xxx_staggered(chain_params))
        times = np.linspace(0.0, 1.0, 5)
        sx = collective_spin("x", coherent4.space)
        traj = trajectory(prop, coherent4, times, [("Sx", sx)], snapshot_marks=[0, 4])

        assert traj.labels == ["Sx"]
        assert traj.series("Sx")[0] == pytest.approx(2.0)
        assert set(traj.snapshots) == {0, 4}
        assert _distance(traj.snapshots[4], prop.evolve(coherent4, 1.0)) < 1e-12

    def test_rejects_bad_marks_and_observables(self, chain_params, coherent4):
        prop = PropagatorFactory.create(build_xxx_staggered(chain_params))
        sx = collective_spin("x", coherent4.space)
        with pytest.raises(ParameterError):
            trajectory(prop, coherent4, [0.0, 1.0], [("Sx", sx)], snapshot_marks=[2])
        with pytest.raises(ContractError):
            trajectory(prop, coherent4, [0.0, 1.0], [("A", 1j * sx)])
        with pytest.raises(ParameterError):
            trajectory(prop, coherent4, [1.0, 0.0], [("Sx", sx)])


def test_two_site_oat_sx_is_cosine():
    space = HilbertSpace(2)
    prop = PropagatorFactory.create(build_oat(SpinChainParams(n_sites=2)))
    sx = collective_spin("x", space)
    psi0 = coherent_x_state(space)
    for t in (0.3, 1.1, 2.5):
        assert expect(sx, evolve(prop, psi0, t)) == pytest.approx(np.cos(t), abs=1e-12)


def test_staggered_chain_conserves_sz(coherent4):
    params = SpinChainParams(n_sites=4, alpha=1.3, beta=0.7)
    prop = PropagatorFactory.create(build_xxx_staggered(params))
    sz = collective_spin("z", coherent4.space)
    traj = trajectory(prop, coherent4, np.linspace(0.0, 3.0, 7), [("Sz", sz)])
    assert np.allclose(traj.series("Sz"), 0.0, atol=1e-9)
