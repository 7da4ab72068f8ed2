import numpy as np
import pytest
import scipy.sparse as sp

from core.errors import ContractError, DimensionError, ParameterError, SiteIndexError
from core.spin_algebra import (
    HilbertSpace,
    Operator,
    StateVector,
    basis_state,
    coherent_x_state,
    collective_spin,
    ghz_state,
    identity,
    magnetization_values,
    op_combine,
    op_power,
    op_product,
    pauli_site,
    product_state,
    random_state,
)


def test_hilbert_space_limits():
    assert HilbertSpace(3).dim == 8
    with pytest.raises(ParameterError):
        HilbertSpace(0)
    with pytest.raises(ParameterError):
        HilbertSpace(15)
    with pytest.raises(ParameterError):
        HilbertSpace(True)


def test_site_one_is_most_significant_bit(space3):
    diagonal = pauli_site("z", 1, space3).to_dense().diagonal().real
    # 인덱스 4 = |↓↑↑>
    assert diagonal[0] == 1.0
    assert diagonal[3] == 1.0
    assert diagonal[4] == -1.0

    last = pauli_site("z", 3, space3).to_dense().diagonal().real
    assert last[1] == -1.0


def test_pauli_site_index_range(space3):
    with pytest.raises(SiteIndexError):
        pauli_site("x", 0, space3)
    with pytest.raises(SiteIndexError):
        pauli_site("x", 4, space3)
    with pytest.raises(ParameterError):
        pauli_site("w", 1, space3)


def test_magnetization_values(space3):
    values = magnetization_values(space3)
    assert values[0] == 1.5
    assert values[-1] == -1.5
    assert sorted(set(values)) == [-1.5, -0.5, 0.5, 1.5]


def test_su2_commutation(space3):
    sx, sy, sz = (collective_spin(axis, space3).to_dense() for axis in "xyz")
    assert np.allclose(sx @ sy - sy @ sx, 1j * sz)
    assert np.allclose(sy @ sz - sz @ sy, 1j * sx)
    assert np.allclose(sz @ sx - sx @ sz, 1j * sy)


def test_coherent_x_is_maximal_sx_eigenstate(space4):
    psi = coherent_x_state(space4)
    sx = collective_spin("x", space4)
    assert np.allclose(sx.apply(psi.amplitudes), 2.0 * psi.amplitudes)
    assert np.allclose(product_state(space4, "x", 1).amplitudes, psi.amplitudes)


def test_casimir_on_coherent_state(space4):
    psi = coherent_x_state(space4)
    s = 2.0
    total = sum(op_product(op, op).to_dense() for op in (collective_spin(a, space4) for a in "xyz"))
    assert np.vdot(psi.amplitudes, total @ psi.amplitudes).real == pytest.approx(s * (s + 1))


def test_ghz_state_z_branches(space3):
    psi = ghz_state(space3, "z")
    expected = np.zeros(8, dtype=complex)
    expected[0] = expected[-1] = 1 / np.sqrt(2)
    assert np.allclose(psi.amplitudes, expected)

    phased = ghz_state(space3, "z", relative_phase=np.pi)
    assert phased.amplitudes[-1] == pytest.approx(-1 / np.sqrt(2))


def test_state_vector_contracts(space3):
    with pytest.raises(ContractError):
        StateVector(space3, np.ones(8))
    with pytest.raises(DimensionError):
        StateVector(space3, np.array([1.0, 0.0]))
    with pytest.raises(ParameterError):
        StateVector.from_amplitudes(space3, np.zeros(8))

    psi = basis_state(space3, 2)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1.0


def test_random_state_is_normalized(space4, rng):
    psi = random_state(space4, rng)
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_hermitian_flag_is_checked(space3):
    upper = sp.csr_matrix(([1.0], ([0], [1])), shape=(8, 8), dtype=complex)
    with pytest.raises(ContractError):
        Operator(space3, upper, hermitian=True)
    assert not Operator(space3, upper).hermitian


def test_operator_shape_is_checked(space3):
    with pytest.raises(DimensionError):
        Operator(space3, np.eye(4))


def test_op_combine_and_arithmetic(space3):
    sz = collective_spin("z", space3)
    doubled = sz + sz
    assert doubled.hermitian
    assert np.allclose(doubled.to_dense(), 2 * sz.to_dense())
    assert (sz - sz).max_abs() == 0.0
    assert not (1j * sz).hermitian

    with pytest.raises(DimensionError):
        op_combine([(1.0, sz), (1.0, collective_spin("z", HilbertSpace(2)))])
    with pytest.raises(ParameterError):
        op_combine([])


def test_op_power(space3):
    sz = collective_spin("z", space3)
    squared = op_power(sz, 2)
    assert np.allclose(squared.to_dense().diagonal(), magnetization_values(space3) ** 2)
    assert np.allclose(op_power(sz, 0).to_dense(), identity(space3).to_dense())
    with pytest.raises(ParameterError):
        op_power(sz, -1)


def test_overlap_requires_same_space(space3):
    with pytest.raises(DimensionError):
        coherent_x_state(space3).overlap(coherent_x_state(HilbertSpace(2)))


def test_pauli_site_two_spin_example():
    assert np.allclose(pauli_site("z", 2, HilbertSpace(2)).to_dense(), np.diag([1, -1, 1, -1]))
    assert np.allclose(collective_spin("z", HilbertSpace(2)).to_dense(), np.diag([1, 0, 0, -1]))


@pytest.mark.parametrize("n_sites", [1, 3, 6])
def test_pauli_sites_are_involutions(n_sites):
    space = HilbertSpace(n_sites)
    eye = np.eye(space.dim)
    for kind in "xyz":
        for site in range(1, n_sites + 1):
            sigma = pauli_site(kind, site, space)
            assert sigma.matrix.nnz == space.dim
            assert np.array_equal(op_product(sigma, sigma).to_dense(), eye)


def test_different_sites_commute(rng):
    for _ in range(20):
        n = int(rng.integers(2, 7))
        space = HilbertSpace(n)
        i, j = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        a, b = rng.choice(list("xyz"), size=2)
        left = pauli_site(str(a), int(i), space)
        right = pauli_site(str(b), int(j), space)
        difference = op_product(left, right).to_dense() - op_product(right, left).to_dense()
        assert np.abs(difference).max() <= 1e-12


def test_sz_spectrum_multiplicities():
    values, counts = np.unique(magnetization_values(HilbertSpace(4)), return_counts=True)
    assert values.tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]
    assert counts.tolist() == [1, 4, 6, 4, 1]


def test_x_axis_ghz_in_z_basis():
    psi = ghz_state(HilbertSpace(2), "x")
    expected = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
    assert abs(np.vdot(expected, psi.amplitudes)) == pytest.approx(1.0)
