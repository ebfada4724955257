import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyon_orbits.symplectic import (
    PhasePoint,
    Ti,
    Tij,
    basis_generators,
    basis_labels,
    basis_rank,
    build_basis_blocks,
    build_generator,
    check_group_element,
    check_orthosymplectic,
    composite,
    group_element,
    one_parameter_action,
    poisson_bracket_quadratic,
    projector_of,
    symplectic_form,
)

LAMBDA = symplectic_form(1).full


def test_u2_is_time_evolution_block():
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], float)
    assert np.array_equal(build_basis_blocks().u(2), expected)


def test_u1_is_real_rotation():
    r = np.array([[0, 1], [-1, 0]], float)
    u1 = build_basis_blocks().u(1)
    assert np.array_equal(u1[:2, :2], r) and np.array_equal(u1[2:, 2:], r)
    assert not u1[:2, 2:].any()


@pytest.mark.parametrize("k", range(1, 5))
def test_u_blocks_antisymmetric_and_commute(k):
    u = build_basis_blocks().u(k)
    assert np.array_equal(u.T, -u)
    assert np.allclose(u @ LAMBDA, LAMBDA @ u)


@pytest.mark.parametrize("k", range(1, 9))
def test_v_blocks_commute_with_lambda(k):
    v = build_basis_blocks().v(k)
    assert np.allclose(v @ LAMBDA - LAMBDA @ v, 0)


def test_single_block_generator_is_u2():
    g = build_generator(Ti(2, 1), 1)
    assert np.array_equal(g.matrix, build_basis_blocks().u(2))


def test_pair_generator_blocks():
    g = build_generator(Tij(1, 1, 2), 2)
    assert np.array_equal(g.block(1, 2), np.eye(4))
    assert np.array_equal(g.block(2, 1), -np.eye(4))
    assert not g.block(1, 1).any() and not g.block(2, 2).any()


@pytest.mark.parametrize(
    "label,n",
    [(Ti(0, 1), 2), (Ti(5, 1), 2), (Ti(1, 3), 2), (Tij(9, 1, 2), 2), (Tij(1, 2, 1), 2), (Tij(1, 1, 3), 2)],
)
def test_build_generator_rejects_bad_indices(label, n):
    with pytest.raises((ValueError, IndexError)):
        build_generator(label, n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_every_basis_generator_is_orthosymplectic(n):
    gens = basis_generators(n)
    assert len(gens) == 4 * n + 8 * n * (n - 1) // 2 == 4 * n * n
    for g in gens:
        assert check_orthosymplectic(g)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_basis_rank_is_4n_squared(n):
    assert basis_rank(n) == 4 * n * n


def test_check_u2_exact():
    res = check_orthosymplectic(build_basis_blocks().u(2))
    assert res.ok and res.residual == 0.0


def test_check_rejects_symmetric_perturbation():
    m = build_basis_blocks().u(2).copy()
    m[0, 1] += 1e-3
    m[1, 0] += 1e-3
    assert not check_orthosymplectic(m)


def test_check_dimension_mismatch():
    with pytest.raises(ValueError):
        check_orthosymplectic(np.zeros((4, 4)), symplectic_form(2))
    with pytest.raises(ValueError):
        check_orthosymplectic(np.zeros((4, 3)))


def test_random_combination_is_in_algebra(rng):
    gens = basis_generators(3)
    m = sum(c * g.matrix for c, g in zip(rng.normal(size=len(gens)), gens))
    assert check_orthosymplectic(m)


def test_zero_sigma_is_identity(rng):
    w = PhasePoint(2, rng.normal(size=8))
    for g in basis_generators(2):
        assert np.array_equal(one_parameter_action(g, 0.0, w).coords, w.coords)


def test_u2_full_period_returns():
    w = PhasePoint(1, np.array([0.3, -1.2, 0.7, 0.1]))
    moved = one_parameter_action(build_generator(Ti(2, 1), 1), 2 * np.pi, w)
    assert np.allclose(moved.coords, w.coords, atol=1e-10)


@pytest.mark.parametrize("label", list(basis_labels(3)))
def test_closed_form_matches_expm(label):
    g = build_generator(label, 3)
    assert projector_of(g) is not None
    a = group_element(g, 0.7, "closed")
    b = group_element(g, 0.7, "expm")
    assert np.max(np.abs(a - b)) < 1e-10


def test_closed_form_refused_for_generic_composite(rng):
    gens = basis_generators(2)
    t = composite(sum(c * g.matrix for c, g in zip(rng.normal(size=len(gens)), gens)), 2)
    assert projector_of(t) is None
    with pytest.raises(ValueError):
        group_element(t, 0.3, "closed")
    assert check_group_element(group_element(t, 0.3))


def test_unknown_method():
    with pytest.raises(ValueError):
        group_element(np.zeros((4, 4)), 1.0, "taylor")


def test_particle_count_mismatch():
    with pytest.raises(ValueError):
        one_parameter_action(build_generator(Ti(1, 1), 2), 0.1, PhasePoint(1, np.ones(4)))


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint(2, np.ones(4))
    with pytest.raises(ValueError):
        PhasePoint(1, np.array([0, 0, np.nan, 0]))
    with pytest.raises(ValueError):
        PhasePoint.from_array(np.ones(5))
    assert PhasePoint.from_array(np.ones(8)).n_particles == 2


def test_phase_point_is_immutable():
    w = PhasePoint(1, np.ones(4))
    with pytest.raises(ValueError):
        w.coords[0] = 2.0


def test_bracket_of_self_vanishes(rng):
    a = rng.normal(size=(8, 8))
    a = a + a.T
    assert np.allclose(poisson_bracket_quadratic(a, a), 0)


def test_bracket_with_hamiltonian_vanishes_for_commuting_b(rng):
    om = symplectic_form(2).full
    # block-diagonal sigma_3 on positions and momenta: symmetric and commutes with Omega
    v = build_basis_blocks().v(4)
    b = np.kron(np.eye(2), v)
    assert np.allclose(b, b.T) and np.allclose(b @ om, om @ b)
    assert np.allclose(poisson_bracket_quadratic(np.eye(8), b), 0)


def test_bracket_is_symmetric(rng):
    a = rng.normal(size=(8, 8))
    b = rng.normal(size=(8, 8))
    c = poisson_bracket_quadratic(a + a.T, b + b.T)
    assert np.allclose(c, c.T)


def test_bracket_rejects_asymmetric():
    with pytest.raises(ValueError):
        poisson_bracket_quadratic(np.triu(np.ones((4, 4))), np.eye(4))


sigmas = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
seeds = st.integers(0, 2**32 - 1)


@given(seed=seeds, n=st.integers(1, 4), s=st.floats(0, 2 * np.pi, allow_nan=False, exclude_max=True))
def test_group_elements_stay_in_group(seed, n, s):
    r = np.random.default_rng(seed)
    gens = basis_generators(n)
    g = gens[int(r.integers(len(gens)))]
    assert check_group_element(group_element(g, s))


@given(seed=seeds, n=st.integers(1, 4))
def test_periodicity(seed, n):
    r = np.random.default_rng(seed)
    gens = basis_generators(n)
    g = gens[int(r.integers(len(gens)))]
    w = r.normal(size=4 * n)
    assert np.max(np.abs(group_element(g, 2 * np.pi) @ w - w)) < 1e-10


@given(seed=seeds, n=st.integers(1, 3), s1=sigmas, s2=sigmas)
def test_group_law_and_energy(seed, n, s1, s2):
    r = np.random.default_rng(seed)
    gens = basis_generators(n)
    g = gens[int(r.integers(len(gens)))]
    w = r.normal(size=4 * n)
    lhs = group_element(g, s1) @ (group_element(g, s2) @ w)
    rhs = group_element(g, s1 + s2) @ w
    assert np.max(np.abs(lhs - rhs)) < 1e-10
    assert abs(rhs @ rhs - w @ w) / (w @ w) < 1e-10


@given(seed=seeds)
def test_composite_flow_conserves_energy(seed):
    r = np.random.default_rng(seed)
    gens = basis_generators(2)
    t = sum(c * g.matrix for c, g in zip(r.normal(size=len(gens)), gens))
    w = r.normal(size=8)
    moved = group_element(t, 0.4) @ w
    assert abs(moved @ moved - w @ w) / (w @ w) < 1e-10
