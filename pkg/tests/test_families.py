import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyon_orbits import families
from anyon_orbits.observables import OrientationSignature, angular_momentum, energy, orientation_signature
from anyon_orbits.symplectic import PhasePoint, basis_generators, build_basis_blocks, composite

seeds = st.integers(0, 2**32 - 1)
U = build_basis_blocks()


def test_connect_trivial_target():
    w = PhasePoint(1, np.array([1.0, 0.2, -0.1, 0.8]))
    path = families.connect_same_sign(w, angular_momentum(w, 1))
    assert path.sigma_hat == pytest.approx(0.0, abs=1e-12)


def test_connect_low_to_high():
    w = np.array([1.0, 0.0, math.sqrt(0.96), 0.2])
    start = PhasePoint(1, w)
    assert energy(start) == pytest.approx(1.0)
    assert angular_momentum(start, 1) == pytest.approx(0.2)
    path = families.connect_same_sign(start, 0.9)
    assert path.single_signed() and path.min_abs_j > 0
    assert len(path.samples) >= 200
    assert abs(angular_momentum(path.end, 1) - 0.9) < 1e-8
    gen = families.mixing_generator(path.beta_hat)
    dense = np.linspace(0, path.sigma_hat, 2001)
    vals = [angular_momentum(PhasePoint(1, families.group_element(gen, x) @ w), 1) for x in dense]
    assert min(vals) > 0
    assert families.connection_consistent_with_transport(path)


def test_connect_rejects_opposite_sign():
    w = np.array([1.0, 0.0, 0.0, 0.5])
    with pytest.raises(ValueError):
        families.connect_same_sign(PhasePoint(1, w), -0.5)


def test_connect_rejects_beyond_energy():
    with pytest.raises(ValueError):
        families.connect_same_sign(PhasePoint(1, np.array([1.0, 0.0, 0.0, 0.5])), 5.0)


@given(seed=seeds, frac=st.floats(0.01, 0.99))
def test_connections_keep_sign(seed, frac):
    w = PhasePoint(1, np.random.default_rng(seed).normal(size=4))
    j0 = angular_momentum(w, 1)
    target = math.copysign(frac * energy(w), j0)
    path = families.connect_same_sign(w, target)
    assert path.single_signed()
    assert abs(angular_momentum(path.end, 1) - target) < 1e-8


@pytest.mark.parametrize("n,expected", [(2, 2), (3, 8), (4, 64)])
def test_catalog_counts(n, expected):
    cat = families.enumerate_orientation_classes(n)
    assert cat.count == cat.expected == expected
    assert families.verify_catalog(cat) == []
    for c in cat.classes:
        sig = orientation_signature(c.representative)
        assert isinstance(sig, OrientationSignature)
        assert sig.as_tuple() == c.signature.as_tuple()


def test_two_particle_classes():
    cat = families.enumerate_orientation_classes(2)
    assert sorted(c.signature.as_tuple() for c in cat.classes) == [(-1,), (1,)]
    assert not cat.count_is_lower_bound


@pytest.mark.parametrize("n,count", [(2, 2), (3, 8), (4, 46)])
def test_concentric_reach_is_frozen(n, count):
    # concentric circles cannot produce every sign pattern once N >= 4
    cat = families.enumerate_orientation_classes(n)
    assert cat.concentric_count == count
    assert len(cat.unrealized_by_concentric) == cat.expected - count


def test_catalog_range():
    for n in (1, 7):
        with pytest.raises(ValueError):
            families.enumerate_orientation_classes(n)


def test_catalog_json_round_trip():
    doc = json.loads(families.enumerate_orientation_classes(3).to_json())
    assert doc["count"] == 8 and doc["count_is_lower_bound"]
    assert all(len(c["representative"]) == 12 for c in doc["classes"])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_invariant_subgroup_dimension(n):
    basis = families.invariant_subgroup_basis(n)
    assert basis.dimension == 6
    assert families.same_span(basis, families.derive_invariant_subalgebra(n))


def test_invariant_members_preserve_zero_crossings(rng):
    for g in families.invariant_subgroup_basis(3).generators:
        assert families.zero_crossing_violation(g, rng, 30) < 1e-9


def test_block_diagonal_u3_fails(rng):
    g = families.block_diagonal_generator(U.u(3), 2)
    assert families.zero_crossing_violation(g, rng, 30) > 1e-3


def test_all_blocks_u3_passes(rng):
    g = families.all_blocks_generator(U.u(3), 2)
    assert families.zero_crossing_violation(g, rng, 30) < 1e-9


def test_completeness_rotation_and_hamiltonian(rng):
    w = PhasePoint(1, rng.normal(size=4))
    assert families.completeness_probe(composite(U.u(1), 1), w).complete
    assert families.completeness_probe(composite(U.u(2), 1), w).complete
    w3 = PhasePoint(3, rng.normal(size=12))
    h = families.block_diagonal_generator(U.u(2), 3)
    assert families.completeness_probe(h, w3).complete


@pytest.mark.parametrize("k", [3, 4])
def test_completeness_u3_u4_hits_coincidence(k, rng):
    t = composite(U.u(k), 1)
    shifted, s_c = families.delta_reaching_point(t, PhasePoint(1, rng.normal(size=4)))
    res = families.completeness_probe(t, shifted)
    assert res.status == "hits_delta"
    w = PhasePoint(1, families.group_element(t, res.sigma_star) @ shifted.coords)
    assert np.linalg.norm(w.position(1)) < 1e-9 * max(1.0, np.linalg.norm(shifted.coords))
    before = angular_momentum(PhasePoint(1, families.group_element(t, res.sigma_star - 1e-3) @ shifted.coords), 1)
    after = angular_momentum(PhasePoint(1, families.group_element(t, res.sigma_star + 1e-3) @ shifted.coords), 1)
    assert before * after < 0


@pytest.mark.parametrize("n", [1, 2])
def test_transitivity_evidence(n):
    assert max(families.transitivity_evidence(n, n_pairs=3, seed=3)) < 1e-9


def test_transitivity_needs_equal_energy():
    a = PhasePoint(1, np.ones(4))
    b = PhasePoint(1, 2 * np.ones(4))
    with pytest.raises(ValueError):
        families.connect_by_basis_actions(a, b, np.random.default_rng(0))


def test_segment_sign_check_is_exact():
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=12), rng.normal(size=12)
    s = np.linspace(0, 1, 4001)
    sampled = True
    for x in s:
        sig = orientation_signature(PhasePoint(3, a + x * (b - a)))
        ref = orientation_signature(PhasePoint(3, a))
        if not isinstance(sig, OrientationSignature) or sig.as_tuple() != ref.as_tuple():
            sampled = False
            break
    assert families._segment_keeps_signs(a, b, 3) == sampled


def test_connectivity_evidence_reports_counts():
    ev = families.class_connectivity_evidence(3, n_points=200, n_pairs=50, seed=2)
    assert ev.pairs_tested == 50 == ev.straight + ev.via_one_stop + ev.unresolved
    assert sum(ev.per_class.values()) == 50
    assert set(ev.to_dict()) >= {"straight", "via_one_stop", "unresolved"}
