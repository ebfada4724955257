import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyon_orbits import semiclassical as sc
from anyon_orbits.exact import enumerate_spectrum
from anyon_orbits.observables import OrientationSignature


def test_action_alpha_term_examples():
    assert sc.action_alpha_term(OrientationSignature.from_sequence(2, [1]), 0.3) == pytest.approx(2 * math.pi * 0.3)
    assert sc.action_alpha_term(OrientationSignature.from_sequence(4, [1] * 6), 0.0) == 0.0
    sig = OrientationSignature.from_sequence(3, [1, 1, -1])
    assert sc.action_alpha_term(sig, 0.4) == pytest.approx(2 * math.pi * 0.4)


def test_oscillator_action():
    assert sc.oscillator_action(1.0) == pytest.approx(2 * math.pi)
    assert sc.oscillator_action(0.0) == 0.0
    assert sc.oscillator_action(2.6) == pytest.approx(2 * sc.oscillator_action(1.3))
    with pytest.raises(ValueError):
        sc.oscillator_action(-1.0)


def test_slope_sets():
    assert sc.slope_set(2) == [-1, 1]
    assert sc.slope_set(3) == [-3, -1, 1, 3]
    assert sc.slope_set(4) == [-6, -4, -2, 0, 2, 4, 6]
    with pytest.raises(ValueError):
        sc.slope_set(1)


@pytest.mark.parametrize("n", range(2, 7))
def test_multiplicities(n):
    m = sc.n_pairs(n)
    mult = {s: sc.slope_multiplicity(n, s) for s in sc.slope_set(n)}
    assert sum(mult.values()) == 2**m
    assert mult == sc.slope_multiplicities_brute_force(n)
    assert len(sc.slope_set(n)) == m + 1
    assert sc.slope_set(n) == sorted(-s for s in sc.slope_set(n))
    assert sc.slope_multiplicity(n, m + 2) == 0 and sc.slope_multiplicity(n, m - 1) == 0


def test_two_particle_levels():
    lines = sc.semiclassical_levels(2, 0.25, 3)
    energies = sorted(ln.energy(0.25) for ln in lines)
    expected = sorted(n + s * 0.25 + 2 for n in range(4) for s in (-1, 1))
    assert energies == pytest.approx(expected)
    assert all(ln.multiplicity == 1 for ln in lines)


def test_levels_sorted_and_validated():
    lines = sc.semiclassical_levels(3, 0.3, 4)
    e = [ln.energy(0.3) for ln in lines]
    assert e == sorted(e)
    with pytest.raises(ValueError):
        sc.semiclassical_levels(3, 1.5, 4)
    with pytest.raises(ValueError):
        sc.semiclassical_levels(3, 0.5, -1)
    with pytest.raises(ValueError):
        sc.semiclassical_levels(3, 0.5, 2, offset="other")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_alpha_zero_collapse(n):
    col = sc.collapsed_levels(sc.semiclassical_levels(n, 0.0, 5), 0.0)
    c = n * (n - 1)
    assert [e for e, _ in col] == [k + c for k in range(6)]
    assert all(m == 2 ** sc.n_pairs(n) for _, m in col)


@given(n=st.integers(2, 5), k=st.integers(0, 20), a=st.floats(0, 1))
def test_linear_interpolation(n, k, a):
    for s in sc.slope_set(n):
        ln = sc.SemiclassicalLine(k, s, sc.slope_multiplicity(n, s), sc.energy_offset(n))
        assert ln.energy(1.0) - ln.energy(0.0) == s
        assert ln.energy(a) == pytest.approx((1 - a) * ln.energy(0.0) + a * ln.energy(1.0))


def test_offsets():
    assert sc.energy_offset(3) == 6
    assert sc.energy_offset(3, "relative") == 3


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5])
def test_two_particle_lines_on_exact_spectrum(alpha):
    levels = [e for e, _ in enumerate_spectrum(30, alpha)]
    ok, missing = sc.two_particle_lines_match_exact(alpha, 25, levels)
    assert ok, missing


def test_relative_offset_misses_exact_spectrum():
    levels = [e for e, _ in enumerate_spectrum(30, 0.25)]
    ok, missing = sc.two_particle_lines_match_exact(0.25, 25, levels, offset="relative")
    assert not ok and missing


def test_spectrum_table_rows():
    rows = sc.spectrum_table(3, [0.0, 0.5, 1.0], 2)
    assert len(rows) == 3 * 3 * 4
    assert {r[1] for r in rows} == {-3, -1, 1, 3}
    for n, s, m, a, e in rows:
        assert e == pytest.approx(n + a * s + 6)
