import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vilenkin import (
    DegenerateWindow,
    FunctionSample,
    TowerError,
    condition_a_constant,
    element,
    forward,
    generate_function,
    heisenberg,
    heisenberg_witnesses,
    lipschitz_fit,
    modulus,
    padic,
    platonov_check,
    tail_sum,
    titchmarsh_first_check,
    titchmarsh_second_check,
    translate,
    vilenkin,
)
from vilenkin.regularity import (
    abelian_witnesses,
    condition_a_scan,
    dini_lipschitz_check,
    fit_decay,
    modulus_table,
    tail_table,
    translation_norms,
)
from vilenkin.transform import lp_norm

from conftest import DESK, random_values


def _brute_modulus(f, n, p):
    t = f.tower
    best = 0.0
    for idx in np.flatnonzero(t.subgroup_mask(n)):
        h = element(t, *t.coords[idx])
        best = max(best, lp_norm(translate(f, h) - f, p))
    return best


def indicator(t, m):
    return FunctionSample(t, t.subgroup_mask(m).astype(float))


@pytest.mark.parametrize("t", [padic(3, 3), heisenberg(3, 1), vilenkin([2, 3, 4]), padic(3, 2, dim=2)], ids=lambda t: t.describe())
@pytest.mark.parametrize("p", [1, 1.5, 2, np.inf])
def test_modulus_matches_brute_force(t, p):
    f = FunctionSample(t, random_values(t, 0))
    for n in range(t.depth):
        assert math.isclose(modulus(f, n, p), _brute_modulus(f, n, p), rel_tol=1e-9, abs_tol=1e-12)


@pytest.mark.parametrize("t", DESK, ids=lambda t: t.describe())
def test_fourier_route_matches_direct(t):
    f = FunctionSample(t, random_values(t, 1))
    assert np.allclose(translation_norms(f, 2, "fourier"), translation_norms(f, 2, "direct"), atol=1e-9)


def test_modulus_examples():
    t = padic(3, 3)
    f = indicator(t, 1)
    assert math.isclose(modulus(f, 0), math.sqrt(2 / 3))
    assert modulus(f, 1) == 0
    assert modulus(FunctionSample(t, np.full(27, 2.0)), 0) < 1e-12
    with pytest.raises(TowerError):
        modulus(f, 3)


def test_tail_examples():
    t = padic(3, 3)
    c = forward(indicator(t, 1))
    assert math.isclose(tail_sum(c, 0), 2 / 9)
    assert abs(tail_sum(c, 1)) < 1e-15
    assert tail_sum(forward(FunctionSample(t, np.ones(27))), 0) < 1e-28
    with pytest.raises(TowerError):
        tail_sum(c, 4)


@pytest.mark.parametrize("t", [padic(3, 4), heisenberg(3, 2), vilenkin([2, 3, 4, 5])], ids=lambda t: t.describe())
def test_indicator_identities_exact(t):
    for m in range(t.depth):
        f = indicator(t, m)
        om, tails = modulus_table(f), tail_table(forward(f))
        g_m = Fraction(1, t.index(m))
        for n in range(t.depth):
            want_om2 = 2 * g_m if n < m else Fraction(0)
            want_tail = g_m * (1 - Fraction(t.index(n), t.index(m))) if n < m else Fraction(0)
            assert abs(om[n] ** 2 - float(want_om2)) < 1e-12
            assert abs(tails[n] - float(want_tail)) < 1e-12


def test_sharpness_ratio():
    t = padic(3, 8)
    n = 0
    ratios = []
    for m in range(1, t.depth):
        rep = platonov_check(indicator(t, m))
        want = math.sqrt(1 - t.index(n) / t.index(m)) / math.sqrt(2)
        assert math.isclose(rep.table.ratio[n], want, rel_tol=1e-9)
        ratios.append(rep.table.ratio[n])
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert 1 / math.sqrt(2) - ratios[-1] < 0.02


@pytest.mark.parametrize("t", DESK, ids=lambda t: t.describe())
def test_platonov_random(t):
    for seed in range(20):
        rep = platonov_check(FunctionSample(t, random_values(t, seed)))
        assert rep.passed, rep.violations


@pytest.mark.parametrize("t", DESK, ids=lambda t: t.describe())
def test_modulus_and_tail_monotone(t):
    f = FunctionSample(t, random_values(t, 3))
    om = modulus_table(f, 1.5)
    assert np.all(np.diff(om) <= 1e-12)
    tails = tail_table(forward(f))
    assert np.all(np.diff(tails) <= 1e-12) and tails[-1] == 0


@given(st.integers(0, 10_000), st.sampled_from([1.0, 2.0, 3.0, np.inf]))
def test_modulus_monotone_property(seed, p):
    t = padic(3, 3)
    om = modulus_table(FunctionSample(t, random_values(t, seed)), p)
    assert np.all(np.diff(om) <= 1e-12)


def test_radial_lipschitz_orders():
    t = padic(3, 8)
    f = generate_function(t, {"family": "radial", "params": {"alpha": 1}})
    assert abs(lipschitz_fit(f, np.inf).alpha - 1.0) < 1e-9
    # the L^p modulus of |x|^a picks up the measure of the ball: order a + 1/p
    assert abs(lipschitz_fit(f, 2).alpha - 1.5) < 0.1
    assert abs(lipschitz_fit(f, 1).alpha - 2.0) < 0.15


def test_degenerate_window():
    t = padic(3, 4)
    with pytest.raises(DegenerateWindow):
        lipschitz_fit(indicator(t, 1))
    with pytest.raises(DegenerateWindow):
        dini_lipschitz_check(indicator(t, 1), 0.5, 1)
    with pytest.raises(DegenerateWindow):
        fit_decay(t, [1.0, 0.5, 0.2, 0.1, 0.0], log_power=True)


def test_fit_recovers_synthetic_exponents():
    t = padic(3, 10)
    x = np.asarray(t.indices[:-1], dtype=float)
    fit = fit_decay(t, 2.0 * x**-0.7)
    assert abs(fit.alpha - 0.7) < 1e-12 and fit.residual < 1e-12
    y = x[1:] ** -0.5 * np.log(x[1:]) ** 1.3
    fit2 = fit_decay(t, np.concatenate([[np.nan], y]), log_power=True)
    assert abs(fit2.alpha - 0.5) < 1e-9 and abs(fit2.nu - 1.3) < 1e-9


def test_titchmarsh_second_examples():
    t = padic(3, 8)
    f = generate_function(t, {"family": "random_fourier", "params": {"alpha": 1.0}, "seed": 0})
    rep = titchmarsh_second_check(f, 1.0)
    assert rep.passed
    assert abs(rep.modulus_fit.alpha - 1) < 0.15 and abs(rep.tail_fit.alpha / 2 - 1) < 0.15
    with pytest.raises(ValueError):
        titchmarsh_second_check(f, 1.5)


def test_radial_half_tail_exponent():
    # |x|^(1/2) has omega_2 ~ |G_n|^(1/2 + 1/2): the tail exponent over two tracks that order
    t = padic(3, 8)
    f = generate_function(t, {"family": "radial", "params": {"alpha": 0.5}})
    rep = titchmarsh_second_check(f, 0.5)
    assert abs(rep.tail_fit.alpha / 2 - 1.0) < 0.15
    assert rep.passed


def test_titchmarsh_first_basics():
    t = padic(3, 6)
    const = FunctionSample(t, np.ones(t.order))
    rep = titchmarsh_first_check(const, 2, 0.7, 0.5)
    assert np.all(rep.s_table == 0)
    f = generate_function(t, {"family": "random_fourier", "params": {"alpha": 0.5}, "seed": 1})
    rep = titchmarsh_first_check(f, 2, 0.7, 0.5)
    assert abs(rep.s_slope - 1.0) < 0.15
    assert rep.thresholds["beta_fourier"] == 1.0
    assert math.isclose(rep.thresholds["beta_sobolev"], 2 / ((0.5 - 0.7) * 2 + 1))
    for bad in ((2.5, 0.7, 0.5), (2, 0.4, 0.5), (2, 1.1, 0.5), (1.0, 0.7, 0.5)):
        with pytest.raises(ValueError):
            titchmarsh_first_check(f, *bad)


def test_condition_a_abelian_oracle():
    t = padic(3, 3)
    got = condition_a_constant(t, 1, [element(t, 3)])
    want = min(abs(cmath.exp(2j * cmath.pi * 3 * xi / 27) - 1) ** 2 * (t.index(3 - _val(xi)) / 3) ** 2 for xi in range(1, 27) if 3 - _val(xi) > 1)
    assert math.isclose(got, want, rel_tol=1e-12)
    assert got > 0


def _val(xi):
    v = 0
    while xi % 3 == 0 and v < 3:
        xi //= 3
        v += 1
    return v


@pytest.mark.parametrize("t", [padic(3, 5), padic(5, 3), padic(7, 2)], ids=lambda t: t.describe())
def test_condition_a_chord_bound(t):
    for row in condition_a_scan(t):
        big_m = t.prime ** (t.depth - row["k"])
        assert row["c"] >= (2 * math.sin(math.pi / big_m) * big_m) ** 2 - 1e-9 or row["c"] >= 16


def test_condition_a_validation():
    t = padic(3, 3)
    with pytest.raises(TowerError):
        condition_a_constant(t, 1, [element(t, 1)])
    with pytest.raises(TowerError):
        condition_a_constant(t, 1, [element(t, 0)])
    with pytest.raises(ValueError):
        condition_a_constant(t, 1, [])


def test_heisenberg_witnesses():
    t = heisenberg(3, 2)
    h1, h2 = heisenberg_witnesses(t, 1)
    assert h1.coords == (3, 3, 0) and h2.coords == (0, 0, 3)
    assert [h.coords for h in heisenberg_witnesses(t, 0)] == [(1, 1, 0), (0, 0, 1)]
    with pytest.raises(TowerError):
        heisenberg_witnesses(t, 2)
    with pytest.raises(TowerError):
        heisenberg_witnesses(padic(3, 2), 0)
    with pytest.raises(TowerError):
        abelian_witnesses(t, 0)


def test_diagonal_witness_pair_misses_antidiagonal_characters():
    # the character (xi, eta) = (1/9, 2/9) is nontrivial on G_1 yet fixed by (3, 3, 0) and (0, 0, 3)
    t = heisenberg(3, 2)
    assert condition_a_constant(t, 1, heisenberg_witnesses(t, 1)) == 0
    for k in range(t.depth):
        assert condition_a_constant(t, k, heisenberg_witnesses(t, k, separate=True)) > 0


def test_separate_witnesses_positive_on_larger_towers():
    for t in (heisenberg(5, 2), heisenberg(3, 3)):
        for k in range(t.depth):
            assert condition_a_constant(t, k, heisenberg_witnesses(t, k, separate=True)) > 0
