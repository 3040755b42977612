from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vilenkin import FunctionSample, TowerError, forward, heisenberg, padic, sobolev_norm, vilenkin, vt_apply_direct, vt_apply_spectral, vt_symbol
from vilenkin.transform import lp_norm
from vilenkin.vladimirov import constant_order_eigenvalue, gamma, gamma_closed_form, gamma_partial

from conftest import DESK, random_values


def _gamma_partial_oracle(kappa, a, n):
    """Literal evaluation with Fractions: 1/k_{n-1}^(a+1) + sum_k |G_k/G_n|^-a (1 - 1/k_k)."""
    total = Fraction(1, kappa[n - 1] ** (a + 1))
    for k in range(n):
        ratio = 1
        for j in range(k, n):
            ratio *= kappa[j]
        total += Fraction(1, ratio**a) * (1 - Fraction(1, kappa[k]))
    return total


def test_gamma_examples():
    t = padic(3, 4)
    assert gamma_partial(t, 1, 1) == Fraction(1, 3)
    assert gamma_closed_form(3, 1) == Fraction(4, 9)
    g = gamma(t, 1)
    assert g.value == Fraction(4, 9)
    parts = [g.partials[n] for n in range(1, 5)]
    assert parts == sorted(parts) and parts[-1] < Fraction(4, 9)


def test_gamma_matches_oracle_on_mixed_orders():
    t = vilenkin([2, 5, 3, 4])
    for a in (1, 2):
        for n in range(1, 5):
            assert gamma_partial(t, a, n) == _gamma_partial_oracle(t.kappa, a, n)
    # first partial on [2, 5]: 1/2^2 + (1/2)(1 - 1/2)
    assert gamma_partial(vilenkin([2, 5]), 1, 1) == Fraction(1, 2)
    g = gamma(t, 1)
    assert g.closed_form is None and g.value == g.sup


def test_constant_order_eigenvalues_exact():
    sym = vt_symbol(padic(3, 3), 1)
    assert sym.eigenvalues[:3] == (0, Fraction(9, 4), Fraction(33, 4))
    for kappa, t in ((3, padic(3, 4)), (5, padic(5, 3)), (9, padic(3, 3, dim=2)), (27, heisenberg(3, 2))):
        for a in (1, 2):
            sym = vt_symbol(t, a)
            for n in range(1, t.depth + 1):
                assert sym.eigenvalues[n] == constant_order_eigenvalue(kappa, a, n)


@pytest.mark.parametrize("t", DESK, ids=lambda t: t.describe())
@pytest.mark.parametrize("a", [0.3, 1, 2])
def test_symbol_invariants(t, a):
    sym = vt_symbol(t, a)
    eig = sym.as_array()
    assert eig[0] == 0
    assert np.all(np.diff(eig) > 0)
    g = sym.gamma
    lo = min(float(v) for v in g.partials.values()) / float(g.value)
    for n in range(1, t.depth + 1):
        ratio = eig[n] / float(t.index(n)) ** a
        assert lo - 1e-12 <= ratio <= 1 + 1e-12


@pytest.mark.parametrize("t", DESK, ids=lambda t: t.describe())
@pytest.mark.parametrize("a", [0.3, 1, 2])
def test_direct_matches_spectral(t, a):
    for seed in range(10):
        f = FunctionSample(t, random_values(t, seed))
        d, s = vt_apply_direct(f, a), vt_apply_spectral(f, a)
        assert np.max(np.abs(d.values - s.values)) < 1e-9 * lp_norm(f, np.inf)


@pytest.mark.parametrize("t", [padic(3, 2), heisenberg(3, 1), vilenkin([2, 3, 4]), padic(3, 2, dim=2)], ids=lambda t: t.describe())
def test_pairwise_oracle(t):
    f = FunctionSample(t, random_values(t, 7))
    for a in (0.5, 1):
        ref = vt_apply_direct(f, a, method="pairwise")
        assert np.allclose(vt_apply_direct(f, a).values, ref.values, atol=1e-10)
        assert np.allclose(vt_apply_spectral(f, a).values, ref.values, atol=1e-10)


@pytest.mark.parametrize("t", [padic(3, 3), heisenberg(3, 2), padic(5, 2, dim=2)], ids=lambda t: t.describe())
def test_lie_mode(t):
    ell, dd = t.prime, t.lie_dim
    sym = vt_symbol(t, 1, mode="lie")
    shift = Fraction(ell**dd - 1, ell**dd) / (1 - Fraction(1, ell ** (1 + dd)))
    assert sym.eigenvalues[1] == ell - shift
    assert sym.bracket[0] == shift
    for n in range(1, t.depth + 1):
        # c I + D^1 has multiplier exactly l^n
        assert sym.bracket[0] + sym.eigenvalues[n] == sym.bracket[n] == ell**n
    f = FunctionSample(t, random_values(t, 3))
    for a in (0.5, 1, 2):
        d, s = vt_apply_direct(f, a, mode="lie"), vt_apply_spectral(f, a, mode="lie")
        assert np.max(np.abs(d.values - s.values)) < 1e-9 * lp_norm(f, np.inf)


def test_lie_mode_needs_lie_group():
    with pytest.raises(TowerError):
        vt_symbol(vilenkin([2, 3]), 1, mode="lie")
    with pytest.raises(ValueError):
        vt_symbol(padic(3, 2), 1, mode="other")


def test_indicator_example():
    t = padic(3, 3)
    f = FunctionSample(t, t.subgroup_mask(1).astype(float))
    want = np.where(t.subgroup_mask(1), 1.5, -0.75)
    for out in (vt_apply_direct(f, 1), vt_apply_spectral(f, 1), vt_apply_direct(f, 1, method="pairwise")):
        assert np.allclose(out.values, want, atol=1e-12)
    assert np.isclose(sobolev_norm(f, 1), np.sqrt(1 / 3 + 9 / 8))


def test_constants_annihilated():
    for t in DESK:
        one = FunctionSample(t, np.full(t.order, 4.0))
        assert np.allclose(vt_apply_direct(one, 1).values, 0, atol=1e-9)
        assert np.allclose(vt_apply_spectral(one, 0.3).values, 0, atol=1e-12)
        assert np.isclose(sobolev_norm(one, 1), 4.0)


def test_delta_on_z9():
    t = padic(3, 2)
    delta = np.zeros(9)
    delta[0] = 9
    f = FunctionSample(t, delta)
    sym = vt_symbol(t, 1).as_array()
    c = forward(f)
    recon = sum(float(sym[r.level]) * r.traces() * c[r][0, 0] for r in c.irreps)
    assert np.allclose(vt_apply_direct(f, 1).values, recon)


@pytest.mark.parametrize("t", DESK, ids=lambda t: t.describe())
def test_self_adjoint_and_positive(t):
    f = FunctionSample(t, random_values(t, 11))
    g = FunctionSample(t, random_values(t, 12))
    for a in (0.3, 1, 2):
        df, dg = vt_apply_spectral(f, a), vt_apply_spectral(g, a)
        lhs, rhs = np.vdot(g.values, df.values), np.vdot(dg.values, f.values)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))
        assert np.vdot(f.values, df.values).real >= -1e-9


@given(st.floats(0.05, 3.0), st.integers(0, 50))
def test_sobolev_dominates_l2(k, seed):
    t = heisenberg(3, 1)
    f = FunctionSample(t, random_values(t, seed))
    assert sobolev_norm(f, k) >= lp_norm(f, 2) - 1e-12


def test_errors():
    t = padic(3, 2)
    f = FunctionSample(t, np.ones(9))
    for bad in (0, -1):
        with pytest.raises(ValueError):
            gamma(t, bad)
        with pytest.raises(ValueError):
            vt_apply_direct(f, bad)
        with pytest.raises(ValueError):
            sobolev_norm(f, bad)
