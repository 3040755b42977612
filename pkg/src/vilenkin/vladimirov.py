"""Group Gamma function and the Vladimirov-Taibleson operator.

Two normalizations are provided.  ``mode="group"`` is

    D^a f(x) = -1/Gamma(a) int_G (f(x y^-1) - f(x)) / |y|^(a+1) dy

whose eigenvalue on an irrep of level ``n >= 1`` is
``Gamma(a, n) / Gamma(a) * |G/G_n|^a``.  ``mode="lie"`` (l-adic towers of Lie
dimension ``D``) uses the norm ``||y||_l`` and the prefactor
``(1 - l^a) / (1 - l^-(a+D))``, with eigenvalues ``l^(a n) - (1 - l^-D) / (1 - l^-(a+D))``.
Constants are annihilated in both modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .tower import TowerError, TowerSpec
from .transform import FunctionSample, forward, inverse, lp_norm, plancherel_norm2

MODES = ("group", "lie")


def _exact(a) -> bool:
    return isinstance(a, Rational) and Fraction(a).denominator == 1


def _power(base: int, expo):
    """``base ** expo`` exactly for integer exponents, else as a float."""
    if _exact(expo):
        return Fraction(base) ** int(expo)
    return float(base) ** float(expo)


def _check_exponent(a) -> None:
    if not a > 0:
        raise ValueError(f"exponent must be positive, got {a}")


@dataclass(frozen=True)
class GammaTable:
    a: float | Fraction
    partials: dict  # n -> Gamma(a, n), n = 1..N
    value: float | Fraction  # normalization actually used
    closed_form: float | Fraction | None

    @property
    def sup(self):
        return max(self.partials.values())


def gamma_partial(t: TowerSpec, a, n: int):
    """``1/kappa_{n-1}^(a+1) + sum_{k<n} |G_k/G_n|^-a (1 - 1/kappa_k)``."""
    if not 1 <= n <= t.depth:
        raise TowerError(f"Gamma(a, n) needs 1 <= n <= {t.depth}")
    kap = t.kappa
    total = 1 / _power(kap[n - 1], a + 1)
    for k in range(n):
        ratio = t.index(n) // t.index(k)
        total += (1 - Fraction(1, kap[k])) / _power(ratio, a)
    return total


def gamma_closed_form(kappa: int, a):
    """``-(1 - kappa^-(a+1)) / (1 - kappa^a)`` for constant-order towers."""
    return -(1 - 1 / _power(kappa, a + 1)) / (1 - _power(kappa, a))


def gamma(t: TowerSpec, a) -> GammaTable:
    _check_exponent(a)
    partials = {n: gamma_partial(t, a, n) for n in range(1, t.depth + 1)}
    closed = gamma_closed_form(t.kappa[0], a) if t.constant_order else None
    value = closed if closed is not None else max(partials.values())
    return GammaTable(a, partials, value, closed)


def constant_order_eigenvalue(kappa: int, a, n: int):
    """``kappa^(a n) - (1 - 1/kappa) / (1 - kappa^-(a+1))`` (level ``n >= 1``)."""
    return _power(kappa, a * n if _exact(a) else float(a) * n) - (1 - Fraction(1, kappa)) / (
        1 - 1 / _power(kappa, a + 1)
    )


@dataclass(frozen=True)
class VtSymbol:
    a: float | Fraction
    mode: str
    eigenvalues: tuple  # indexed by level 0..N
    prefactor: float | Fraction
    gamma: GammaTable | None = None
    bracket: tuple | None = None  # eigenvalues of (c I + D^1) in lie mode

    def as_array(self) -> np.ndarray:
        return np.asarray([float(v) for v in self.eigenvalues])

    def table(self, t: TowerSpec) -> list[dict]:
        rows = []
        for n, lam in enumerate(self.eigenvalues):
            row = {"level": n, "index": t.index(n), "eigenvalue": float(lam), "exact": str(lam)}
            if n:
                row["ratio"] = float(lam) / float(t.index(n)) ** float(self.a)
            rows.append(row)
        return rows


def vt_symbol(t: TowerSpec, a, mode: str = "group") -> VtSymbol:
    _check_exponent(a)
    if mode == "group":
        g = gamma(t, a)
        eig = [Fraction(0)] + [g.partials[n] / g.value * _power(t.index(n), a) for n in range(1, t.depth + 1)]
        return VtSymbol(a, mode, tuple(eig), -1 / g.value, g)
    if mode != "lie":
        raise ValueError(f"mode must be one of {MODES}")
    if t.lie_dim is None:
        raise TowerError("lie normalization needs a p-adic or Heisenberg tower")
    ell, dd = t.prime, t.lie_dim
    shift = (1 - Fraction(1, ell**dd)) / (1 - 1 / _power(ell, a + dd))
    eig = [Fraction(0)] + [_power(ell, a * n if _exact(a) else float(a) * n) - shift for n in range(1, t.depth + 1)]
    pref = (1 - _power(ell, a)) / (1 - 1 / _power(ell, a + dd))
    c0 = (1 - Fraction(1, ell**dd)) / (1 - Fraction(1, ell ** (1 + dd)))
    bracket = (c0,) + tuple(Fraction(ell) ** n for n in range(1, t.depth + 1))
    return VtSymbol(a, mode, tuple(eig), pref, None, bracket)


def _shell_weights(t: TowerSpec, a, mode: str) -> np.ndarray:
    """Kernel ``1/|y|^(a+1)`` (group) or ``1/||y||^(a+D)`` (lie) on each shell ``G_k - G_{k+1}``."""
    if mode == "group":
        return np.asarray([float(t.index(k)) ** (float(a) + 1) for k in range(t.depth)])
    return np.asarray([float(t.prime) ** (k * (float(a) + t.lie_dim)) for k in range(t.depth)])


def vt_apply_direct(f: FunctionSample, a, mode: str = "group", method: str = "shells") -> FunctionSample:
    """Evaluate the singular integral as a Haar-weighted finite sum over ``y`` outside ``G_N``.

    ``method="shells"`` groups ``y`` by shell and uses coset averages;
    ``method="pairwise"`` sums over every ``(x, y)`` pair.
    """
    _check_exponent(a)
    t = f.tower
    pref = float(vt_symbol(t, a, mode).prefactor)
    weights = _shell_weights(t, a, mode)
    vals = f.values
    if method == "pairwise":
        w = np.zeros(t.order)
        shell = t.depths < t.depth
        w[shell] = weights[t.depths[shell]]
        inv_y = t.ravel(t.inv(t.coords))
        out = np.zeros(t.order, dtype=complex)
        step = max(1, (1 << 22) // t.order)
        for start in range(0, t.order, step):
            ys = np.arange(start, min(start + step, t.order))
            ys = ys[w[ys] != 0]
            if len(ys) == 0:
                continue
            # x y^-1 for every x (rows) and y in the block (cols)
            idx = t.ravel(t.mul(t.coords[:, None, :], t.coords[inv_y[ys]][None, :, :]))
            out += ((vals[idx] - vals[:, None]) * w[ys][None, :]).sum(axis=1)
        return FunctionSample(t, pref * out / t.order)
    if method != "shells":
        raise ValueError(f"unknown method {method!r}")
    means = [t.coset_mean(vals, k) for k in range(t.depth + 1)]
    out = np.zeros(t.order, dtype=complex)
    for k in range(t.depth):
        # sum over y in G_k - G_{k+1} of (f(x y^-1) - f(x)), Haar weighted
        inner = (means[k] - vals) / t.index(k) - (means[k + 1] - vals) / t.index(k + 1)
        out += weights[k] * inner
    return FunctionSample(t, pref * out)


def vt_apply_spectral(f: FunctionSample, a, mode: str = "group") -> FunctionSample:
    sym = vt_symbol(f.tower, a, mode)
    return inverse(forward(f).map_levels(sym.as_array()))


def sobolev_norm(f: FunctionSample, k) -> float:
    """``(||f||_2^2 + ||D^k f||_2^2)^(1/2)``, computed on the Fourier side."""
    _check_exponent(k)
    c = forward(f)
    dk = c.map_levels(vt_symbol(f.tower, k).as_array())
    return float(np.sqrt(lp_norm(f, 2) ** 2 + plancherel_norm2(dk)))
