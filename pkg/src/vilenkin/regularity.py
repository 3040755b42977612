"""Moduli of continuity, Fourier tails and numerical checks of the decay theorems.

Asymptotic ``O(.)`` statements are tested through least-squares slopes of
log-quantities against ``log |G/G_n|`` over the available levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, sqrt

import numpy as np

from .dual import Irrep, dual_arrays, enumerate_dual
from .tower import Element, TowerError, TowerSpec, depth_and_norm, element
from .transform import DualCoefficients, FunctionSample, forward, inverse

SLOPE_TOL = 0.15


class DegenerateWindow(ValueError):
    """Too few usable levels for a decay fit."""


# -- translation moduli --------------------------------------------------------


REFINE = 1e-6  # relative squared level below which the Fourier route is recomputed directly


def translation_norms(f: FunctionSample, p: float = 2, method: str = "auto") -> np.ndarray:
    """``||f(h .) - f||_p`` for every ``h`` in ``G/G_N`` (sample order).

    For ``p = 2`` the default uses ``||f(h.) - f||^2 = 2||f||^2 - 2 Re <f(h.), f>``
    with the autocorrelation obtained from one inverse transform of ``f^* f^``.
    That difference cancels for nearly invariant ``h``; those entries are
    recomputed directly.
    """
    t = f.tower
    if method == "auto":
        method = "fourier" if p == 2 else "direct"
    if method == "fourier":
        if p != 2:
            raise ValueError("the Fourier route only covers p = 2")
        c = forward(f)
        auto = inverse(DualCoefficients(t, tuple(b.conj().T @ b for b in c.blocks)))
        norm2 = float(np.mean(np.abs(f.values) ** 2))
        sq = 2 * norm2 - 2 * auto.values.real
        out = np.sqrt(np.maximum(sq, 0.0))
        close = np.flatnonzero(sq <= REFINE * norm2)
        if len(close):
            out[close] = _direct_norms(f, close, 2)
        return out
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    return _direct_norms(f, np.arange(t.order), p)


def _direct_norms(f: FunctionSample, which: np.ndarray, p: float) -> np.ndarray:
    t = f.tower
    out = np.empty(len(which))
    vals = f.values
    step = max(1, (1 << 22) // t.order)
    for start in range(0, len(which), step):
        hs = t.coords[which[start : start + step]]
        diff = np.abs(vals[t.translation_index(hs)] - vals[None, :])
        if p == inf:
            out[start : start + len(hs)] = diff.max(axis=1)
        else:
            out[start : start + len(hs)] = np.mean(diff**p, axis=1) ** (1.0 / p)
    return out


def modulus_table(f: FunctionSample, p: float = 2, method: str = "auto") -> np.ndarray:
    """``omega_p(f, n)`` for ``n = 0..N-1``."""
    t = f.tower
    norms = translation_norms(f, p, method)
    out = np.zeros(t.depth)
    for n in range(t.depth):
        out[n] = norms[t.depths >= n].max()
    return out


def modulus(f: FunctionSample, n: int, p: float = 2, method: str = "auto") -> float:
    """``sup_{h in G_n} ||f(h .) - f||_p``."""
    if not 0 <= n < f.tower.depth:
        raise TowerError(f"modulus needs 0 <= n < N = {f.tower.depth}")
    norms = translation_norms(f, p, method)
    return float(norms[f.tower.depths >= n].max())


def tail_sum(c: DualCoefficients, k: int) -> float:
    """``sum_{<xi> > |G/G_k|} d_xi ||c(xi)||_HS^2``."""
    if not 0 <= k <= c.tower.depth:
        raise TowerError(f"tail needs 0 <= k <= {c.tower.depth}")
    return float(tail_table(c)[k])


def tail_table(c: DualCoefficients) -> np.ndarray:
    """Tails for ``k = 0..N``."""
    dims, levels, _ = dual_arrays(c.tower)
    shell = np.bincount(levels, weights=dims * c.hs2(), minlength=c.tower.depth + 1)
    return np.asarray([shell[k + 1 :].sum() for k in range(c.tower.depth + 1)])


def weighted_tail_table(c: DualCoefficients, q: float, weight_power: float = 0.0) -> np.ndarray:
    """``sum_{level > k} <xi>^w d^{q(2/q - 1/2)} ||c||^q`` for ``k = 0..N``."""
    shell = shell_sums(c, q, weight_power)
    return np.asarray([shell[k + 1 :].sum() for k in range(c.tower.depth + 1)])


def shell_sums(c: DualCoefficients, q: float, weight_power: float = 0.0) -> np.ndarray:
    """Per-level contributions ``sum_{level = n} <xi>^w d^{q(2/q-1/2)} ||c||_HS^q``."""
    return _shell_sums(c.tower, np.sqrt(c.hs2()), q, weight_power)


def _shell_sums(t: TowerSpec, hs: np.ndarray, q: float, weight_power: float = 0.0) -> np.ndarray:
    dims, levels, brackets = dual_arrays(t)
    with np.errstate(divide="ignore"):
        terms = brackets**weight_power * dims ** (2.0 - q / 2.0) * np.where(hs > 0, hs**q, 0.0)
    return np.bincount(levels, weights=terms, minlength=t.depth + 1)


@dataclass
class ModulusTable:
    tower: TowerSpec
    omega: np.ndarray  # n = 0..N-1
    tail: np.ndarray  # n = 0..N-1
    p: float = 2

    @property
    def sqrt_tail(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.tail, 0.0))

    @property
    def ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.omega > 0, self.sqrt_tail / self.omega, np.nan)

    def rows(self) -> list[dict]:
        out = []
        for n in range(self.tower.depth):
            out.append(
                {
                    "n": n,
                    "index": self.tower.index(n),
                    "omega": float(self.omega[n]),
                    "sqrt_tail": float(self.sqrt_tail[n]),
                    "ratio": None if np.isnan(self.ratio[n]) else float(self.ratio[n]),
                }
            )
        return out


def modulus_report(f: FunctionSample, p: float = 2, method: str = "auto") -> ModulusTable:
    return ModulusTable(f.tower, modulus_table(f, p, method), tail_table(forward(f))[:-1], p)


# -- two-sided bound ------------------------------------------------------------


@dataclass
class PlatonovReport:
    table: ModulusTable
    lower_ok: np.ndarray
    upper_ok: np.ndarray

    @property
    def violations(self) -> list[int]:
        return [n for n in range(len(self.lower_ok)) if not (self.lower_ok[n] and self.upper_ok[n])]

    @property
    def passed(self) -> bool:
        return not self.violations


def platonov_check(f: FunctionSample, rtol: float = 1e-10) -> PlatonovReport:
    """``omega/2 <= sqrt(tail) <= omega/sqrt(2)`` at every level ``n < N``."""
    table = modulus_report(f)
    om, st = table.omega, table.sqrt_tail
    slack = rtol * max(float(np.max(om)), float(np.max(st)), 1e-300)
    lower = om / 2 <= st + slack
    upper = st <= om / sqrt(2) + slack
    return PlatonovReport(table, lower, upper)


# -- decay fits ------------------------------------------------------------------


@dataclass
class DecayFit:
    alpha: float
    nu: float = 0.0
    intercept: float = 0.0
    residual: float = 0.0
    levels: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "nu": self.nu,
            "intercept": self.intercept,
            "residual": self.residual,
            "levels": list(self.levels),
        }


def _window(values: np.ndarray, start: int) -> list[int]:
    """Consecutive levels from ``start`` with strictly positive data."""
    out = []
    for n in range(start, len(values)):
        if not values[n] > 0:
            break
        out.append(n)
    return out


def fit_decay(tower: TowerSpec, values, levels=None, log_power: bool = False, start: int = 0) -> DecayFit:
    """Fit ``values[n] ~ C |G/G_n|^-alpha (log |G/G_n|)^nu``.

    Without ``log_power`` only ``alpha`` is fitted (>= 3 levels); with it the
    two-parameter regression needs >= 4 levels, all with ``n >= 1``.
    """
    values = np.asarray(values, dtype=float)
    if levels is None:
        levels = _window(values, max(start, 1) if log_power else start)
    levels = list(levels)
    need = 4 if log_power else 3
    if len(levels) < need:
        raise DegenerateWindow(f"need {need} levels with nonzero data, have {levels}")
    logx = np.log([float(tower.index(n)) for n in levels])
    y = np.log(values[levels])
    cols = [-logx]
    if log_power:
        cols.append(np.log(logx))
    cols.append(np.ones_like(logx))
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    if log_power:
        return DecayFit(float(coef[0]), float(coef[1]), float(coef[2]), resid, tuple(levels))
    return DecayFit(float(coef[0]), 0.0, float(coef[1]), resid, tuple(levels))


def lipschitz_fit(f: FunctionSample, p: float = 2, start: int = 0) -> DecayFit:
    """Estimate the Lipschitz order from ``log omega_p`` against ``log |G_n|``."""
    return fit_decay(f.tower, modulus_table(f, p), start=start)


@dataclass
class TitchmarshSecondReport:
    alpha: float
    modulus_fit: DecayFit
    tail_fit: DecayFit
    table: ModulusTable
    tol: float = SLOPE_TOL

    @property
    def gap(self) -> float:
        return abs(self.modulus_fit.alpha - self.tail_fit.alpha / 2)

    @property
    def passed(self) -> bool:
        return self.gap <= self.tol


def titchmarsh_second_check(f: FunctionSample, alpha: float, tol: float = SLOPE_TOL, start: int = 0):
    """Compare the decay of ``omega_2(f, n)`` with that of the Fourier tail."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    table = modulus_report(f)
    mod_fit = fit_decay(f.tower, table.omega, start=start)
    tail_fit = fit_decay(f.tower, table.tail, start=start)
    return TitchmarshSecondReport(alpha, mod_fit, tail_fit, table, tol)


def first_titchmarsh_thresholds(alpha: float, gamma: float, q: float, lie_dim: int | None = None) -> dict:
    """Lower ends of the beta ranges for ``D^gamma f^`` and ``f^``.

    With ``lie_dim`` the exponents are read in the Lie normalization, where a
    group exponent ``alpha`` corresponds to ``D alpha``.
    """
    out = {
        "beta_sobolev": q / ((alpha - gamma) * q + 1),
        "beta_fourier": q / (alpha * q + 1),
    }
    if lie_dim:
        dd = lie_dim
        a_l, g_l = alpha * dd, gamma * dd
        out["beta_sobolev_lie"] = q * dd / ((a_l - g_l) * q + dd)
        out["beta_fourier_lie"] = q * dd / (a_l * q + dd)
    return out


def shell_exponent(tower: TowerSpec, shells: np.ndarray, last: int | None = None) -> float:
    """Slope of ``log shell(n)`` against ``log |G/G_n|`` over ``1 <= n <= last`` with data.

    ``last`` defaults to ``N - 1``: level ``N`` collects everything the
    truncation cannot resolve and is not a genuine shell.
    """
    if last is None:
        last = tower.depth - 1
    levels = [n for n in range(1, last + 1) if shells[n] > 0]
    if len(levels) < 2:
        return float("nan")
    x = np.log([float(tower.index(n)) for n in levels])
    y = np.log(shells[levels])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def empirical_boundary(betas: np.ndarray, exponents: np.ndarray) -> float:
    """Smallest grid beta from which every shell exponent is negative (sums converge)."""
    finite = exponents < 0
    if not finite[-1]:
        return float("nan")
    idx = len(betas) - 1
    while idx > 0 and finite[idx - 1]:
        idx -= 1
    return float(betas[idx])


@dataclass
class TitchmarshFirstReport:
    p: float
    q: float
    alpha: float
    gamma: float
    s_table: np.ndarray  # S(k), k = 0..N-1
    s_fit: DecayFit | None
    partial_table: np.ndarray  # Phi(n), n = 0..N
    partial_slope: float
    betas: np.ndarray
    fourier_exponents: np.ndarray
    sobolev_exponents: np.ndarray
    fourier_norms: np.ndarray
    sobolev_norms: np.ndarray
    thresholds: dict
    tol: float = SLOPE_TOL

    @property
    def s_slope(self) -> float:
        """Fitted decay exponent of ``S(k)`` (compare with ``alpha q``)."""
        return float("nan") if self.s_fit is None else self.s_fit.alpha

    @property
    def fourier_boundary(self) -> float:
        return empirical_boundary(self.betas, self.fourier_exponents)

    @property
    def sobolev_boundary(self) -> float:
        return empirical_boundary(self.betas, self.sobolev_exponents)

    @property
    def slope_ok(self) -> bool:
        return abs(self.s_slope - self.alpha * self.q) <= self.tol

    @property
    def boundary_ok(self) -> bool:
        step = float(self.betas[1] - self.betas[0]) if len(self.betas) > 1 else 0.0
        return abs(self.fourier_boundary - self.thresholds["beta_fourier"]) <= step + 1e-12

    def rows(self) -> list[dict]:
        return [
            {
                "beta": float(b),
                "fourier_norm": float(fn),
                "fourier_shell_exponent": float(fe),
                "sobolev_norm": float(sn),
                "sobolev_shell_exponent": float(se),
            }
            for b, fn, fe, sn, se in zip(
                self.betas, self.fourier_norms, self.fourier_exponents, self.sobolev_norms, self.sobolev_exponents
            )
        ]


def titchmarsh_first_check(
    f: FunctionSample,
    p: float,
    gamma: float,
    alpha: float,
    betas=None,
    step: float = 0.05,
    tol: float = SLOPE_TOL,
) -> TitchmarshFirstReport:
    """Decay of the weighted ``q``-tails and the ``L^beta`` boundary of ``f^`` and ``<xi>^gamma f^``."""
    if not 1 < p <= 2:
        raise ValueError("p must lie in (1, 2]")
    q = p / (p - 1)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if not alpha < gamma < alpha + 1 / q:
        raise ValueError(f"gamma must lie in (alpha, alpha + 1/q) = ({alpha}, {alpha + 1 / q})")
    t = f.tower
    c = forward(f)
    s_table = weighted_tail_table(c, q)[:-1]
    try:
        s_fit = fit_decay(t, s_table)
    except DegenerateWindow:
        s_fit = None
    # partial sums over <xi> <= |G/G_n| weighted by <xi>^(gamma q)
    shells_w = shell_sums(c, q, gamma * q)
    partial = np.cumsum(shells_w)
    partial_slope = shell_exponent(t, np.concatenate([[0.0], partial[1:]]), last=t.depth)

    if betas is None:
        betas = np.round(np.arange(step, q + step / 2, step), 10)
    betas = np.asarray(betas, dtype=float)
    hs = np.sqrt(c.hs2())
    f_exp, s_exp, f_norm, s_norm = [], [], [], []
    for b in betas:
        sh_f = _shell_sums(t, hs, b)
        sh_s = _shell_sums(t, hs, b, gamma * b)
        f_exp.append(shell_exponent(t, sh_f))
        s_exp.append(shell_exponent(t, sh_s))
        f_norm.append(sh_f.sum() ** (1 / b))
        s_norm.append(sh_s.sum() ** (1 / b))
    return TitchmarshFirstReport(
        p,
        q,
        alpha,
        gamma,
        s_table,
        s_fit,
        partial,
        partial_slope,
        betas,
        np.asarray(f_exp),
        np.asarray(s_exp),
        np.asarray(f_norm),
        np.asarray(s_norm),
        first_titchmarsh_thresholds(alpha, gamma, q, t.lie_dim),
        tol,
    )


@dataclass
class DiniReport:
    alpha: float
    nu: float
    modulus_fit: DecayFit
    tail_fit: DecayFit
    table: ModulusTable
    profile: np.ndarray
    tol_alpha: float = SLOPE_TOL
    tol_nu: float = 0.5

    def fit_ok(self, fit: DecayFit) -> bool:
        return abs(fit.alpha - self.alpha) <= self.tol_alpha and abs(fit.nu - self.nu) <= self.tol_nu

    @property
    def passed(self) -> bool:
        return self.fit_ok(self.modulus_fit) and self.fit_ok(self.tail_fit)


def dini_profile(tower: TowerSpec, alpha: float, nu: float) -> np.ndarray:
    """``|G/G_n|^-alpha (log |G/G_n|)^nu`` for ``n = 0..N`` (``n = 0`` set to nan)."""
    x = np.asarray(tower.indices, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x**-alpha * np.log(x) ** nu
    out[0] = np.nan
    return out


def dini_lipschitz_check(
    f: FunctionSample, alpha: float, nu: float, tol_alpha: float = SLOPE_TOL, tol_nu: float = 0.5
) -> DiniReport:
    """Two-parameter fits of ``omega_2`` and ``sqrt(tail)`` against ``|G/G_n|^-a (log |G/G_n|)^nu``."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    table = modulus_report(f)
    mod_fit = fit_decay(f.tower, table.omega, log_power=True)
    tail_fit = fit_decay(f.tower, table.sqrt_tail, log_power=True)
    return DiniReport(alpha, nu, mod_fit, tail_fit, table, dini_profile(f.tower, alpha, nu), tol_alpha, tol_nu)


# -- Condition (A) -----------------------------------------------------------------


def condition_a_terms(t: TowerSpec, k: int, witnesses) -> list[tuple[Irrep, float]]:
    """Per-irrep ``lambda_min(sum_i (pi(h_i) - I)(pi(h_i) - I)^*) (<pi>/|G/G_k|)^2``."""
    if not 0 <= k < t.depth:
        raise TowerError(f"Condition (A) needs 0 <= k < N = {t.depth}")
    witnesses = list(witnesses)
    if not witnesses:
        raise ValueError("at least one witness is required")
    for h in witnesses:
        dn = depth_and_norm(t, h)
        if dn.depth != k or dn.at_resolution:
            raise TowerError(f"witness {h} has depth {dn.depth}, expected exactly {k}")
    coords = np.asarray([h.coords for h in witnesses], dtype=np.int64)
    out = []
    for irrep in enumerate_dual(t):
        if irrep.level <= k:
            continue  # trivial on G_k
        mats = irrep.matrices(coords) - np.eye(irrep.dim)[None]
        gram = np.einsum("nij,nkj->ik", mats, mats.conj())
        lam_min = float(np.linalg.eigvalsh(gram)[0])
        out.append((irrep, lam_min * (irrep.bracket / t.index(k)) ** 2))
    return out


def condition_a_constant(t: TowerSpec, k: int, witnesses) -> float:
    """``c(k)``: the q = 2 Condition (A) constant certified by ``witnesses`` at scale ``k``."""
    terms = condition_a_terms(t, k, witnesses)
    if not terms:
        return inf
    return min(v for _, v in terms)


def heisenberg_witnesses(t: TowerSpec, k: int, separate: bool = False) -> list[Element]:
    """Witnesses ``h1 = (x0, y0, 0)``, ``h2 = (0, 0, z0)`` with ``x0 = y0 = l^k e_1``, ``z0 = l^k``.

    ``separate=True`` splits ``h1`` into ``(x0, 0, 0)`` and ``(0, y0, 0)`` for
    every coordinate direction.
    """
    if t.family != "heisenberg":
        raise TowerError("the witness recipe is specific to Heisenberg towers")
    if not 0 <= k < t.depth:
        raise TowerError(f"witness scale k must satisfy 0 <= k < N = {t.depth}")
    d, step = t.dim, t.prime**k
    zero = [0] * d
    unit = [step] + [0] * (d - 1)
    if not separate:
        return [element(t, unit, unit, 0), element(t, zero, zero, step)]
    out = []
    for j in range(d):
        e = [0] * d
        e[j] = step
        out.append(element(t, e, zero, 0))
        out.append(element(t, zero, e, 0))
    out.append(element(t, zero, zero, step))
    return out


def abelian_witnesses(t: TowerSpec, k: int) -> list[Element]:
    """Depth-``k`` witnesses for abelian towers: ``l^k e_j`` (one per coordinate) or ``e_k``."""
    if t.family == "heisenberg":
        raise TowerError("use heisenberg_witnesses for Heisenberg towers")
    if not 0 <= k < t.depth:
        raise TowerError(f"witness scale k must satisfy 0 <= k < N = {t.depth}")
    out = []
    if t.family == "vilenkin":
        row = [0] * t.ncoords
        row[k] = 1
        return [element(t, *row)]
    for j in range(t.dim):
        row = [0] * t.dim
        row[j] = t.prime**k
        out.append(element(t, *row))
    return out


def condition_a_scan(t: TowerSpec, witness_fn=None) -> list[dict]:
    """``c(k)`` for every ``k < N`` with the default witnesses of the family."""
    if witness_fn is None:
        witness_fn = heisenberg_witnesses if t.family == "heisenberg" else abelian_witnesses
    rows = []
    for k in range(t.depth):
        terms = condition_a_terms(t, k, witness_fn(t, k))
        if terms:
            worst, value = min(terms, key=lambda iv: iv[1])
            rows.append({"k": k, "c": value, "worst": worst.key, "irreps": len(terms)})
        else:
            rows.append({"k": k, "c": inf, "worst": None, "irreps": 0})
    return rows
