"""Unitary duals of the finite quotients ``G/G_N``.

Abelian towers carry characters ``x -> exp(2 pi i {x . xi})``.  The Heisenberg
tower carries the characters of ``H/Z`` together with the representations
induced from central characters: for a central frequency ``lam`` of conductor
``l^m`` the model space is functions on ``(Z/l^m)^d`` and

    (pi_lam(a, b, c) phi)(t) = exp(2 pi i lam (c + t.b) / l^m) phi(t + a),

twisted by a character ``(xi, eta)`` taken modulo ``l^(N-m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import numpy as np

from .tower import Element, TowerError, TowerSpec, _valuation

_CHUNK = 1 << 22  # complex entries per evaluation block


@lru_cache(maxsize=64)
def _roots(n: int) -> np.ndarray:
    """``exp(2 pi i k / n)`` for ``k = 0..n-1``."""
    out = np.exp(2j * np.pi * np.arange(n) / n)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Irrep:
    tower: TowerSpec
    kind: str  # "character" | "induced"
    freq: tuple[int, ...]
    lam: int = 0
    cond: int = 0
    dim: int = 1
    level: int = 0
    position: int = 0

    @property
    def label(self) -> tuple:
        """Frequencies as elements of ``Q/Z`` (``Q_l/Z_l`` for l-adic towers)."""
        t = self.tower
        if t.family == "vilenkin":
            return tuple(Fraction(f, o) for f, o in zip(self.freq, t.grid_shape))
        m = t.modulus
        if t.family == "padic":
            return tuple(Fraction(f, m) for f in self.freq)
        d = t.dim
        xi = tuple(Fraction(f, m) for f in self.freq[:d])
        eta = tuple(Fraction(f, m) for f in self.freq[d:])
        lam = Fraction(self.lam, t.prime**self.cond) if self.cond else Fraction(0)
        return (xi, eta, lam)

    @property
    def key(self) -> str:
        """Compact printable label."""
        def fmt(v):
            if isinstance(v, tuple):
                return "(" + ",".join(fmt(u) for u in v) + ")"
            return str(v)

        return fmt(self.label)

    @property
    def bracket(self) -> int:
        """``<xi>``: 1 for the trivial representation, else ``|G/G_level|``."""
        return self.tower.index(self.level)

    @property
    def trivial(self) -> bool:
        return self.level == 0

    def matrix(self, x: Element) -> np.ndarray:
        return rep_matrix(self, x)

    def matrices(self, coords: np.ndarray | None = None) -> np.ndarray:
        """Representation matrices at coordinate rows (default: every sample point)."""
        if coords is None:
            coords = self.tower.coords
        return _evaluate(self, np.asarray(coords, dtype=np.int64))

    def traces(self) -> np.ndarray:
        out = np.empty(self.tower.order, dtype=complex)
        for sl, mats in _blocks(self, self.tower.coords):
            out[sl] = np.einsum("gii->g", mats)
        return out


def _blocks(irrep: Irrep, coords: np.ndarray):
    step = max(1, _CHUNK // (irrep.dim * irrep.dim))
    for start in range(0, len(coords), step):
        sl = slice(start, min(start + step, len(coords)))
        yield sl, _evaluate(irrep, coords[sl])


def _character_phase(tower: TowerSpec, freq: tuple[int, ...], coords: np.ndarray) -> np.ndarray:
    if tower.family == "vilenkin":
        big = lcm(*tower.grid_shape)
        w = np.asarray([f * (big // o) for f, o in zip(freq, tower.grid_shape)], dtype=np.int64)
        return _roots(big)[(coords @ w) % big]
    m = tower.modulus
    w = np.asarray(freq, dtype=np.int64)
    if tower.family == "padic":
        return _roots(m)[(coords @ w) % m]
    d = tower.dim
    return _roots(m)[(coords[:, : 2 * d] @ w) % m]


@lru_cache(maxsize=32)
def _basis(mod: int, d: int) -> np.ndarray:
    """Rows of ``(Z/mod)^d`` in C order."""
    out = np.indices((mod,) * d).reshape(d, -1).T.astype(np.int64)
    out.setflags(write=False)
    return out


def _ravel_mod(rows: np.ndarray, mod: int) -> np.ndarray:
    d = rows.shape[-1]
    weights = mod ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return (rows % mod) @ weights


def _evaluate(irrep: Irrep, coords: np.ndarray) -> np.ndarray:
    t = irrep.tower
    chi = _character_phase(t, irrep.freq, coords)
    if irrep.kind == "character":
        return chi.reshape(-1, 1, 1)
    d = t.dim
    mm = t.prime**irrep.cond
    a, b, c = coords[:, :d], coords[:, d : 2 * d], coords[:, 2 * d]
    basis = _basis(mm, d)  # (T, d)
    num = (irrep.lam * (c[:, None] + b @ basis.T)) % mm  # (n, T)
    cols = _ravel_mod(basis[None, :, :] + a[:, None, :], mm)  # (n, T)
    n, size = len(coords), len(basis)
    out = np.zeros((n, size, size), dtype=complex)
    vals = _roots(mm)[num] * chi[:, None]
    out[np.arange(n)[:, None], np.arange(size)[None, :], cols] = vals
    return out


def _check(irrep: Irrep, x: Element) -> None:
    if x.tower != irrep.tower:
        raise TowerError(f"element of {x.tower.describe()} evaluated on irrep of {irrep.tower.describe()}")


def rep_matrix(irrep: Irrep, x: Element) -> np.ndarray:
    """Unitary matrix ``pi(x)``."""
    _check(irrep, x)
    return _evaluate(irrep, np.asarray([x.coords], dtype=np.int64))[0]


def _trivial_on(irrep: Irrep, gens: np.ndarray) -> bool:
    if len(gens) == 0:
        return True
    mats = _evaluate(irrep, gens)
    return bool(np.allclose(mats, np.eye(irrep.dim)[None], atol=1e-12, rtol=0))


def _direct_level(irrep: Irrep) -> int:
    t = irrep.tower
    for n in range(t.depth + 1):
        if _trivial_on(irrep, t.generators(n)):
            return n
    raise AssertionError("representation of G/G_N must be trivial on G_N")


def _abelian_levels(tower: TowerSpec, freqs: np.ndarray) -> np.ndarray:
    """Direct triviality test of every character on the generators of each ``G_n``."""
    levels = np.full(len(freqs), tower.depth, dtype=np.int64)
    for n in range(tower.depth, -1, -1):
        gens = tower.generators(n)
        if len(gens) == 0:
            continue
        if tower.family == "vilenkin":
            big = lcm(*tower.grid_shape)
            w = freqs * np.asarray([big // o for o in tower.grid_shape], dtype=np.int64)
            angles = (w @ gens.T) % big
        else:
            angles = (freqs @ gens.T) % tower.modulus
        trivial = (angles == 0).all(axis=1)
        levels[trivial] = n
    return levels


def conductor_level(irrep: Irrep) -> int:
    """Level predicted by the conductors of the frequencies (cross-check only)."""
    t = irrep.tower
    if t.family == "vilenkin":
        nz = [k for k, f in enumerate(irrep.freq) if f]
        return nz[-1] + 1 if nz else 0
    vals = _valuation(np.asarray(irrep.freq), t.prime, t.depth)
    char_level = int(t.depth - vals.min()) if len(vals) else 0
    return max(char_level, irrep.cond)


@lru_cache(maxsize=16)
def enumerate_dual(tower: TowerSpec) -> tuple[Irrep, ...]:
    """One representative per class of irreducible representations of ``G/G_N``."""
    out: list[Irrep] = []
    if tower.family in ("vilenkin", "padic"):
        freqs = np.indices(tower.grid_shape).reshape(tower.ncoords, -1).T.astype(np.int64)
        levels = _abelian_levels(tower, freqs)
        for i, (f, lev) in enumerate(zip(freqs.tolist(), levels.tolist())):
            out.append(Irrep(tower, "character", tuple(f), level=lev, position=i))
        return tuple(out)

    d, ell, big_n = tower.dim, tower.prime, tower.depth
    m_full = tower.modulus
    freqs = np.indices((m_full,) * (2 * d)).reshape(2 * d, -1).T.astype(np.int64)
    fake = TowerSpec("padic", big_n, prime=ell, dim=2 * d)
    levels = _abelian_levels(fake, freqs)  # characters of H/Z = (Z/l^N)^(2d)
    for f, lev in zip(freqs.tolist(), levels.tolist()):
        out.append(Irrep(tower, "character", tuple(f), level=lev, position=len(out)))
    for m in range(1, big_n + 1):
        mm = ell**m
        twist_mod = ell ** (big_n - m)
        twists = np.indices((twist_mod,) * (2 * d)).reshape(2 * d, -1).T.tolist()
        for lam in range(1, mm):
            if gcd(lam, ell) != 1:
                continue
            for tw in twists:
                rep = Irrep(tower, "induced", tuple(tw), lam=lam, cond=m, dim=mm**d, position=len(out))
                out.append(replace(rep, level=_direct_level(rep)))
    return tuple(out)


def dual_arrays(tower: TowerSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(dims, levels, brackets)`` of :func:`enumerate_dual` as arrays."""
    return _dual_arrays(tower)


@lru_cache(maxsize=16)
def _dual_arrays(tower: TowerSpec):
    dual = enumerate_dual(tower)
    dims = np.fromiter((r.dim for r in dual), dtype=np.int64, count=len(dual))
    levels = np.fromiter((r.level for r in dual), dtype=np.int64, count=len(dual))
    brackets = np.asarray(tower.indices, dtype=float)[levels]
    for arr in (dims, levels, brackets):
        arr.setflags(write=False)
    return dims, levels, brackets


def rep_integral_over_ball(irrep: Irrep, n: int) -> np.ndarray:
    """``int_{G_n} pi(x) dx`` as a Haar-weighted finite sum."""
    t = irrep.tower
    if not 0 <= n <= t.depth:
        raise TowerError(f"level {n} outside [0, {t.depth}]")
    coords = t.coords[t.subgroup_mask(n)]
    acc = np.zeros((irrep.dim, irrep.dim), dtype=complex)
    for _, mats in _blocks(irrep, coords):
        acc += mats.sum(axis=0)
    return acc / t.order


def character_gram(pi: Irrep, rho: Irrep) -> complex:
    """``int tr pi(x) conj(tr rho(x)) dx``; 1 iff equivalent irreducibles, else 0."""
    if pi.tower != rho.tower:
        raise TowerError("irreps belong to different towers")
    return complex(np.mean(pi.traces() * np.conj(rho.traces())))


def dual_table(tower: TowerSpec) -> list[dict]:
    return [
        {"label": r.key, "dim": r.dim, "level": r.level, "bracket": r.bracket}
        for r in enumerate_dual(tower)
    ]
