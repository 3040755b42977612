"""Matrix-coefficient Fourier transform on ``G/G_N``.

Conventions::

    f^(xi)  = int_G f(x) xi(x)^* dx
    f(x)    = sum_xi d_xi tr[xi(x) f^(xi)]
    g(x)    = f(h x)   =>   g^(xi) = f^(xi) xi(h)

The naive transform sums over the group for every irrep and is the
reference; ``method="fast"`` uses FFTs along the coordinate grid (abelian
towers) or along the ``(y, z)`` axes plus a gather per irrep (Heisenberg).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

import numpy as np

from .dual import Irrep, _basis, _blocks, _ravel_mod, _roots, dual_arrays, enumerate_dual
from .tower import Element, TowerError, TowerSpec


@dataclass(frozen=True, eq=False)
class FunctionSample:
    tower: TowerSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.shape != (self.tower.order,):
            raise TowerError(f"sample has {vals.size} values, tower needs {self.tower.order}")
        object.__setattr__(self, "values", vals)

    def __sub__(self, other: "FunctionSample") -> "FunctionSample":
        return FunctionSample(self.tower, self.values - other.values)

    def __add__(self, other: "FunctionSample") -> "FunctionSample":
        return FunctionSample(self.tower, self.values + other.values)

    def __mul__(self, scalar) -> "FunctionSample":
        return FunctionSample(self.tower, self.values * scalar)

    __rmul__ = __mul__

    def at(self, x: Element) -> complex:
        return complex(self.values[x.index])

    def norm(self, p: float = 2) -> float:
        return lp_norm(self, p)


@dataclass(frozen=True, eq=False)
class DualCoefficients:
    tower: TowerSpec
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        dual = enumerate_dual(self.tower)
        if len(self.blocks) != len(dual):
            raise TowerError(f"{len(self.blocks)} coefficient blocks for {len(dual)} irreps")

    @property
    def irreps(self) -> tuple[Irrep, ...]:
        return enumerate_dual(self.tower)

    def __getitem__(self, key) -> np.ndarray:
        if isinstance(key, Irrep):
            return self.blocks[key.position]
        for irrep in self.irreps:
            if irrep.label == key or irrep.key == key:
                return self.blocks[irrep.position]
        raise KeyError(key)

    def hs2(self) -> np.ndarray:
        """Squared Hilbert-Schmidt norms, one per irrep."""
        return _hs2(self.blocks)

    def map_levels(self, multiplier) -> "DualCoefficients":
        """Multiply every block by ``multiplier[level]``."""
        mult = np.asarray(multiplier)
        _, levels, _ = dual_arrays(self.tower)
        return DualCoefficients(self.tower, tuple(b * mult[lv] for b, lv in zip(self.blocks, levels)))

    def to_json(self) -> list[dict]:
        out = []
        for irrep, block in zip(self.irreps, self.blocks):
            out.append(
                {
                    "label": irrep.key,
                    "dim": irrep.dim,
                    "level": irrep.level,
                    "bracket": irrep.bracket,
                    "matrix": [[float(v.real), float(v.imag)] for v in block.reshape(-1)],
                }
            )
        return out

    @classmethod
    def from_json(cls, tower: TowerSpec, rows: list[dict]) -> "DualCoefficients":
        dual = enumerate_dual(tower)
        by_key = {r["label"]: r for r in rows}
        blocks = []
        for irrep in dual:
            if irrep.key not in by_key:
                raise TowerError(f"missing coefficient for irrep {irrep.key}")
            flat = np.asarray(by_key[irrep.key]["matrix"], dtype=float)
            blocks.append((flat[:, 0] + 1j * flat[:, 1]).reshape(irrep.dim, irrep.dim))
        return cls(tower, tuple(blocks))


def _hs2(blocks) -> np.ndarray:
    return np.fromiter((np.vdot(b, b).real for b in blocks), dtype=float, count=len(blocks))


# -- forward -------------------------------------------------------------------


def forward(f: FunctionSample, method: str = "fast") -> DualCoefficients:
    t = f.tower
    if method == "naive":
        blocks = []
        for irrep in enumerate_dual(t):
            acc = np.zeros((irrep.dim, irrep.dim), dtype=complex)
            for sl, mats in _blocks(irrep, t.coords):
                acc += np.einsum("g,gji->ij", f.values[sl], np.conj(mats))
            blocks.append(acc / t.order)
        return DualCoefficients(t, tuple(blocks))
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    if t.family in ("vilenkin", "padic"):
        spec = np.fft.fftn(f.values.reshape(t.grid_shape)) / t.order
        return DualCoefficients(t, tuple(spec.reshape(-1, 1, 1)))
    return DualCoefficients(t, _heisenberg_forward(t, f.values))


def _heisenberg_forward(t: TowerSpec, values: np.ndarray) -> tuple[np.ndarray, ...]:
    d, ell, big_n, m_full = t.dim, t.prime, t.depth, t.modulus
    grid = values.reshape(t.grid_shape)
    chars = np.fft.fftn(grid.sum(axis=-1)) / t.order
    blocks: list[np.ndarray] = list(chars.reshape(-1, 1, 1))

    spec = np.fft.fftn(grid, axes=tuple(range(d, 2 * d + 1)))
    spec = spec.reshape(m_full**d, m_full**d, m_full)
    a_rows = _basis(m_full, d)
    for irrep in enumerate_dual(t)[len(blocks) :]:
        mm = ell**irrep.cond
        s = ell ** (big_n - irrep.cond)
        basis = _basis(mm, d)
        size = len(basis)
        xi = np.asarray(irrep.freq[:d], dtype=np.int64)
        eta = np.asarray(irrep.freq[d:], dtype=np.int64)
        beta = _ravel_mod(eta[None, :] + irrep.lam * s * basis, m_full)
        gamma = (irrep.lam * s) % m_full
        g = spec[:, beta, gamma] * np.conj(_roots(m_full)[(a_rows @ xi) % m_full])[:, None]
        g = g.reshape((s, mm) * d + (size,)).sum(axis=tuple(range(0, 2 * d, 2)))
        k = g.reshape(size, size)  # [a mod l^m, t]
        diff = _ravel_mod(basis[:, None, :] - basis[None, :, :], mm)
        blocks.append(k[diff, np.arange(size)[None, :]] / t.order)
    return tuple(blocks)


# -- inverse -------------------------------------------------------------------


def inverse(c: DualCoefficients, method: str = "fast") -> FunctionSample:
    t = c.tower
    dual = enumerate_dual(t)
    for irrep, block in zip(dual, c.blocks):
        if block.shape != (irrep.dim, irrep.dim):
            raise TowerError(f"block for {irrep.key} has shape {block.shape}")
    if method == "naive":
        out = np.zeros(t.order, dtype=complex)
        for irrep, block in zip(dual, c.blocks):
            for sl, mats in _blocks(irrep, t.coords):
                out[sl] += irrep.dim * np.einsum("gij,ji->g", mats, block)
        return FunctionSample(t, out)
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    if t.family in ("vilenkin", "padic"):
        spec = np.asarray([b[0, 0] for b in c.blocks]).reshape(t.grid_shape)
        return FunctionSample(t, np.fft.ifftn(spec) * t.order)
    return FunctionSample(t, _heisenberg_inverse(t, c.blocks))


def _heisenberg_inverse(t: TowerSpec, blocks) -> np.ndarray:
    d, ell, m_full = t.dim, t.prime, t.modulus
    nchar = m_full ** (2 * d)
    chars = np.asarray([b[0, 0] for b in blocks[:nchar]]).reshape((m_full,) * (2 * d))
    plane = np.fft.ifftn(chars) * nchar  # function of (x, y)
    out = np.repeat(plane[..., None], m_full, axis=-1).astype(complex)

    ab_rows = _basis(m_full, 2 * d)
    zs = np.arange(m_full)
    for irrep, block in zip(enumerate_dual(t)[nchar:], blocks[nchar:]):
        mm = ell**irrep.cond
        s = m_full // mm
        basis = _basis(mm, d)
        size = len(basis)
        shift = _ravel_mod(basis[:, None, :] + basis[None, :, :], mm)  # [r, t] -> t + r
        v = block[shift, np.arange(size)[None, :]]  # V[r, t] = A[t + r, t]
        u = np.fft.ifftn(v.reshape((size,) + (mm,) * d), axes=tuple(range(1, d + 1))) * size
        u = u.reshape(size, size)
        w = u[:, _ravel_mod(irrep.lam * basis, mm)]  # W[r, b]
        w = np.tile(w.reshape((mm,) * (2 * d)), (s,) * (2 * d))
        chi = _roots(m_full)[(ab_rows @ np.asarray(irrep.freq)) % m_full].reshape((m_full,) * (2 * d))
        central = _roots(mm)[(irrep.lam * zs) % mm]
        out += irrep.dim * (chi * w)[..., None] * central
    return out.reshape(-1)


# -- norms, translations -----------------------------------------------------------


def lp_norm(f: FunctionSample, p: float = 2) -> float:
    """``||f||_{L^p(mu_G)}`` with normalized Haar measure."""
    a = np.abs(f.values)
    if p == inf:
        return float(a.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.mean(a**p) ** (1.0 / p))


def plancherel_norm2(c: DualCoefficients) -> float:
    dims, _, _ = dual_arrays(c.tower)
    return float(np.sum(dims * c.hs2()))


def dual_lq_norm(c: DualCoefficients, q: float) -> float:
    """``(sum_xi d^{q(2/q - 1/2)} ||c(xi)||_HS^q)^{1/q}``; ``q = inf`` gives ``sup d^{-1/2} ||c||``."""
    dims, _, _ = dual_arrays(c.tower)
    hs = np.sqrt(c.hs2())
    if q == inf:
        return float(np.max(hs / np.sqrt(dims)))
    if q < 1:
        raise ValueError("q must be >= 1")
    return float(np.sum(dims ** (2.0 - q / 2.0) * hs**q) ** (1.0 / q))


def translate(f: FunctionSample, h: Element) -> FunctionSample:
    """Left translate ``x -> f(h x)``."""
    if h.tower != f.tower:
        raise TowerError("translation by an element of another tower")
    idx = f.tower.translation_index(np.asarray(h.coords))
    return FunctionSample(f.tower, f.values[idx])


def hausdorff_young_gap(f: FunctionSample, p: float) -> float:
    """``||f||_p - ||f^||_q``; nonnegative up to rounding for ``1 < p <= 2``."""
    if not 1 < p <= 2:
        raise ValueError("p must lie in (1, 2]")
    q = p / (p - 1)
    return lp_norm(f, p) - dual_lq_norm(forward(f), q)
