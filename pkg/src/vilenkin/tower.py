"""Compact Vilenkin groups realized through finite quotient towers.

A tower of depth ``N`` stores the finite group ``G/G_N`` together with the
filtration ``G = G_0 > G_1 > ... > G_N``.  Three families are supported:

``vilenkin``
    the product ``Z/o_0 x Z/o_1 x ...`` with ``G_n`` the elements whose first
    ``n`` coordinates vanish;
``padic``
    the module ``(Z_l)^d`` truncated to ``(Z/l^N)^d`` with ``G_n = l^n (Z_l)^d``;
``heisenberg``
    the Heisenberg group ``H_d(Z_l)`` of unipotent upper triangular matrices,
    coordinates ``(x, y, z)`` and ``G_n`` the congruence subgroup mod ``l^n``.

Elements of ``G/G_N`` are laid out on a coordinate grid (see
:attr:`TowerSpec.grid_shape`); a function on the group is a complex vector in
C order over that grid.  Haar weights and subgroup indices are kept exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

FAMILIES = ("vilenkin", "padic", "heisenberg")


class TowerError(ValueError):
    """Invalid tower descriptor or an element that does not belong to a tower."""


def _valuation(values: np.ndarray, prime: int, cap: int) -> np.ndarray:
    """Elementwise ``prime``-adic valuation of integers, capped at ``cap`` (0 maps to cap)."""
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros(values.shape, dtype=np.int64)
    rest = values.copy()
    live = rest != 0
    out[~live] = cap
    for _ in range(cap):
        step = live & (rest % prime == 0)
        if not step.any():
            break
        out[step] += 1
        rest[step] //= prime
        live = step
    return np.minimum(out, cap)


@dataclass(frozen=True)
class TowerSpec:
    family: str
    depth: int
    orders: tuple[int, ...] = ()
    prime: int | None = None
    dim: int | None = None

    # -- derived, exact --------------------------------------------------

    @cached_property
    def kappa(self) -> tuple[int, ...]:
        """Orders ``|G_n / G_{n+1}|`` for ``n = 0..N-1``."""
        if self.family == "vilenkin":
            return tuple(self.orders[: self.depth])
        if self.family == "padic":
            return (self.prime**self.dim,) * self.depth
        return (self.prime ** (2 * self.dim + 1),) * self.depth

    @cached_property
    def indices(self) -> tuple[int, ...]:
        """``|G/G_n|`` for ``n = 0..N``."""
        out = [1]
        for k in self.kappa:
            out.append(out[-1] * k)
        return tuple(out)

    def index(self, n: int) -> int:
        return self.indices[n]

    def measure(self, n: int) -> Fraction:
        """Haar measure ``|G_n|`` of the n-th subgroup."""
        return Fraction(1, self.indices[n])

    @property
    def order(self) -> int:
        """``|G/G_N|``, the number of points carried by a function sample."""
        return self.indices[-1]

    @property
    def constant_order(self) -> bool:
        return len(set(self.kappa)) == 1

    @property
    def lie_dim(self) -> int | None:
        """Dimension of the l-adic Lie group (``None`` for product towers)."""
        if self.family == "padic":
            return self.dim
        if self.family == "heisenberg":
            return 2 * self.dim + 1
        return None

    @property
    def modulus(self) -> int | None:
        """``l^N`` for the l-adic families."""
        if self.prime is None:
            return None
        return self.prime**self.depth

    @property
    def grid_shape(self) -> tuple[int, ...]:
        if self.family == "vilenkin":
            return tuple(self.orders[: self.depth])
        if self.family == "padic":
            return (self.modulus,) * self.dim
        return (self.modulus,) * (2 * self.dim + 1)

    @property
    def ncoords(self) -> int:
        return len(self.grid_shape)

    # -- configuration ---------------------------------------------------

    def to_config(self) -> dict:
        cfg: dict = {"family": self.family, "depth": self.depth}
        if self.family == "vilenkin":
            cfg["orders"] = list(self.orders)
        else:
            cfg["prime"] = self.prime
            cfg["dim"] = self.dim
        return cfg

    @classmethod
    def from_config(cls, cfg: dict) -> "TowerSpec":
        return make_tower(
            cfg["family"],
            depth=cfg.get("depth"),
            orders=cfg.get("orders"),
            prime=cfg.get("prime"),
            dim=cfg.get("dim", 1),
        )

    def describe(self) -> str:
        if self.family == "vilenkin":
            return f"Vilenkin{list(self.kappa)}"
        if self.family == "padic":
            base = f"Z_{self.prime}" if self.dim == 1 else f"Z_{self.prime}^{self.dim}"
            return f"{base} depth {self.depth}"
        return f"H_{self.dim}(Z/{self.prime}^{self.depth})"

    # -- vectorized group structure --------------------------------------

    @cached_property
    def coords(self) -> np.ndarray:
        """All elements of ``G/G_N`` as an ``(order, ncoords)`` array, C order."""
        grids = np.indices(self.grid_shape).reshape(self.ncoords, -1)
        out = np.ascontiguousarray(grids.T.astype(np.int64))
        out.setflags(write=False)
        return out

    def ravel(self, coords: np.ndarray) -> np.ndarray:
        """Flat sample index of coordinate rows."""
        coords = np.asarray(coords, dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(coords, -1, 0)), self.grid_shape)

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Group law on broadcastable coordinate arrays (last axis = coordinates)."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        mods = np.asarray(self.grid_shape, dtype=np.int64)
        out = np.add(x, y) % mods
        if self.family == "heisenberg":
            d = self.dim
            dot = np.sum(x[..., :d] * y[..., d : 2 * d], axis=-1)
            out[..., 2 * d] = (out[..., 2 * d] + dot) % self.modulus
        return out

    def inv(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        mods = np.asarray(self.grid_shape, dtype=np.int64)
        out = (-x) % mods
        if self.family == "heisenberg":
            d = self.dim
            dot = np.sum(x[..., :d] * x[..., d : 2 * d], axis=-1)
            out[..., 2 * d] = (out[..., 2 * d] + dot) % self.modulus
        return out

    def depth_of(self, coords: np.ndarray) -> np.ndarray:
        """Largest ``n <= N`` with the element in ``G_n`` (vectorized)."""
        coords = np.asarray(coords, dtype=np.int64)
        if self.family == "vilenkin":
            nz = coords != 0
            first = np.argmax(nz, axis=-1)
            return np.where(nz.any(axis=-1), first, self.depth)
        vals = _valuation(coords, self.prime, self.depth)
        return vals.min(axis=-1)

    @cached_property
    def depths(self) -> np.ndarray:
        """Depth of every sample point."""
        out = self.depth_of(self.coords)
        out.setflags(write=False)
        return out

    def generators(self, n: int) -> np.ndarray:
        """Coordinate rows generating ``G_n`` modulo ``G_N``."""
        if not 0 <= n <= self.depth:
            raise TowerError(f"level {n} outside [0, {self.depth}]")
        rows = []
        if self.family == "vilenkin":
            for k in range(n, self.depth):
                row = [0] * self.ncoords
                row[k] = 1
                rows.append(row)
        elif n < self.depth:
            step = self.prime**n
            for k in range(self.ncoords):
                row = [0] * self.ncoords
                row[k] = step
                rows.append(row)
        return np.asarray(rows, dtype=np.int64).reshape(-1, self.ncoords)

    def translation_index(self, h: np.ndarray) -> np.ndarray:
        """Index array ``idx`` with ``f[idx][x] = f(h x)`` for coordinate row(s) ``h``."""
        h = np.asarray(h, dtype=np.int64)
        prods = self.mul(h[..., None, :], self.coords)
        return self.ravel(prods)

    def coset_mean(self, values: np.ndarray, k: int) -> np.ndarray:
        """Replace each sample by the mean of ``values`` over its ``G_k`` coset."""
        grid = np.asarray(values).reshape(self.grid_shape)
        if k == 0:
            return np.full(self.order, grid.mean())
        if k == self.depth:
            return np.asarray(values).copy()
        if self.family == "vilenkin":
            axes = tuple(range(k, self.depth))
            mean = grid.mean(axis=axes, keepdims=True)
            return np.broadcast_to(mean, self.grid_shape).reshape(-1).copy()
        # coset of G_k = coordinates fixed modulo l^k (x = r + l^k j)
        hi = self.prime ** (self.depth - k)
        lo = self.prime**k
        split = grid.reshape(sum(((hi, lo) for _ in self.grid_shape), ()))
        jaxes = tuple(range(0, 2 * self.ncoords, 2))
        mean = split.mean(axis=jaxes, keepdims=True)
        return np.broadcast_to(mean, split.shape).reshape(-1).copy()

    def subgroup_mask(self, n: int) -> np.ndarray:
        """Boolean mask of sample points lying in ``G_n``."""
        return self.depths >= n


def make_tower(
    family: str,
    depth: int | None = None,
    *,
    orders: Sequence[int] | None = None,
    prime: int | None = None,
    dim: int | None = 1,
) -> TowerSpec:
    """Validate a family descriptor and build its depth-``depth`` tower."""
    if family not in FAMILIES:
        raise TowerError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if family == "vilenkin":
        if not orders:
            raise TowerError("vilenkin family needs a non-empty list of orders")
        orders = tuple(int(o) for o in orders)
        if any(o < 2 for o in orders):
            raise TowerError(f"every order must be >= 2, got {orders}")
        if depth is None:
            depth = len(orders)
        if depth > len(orders):
            raise TowerError(f"depth {depth} exceeds the {len(orders)} orders supplied")
        if depth < 1:
            raise TowerError("depth must be >= 1")
        return TowerSpec("vilenkin", int(depth), orders=orders)

    if prime is None or depth is None:
        raise TowerError(f"{family} family needs prime and depth")
    prime, depth, dim = int(prime), int(depth), int(dim if dim is not None else 1)
    if prime < 3 or any(prime % q == 0 for q in range(2, int(prime**0.5) + 1)):
        raise TowerError(f"prime must be an odd prime, got {prime}")
    if depth < 1:
        raise TowerError("depth must be >= 1")
    if dim < 1:
        raise TowerError("dim must be >= 1")
    return TowerSpec(family, depth, prime=prime, dim=dim)


def padic(prime: int, depth: int, dim: int = 1) -> TowerSpec:
    return make_tower("padic", depth, prime=prime, dim=dim)


def heisenberg(prime: int, depth: int, dim: int = 1) -> TowerSpec:
    return make_tower("heisenberg", depth, prime=prime, dim=dim)


def vilenkin(orders: Sequence[int], depth: int | None = None) -> TowerSpec:
    return make_tower("vilenkin", depth, orders=orders)


# -- elements ----------------------------------------------------------------


@dataclass(frozen=True)
class Element:
    tower: TowerSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        shape = self.tower.grid_shape
        if len(self.coords) != len(shape):
            raise TowerError(f"expected {len(shape)} coordinates, got {len(self.coords)}")
        object.__setattr__(self, "coords", tuple(int(c) % m for c, m in zip(self.coords, shape)))

    @property
    def index(self) -> int:
        return int(self.tower.ravel(np.asarray(self.coords)))

    def __mul__(self, other: "Element") -> "Element":
        return group_law(self.tower, self, other)

    def __repr__(self) -> str:
        return f"Element{self.coords}"


@dataclass(frozen=True)
class Depth:
    depth: int
    norm: Fraction
    lie_norm: Fraction | None
    at_resolution: bool = field(default=False)


def element(tower: TowerSpec, *coords: int | Iterable[int]) -> Element:
    """Build an element; Heisenberg coordinates may be given as ``(x, y, z)`` groups."""
    flat: list[int] = []
    for c in coords:
        if isinstance(c, (tuple, list, np.ndarray)):
            flat.extend(int(v) for v in c)
        else:
            flat.append(int(c))
    return Element(tower, tuple(flat))


def identity(tower: TowerSpec) -> Element:
    return Element(tower, (0,) * tower.ncoords)


def _check(tower: TowerSpec, *xs: Element) -> None:
    for x in xs:
        if x.tower != tower:
            raise TowerError(f"element {x} belongs to {x.tower.describe()}, not {tower.describe()}")


def group_law(tower: TowerSpec, x: Element, y: Element) -> Element:
    _check(tower, x, y)
    return Element(tower, tuple(tower.mul(np.asarray(x.coords), np.asarray(y.coords)).tolist()))


def inverse(tower: TowerSpec, x: Element) -> Element:
    _check(tower, x)
    return Element(tower, tuple(tower.inv(np.asarray(x.coords)).tolist()))


def commutator(tower: TowerSpec, x: Element, y: Element) -> Element:
    """``x y x^-1 y^-1``."""
    return group_law(tower, group_law(tower, x, y), group_law(tower, inverse(tower, x), inverse(tower, y)))


def depth_and_norm(tower: TowerSpec, x: Element) -> Depth:
    """Depth, ultrametric norm ``|x|`` and (l-adic families) Lie norm of ``x``.

    Elements of ``G_N`` are indistinguishable from the identity at this
    resolution: they report depth ``N``, norm 0 and ``at_resolution=True``.
    """
    _check(tower, x)
    n = int(tower.depth_of(np.asarray(x.coords)))
    lie = None
    if n >= tower.depth:
        if tower.prime is not None:
            lie = Fraction(0)
        return Depth(tower.depth, Fraction(0), lie, True)
    if tower.prime is not None:
        lie = Fraction(1, tower.prime**n)
    return Depth(n, tower.measure(n), lie, False)


def enumerate_cosets(tower: TowerSpec, n: int) -> list[Element]:
    """Canonical representatives of ``G/G_n`` (trailing coordinate parts zeroed)."""
    if not 0 <= n <= tower.depth:
        raise TowerError(f"level {n} outside [0, {tower.depth}]")
    if tower.family == "vilenkin":
        shape = tower.grid_shape[:n] + (1,) * (tower.depth - n)
    else:
        shape = (tower.prime**n,) * tower.ncoords
    grid = np.indices(shape).reshape(len(shape), -1).T
    return [Element(tower, tuple(row)) for row in grid.tolist()]


def haar_average(tower: TowerSpec, values: np.ndarray) -> complex:
    """Integral against normalized Haar measure of a depth-N sample."""
    values = np.asarray(values)
    if values.shape != (tower.order,):
        raise TowerError(f"sample of shape {values.shape} does not match |G/G_N| = {tower.order}")
    return complex(values.mean())
