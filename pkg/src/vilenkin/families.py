"""Function families used by the experiments.

``random_fourier`` and ``dini`` draw an isotropic Gaussian block for every
nontrivial irrep and rescale each level shell so that the Fourier tail
``T(k) = sum_{level > k} d ||c||_HS^2`` follows a prescribed profile exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dual import dual_arrays, enumerate_dual
from .tower import TowerError, TowerSpec
from .transform import DualCoefficients, FunctionSample, inverse

FAMILIES = ("indicator", "radial", "random_fourier", "dini", "random", "values")
SEEDED = ("random_fourier", "dini", "random")


@dataclass(frozen=True)
class FunctionSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def to_config(self) -> dict:
        out = {"family": self.family, "params": dict(self.params)}
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_config(cls, cfg: dict) -> "FunctionSpec":
        if "family" not in cfg:
            raise ValueError("function spec needs a 'family'")
        return cls(cfg["family"], dict(cfg.get("params", {})), cfg.get("seed"))


def radial_values(t: TowerSpec, alpha: float) -> np.ndarray:
    """``|x|^alpha``, with ``|x| = 0`` at sample points inside ``G_N``."""
    depths = t.depths
    idx = np.asarray(t.indices, dtype=float)[depths]
    out = idx ** -float(alpha)
    out[depths == t.depth] = 0.0
    return out


def power_tail(t: TowerSpec, alpha: float) -> np.ndarray:
    """Target tails ``|G/G_k|^(-2 alpha)`` for ``k < N`` and 0 at ``k = N``."""
    x = np.asarray(t.indices, dtype=float)
    out = x ** (-2.0 * alpha)
    out[-1] = 0.0
    return out


def dini_tail(t: TowerSpec, alpha: float, nu: float) -> np.ndarray:
    """Nonincreasing envelope of ``|G/G_k|^(-2 alpha) (log |G/G_k|)^(2 nu)``.

    ``T(k) = max_{j >= max(k, 1)} profile(j)`` for ``k < N``; the raw profile
    vanishes at ``k = 0`` and need not be monotone at small ``k``.
    """
    x = np.asarray(t.indices[1:], dtype=float)
    profile = x ** (-2.0 * alpha) * np.log(x) ** (2.0 * nu)
    env = np.maximum.accumulate(profile[::-1])[::-1]
    out = np.empty(t.depth + 1)
    out[0] = env[0]
    out[1 : t.depth] = env[: t.depth - 1]
    out[-1] = 0.0
    return out


def shaped_coefficients(t: TowerSpec, tail: np.ndarray, rng: np.random.Generator) -> DualCoefficients:
    """Gaussian blocks rescaled so that the tail sums equal ``tail`` exactly."""
    tail = np.asarray(tail, dtype=float)
    if tail.shape != (t.depth + 1,):
        raise ValueError(f"tail profile needs {t.depth + 1} entries")
    mass = tail[:-1] - tail[1:]  # mass[n-1] lives on level n
    if np.any(mass < -1e-15 * max(tail[0], 1.0)):
        raise ValueError("tail profile must be nonincreasing")
    dims, levels, _ = dual_arrays(t)
    blocks = []
    for irrep in enumerate_dual(t):
        shape = (irrep.dim, irrep.dim)
        if irrep.trivial:
            blocks.append(np.ones(shape, dtype=complex))
        else:
            blocks.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    hs2 = np.fromiter((np.vdot(b, b).real for b in blocks), dtype=float, count=len(blocks))
    shell = np.bincount(levels, weights=dims * hs2, minlength=t.depth + 1)
    scale = np.zeros(t.depth + 1)
    for n in range(1, t.depth + 1):
        if shell[n] > 0:
            scale[n] = np.sqrt(max(mass[n - 1], 0.0) / shell[n])
    return DualCoefficients(t, tuple(b * (1.0 if lv == 0 else scale[lv]) for b, lv in zip(blocks, levels)))


def _require_seed(spec: FunctionSpec) -> int:
    if spec.seed is None:
        raise ValueError(f"family {spec.family!r} needs an explicit seed")
    return int(spec.seed)


def generate_function(t: TowerSpec, spec: FunctionSpec | dict) -> FunctionSample:
    if isinstance(spec, dict):
        spec = FunctionSpec.from_config(spec)
    fam, params = spec.family, spec.params
    if fam not in FAMILIES:
        raise ValueError(f"unknown function family {fam!r}; choose from {FAMILIES}")
    if fam == "indicator":
        m = int(params.get("m", 1))
        if not 0 <= m < t.depth:
            raise TowerError(f"indicator of G_m needs 0 <= m < N = {t.depth}")
        return FunctionSample(t, t.subgroup_mask(m).astype(float))
    if fam == "radial":
        return FunctionSample(t, radial_values(t, float(params.get("alpha", 1.0))))
    if fam == "values":
        return FunctionSample(t, np.asarray(params["values"], dtype=complex))
    rng = np.random.default_rng(_require_seed(spec))
    if fam == "random":
        shape = (t.order,)
        if params.get("real", False):
            return FunctionSample(t, rng.standard_normal(shape))
        return FunctionSample(t, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    alpha = float(params["alpha"])
    if fam == "random_fourier":
        tail = power_tail(t, alpha)
    else:
        tail = dini_tail(t, alpha, float(params.get("nu", 0.0)))
    return inverse(shaped_coefficients(t, tail, rng))
