"""Harmonic analysis on compact Vilenkin towers: duals, Fourier transform,
Vladimirov-Taibleson operators and regularity checks."""

__version__ = "0.1.0"

from .dual import Irrep, conductor_level, dual_arrays, dual_table, enumerate_dual, rep_integral_over_ball, rep_matrix
from .families import FunctionSpec, generate_function
from .regularity import (
    DecayFit,
    DegenerateWindow,
    ModulusTable,
    condition_a_constant,
    dini_lipschitz_check,
    heisenberg_witnesses,
    lipschitz_fit,
    modulus,
    platonov_check,
    tail_sum,
    titchmarsh_first_check,
    titchmarsh_second_check,
)
from .tower import (
    Element,
    TowerError,
    TowerSpec,
    depth_and_norm,
    element,
    group_law,
    heisenberg,
    inverse as group_inverse,
    make_tower,
    padic,
    vilenkin,
)
from .transform import DualCoefficients, FunctionSample, forward, inverse, translate
from .vladimirov import gamma, sobolev_norm, vt_apply_direct, vt_apply_spectral, vt_symbol
