"""Discrete BMO, weak-BMO, special-atom and Zygmund-class computations on uniform grids."""

__version__ = "0.1.0"

from .atoms import (AtomDictionary, ConstantAtom, Decomposition, SpecialAtom, atomic_dual_norm, b1_norm_exact,
                    build_dictionary, greedy_decompose, holder_check, make_atom, pair)
from .grid import Cube, GridFunction, PrefixTable, enumerate_cubes, generate, load
from .maximal import (NormReport, bmo_norm, factor2_check, oscillation_profile, rotate, sharp_maximal, small_m,
                      weak_bmo_norm, weak_bmo_star_norm, weak_maximal)
from .optimize import L1Problem, L1Solution, solve_l1
from .poisson import b1a_norm, bmoa_norm, bmoa_weak_norm, extend, fprime_bound_ratio, hardy_norm, poisson_kernel
from .zygmund import bridge_check, lambda_prime_norm, second_difference, zygmund_seminorm

__all__ = [
    "AtomDictionary", "ConstantAtom", "Cube", "Decomposition", "GridFunction", "L1Problem", "L1Solution",
    "NormReport", "PrefixTable", "SpecialAtom", "atomic_dual_norm", "b1_norm_exact", "b1a_norm", "bmo_norm",
    "bmoa_norm", "bmoa_weak_norm", "bridge_check", "build_dictionary", "enumerate_cubes", "extend",
    "factor2_check", "fprime_bound_ratio", "generate", "greedy_decompose", "hardy_norm", "holder_check",
    "lambda_prime_norm", "load", "make_atom", "oscillation_profile", "pair", "poisson_kernel", "rotate",
    "second_difference", "sharp_maximal", "small_m", "solve_l1", "weak_bmo_norm", "weak_bmo_star_norm",
    "weak_maximal", "zygmund_seminorm",
]
