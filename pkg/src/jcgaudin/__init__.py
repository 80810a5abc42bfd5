"""Numerical toolkit for the classical Jaynes-Cummings-Gaudin chain.

The package builds the commuting Hamiltonian family of n spins coupled to a
harmonic mode, locates the critical points of rank zero, classifies them
through the roots of the spectral function, and follows the exact dynamics
on and near the degenerate fibers: normal coordinates, separated variables,
multisoliton reconstruction, action integrals on the spectral curve, and the
symplectic invariants of the focus-focus singularities.

Modules
-------
model        phase space, brackets, commuting flows, spectral polynomial
bethe        critical points and root classification
normal_form  linearized coordinates and generator matrices near criticality
separated    separation of variables and closed-form reconstruction
soliton      exact solutions on the degenerate fiber and their divisor
curve        spectral curve, branch points, A/B cycle action integrals
invariants   focus-focus invariants, regularized form, monodromy
service      JSON request/response layer shared by the HTTP app and the CLI
cli          command line entry point (`jcg`)
"""

__version__ = "0.1.0"

from .errors import JcgError, NumericError, UsageError, ValidationError

__all__ = [
    "JcgError",
    "NumericError",
    "UsageError",
    "ValidationError",
    "__version__",
]
