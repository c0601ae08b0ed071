"""Quadrature convention shared by every module.

Fields decompose as a = X + iP, so X = (a + a†)/2, P = (a − a†)/(2i) and the
vacuum variance of either quadrature is 1/4. Separable limits such as
E₁ ≥ 1 and ½(g² + 1/g²) are stated in this convention.
"""
import numpy as np

CONVENTION_TAG = "a=X+iP;var0=1/4"
VACUUM_VARIANCE = 0.25

# top-level Fock population allowed before a state is flagged non-converged
TAIL_TOLERANCE = 1e-8
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10

MIN_CUTOFF = 16
MAX_CUTOFF = 64


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def quadrature_x(dim):
    a = annihilation(dim)
    return (a + a.conj().T) / 2


def quadrature_p(dim):
    a = annihilation(dim)
    return (a - a.conj().T) / 2j
