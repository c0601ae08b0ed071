"""Covariance-matrix criteria used as baselines: Simon (PPT) and Duan."""
import math

import numpy as np
from scipy.optimize import brentq

from .conventions import VACUUM_VARIANCE
from .fock_core import covariance_matrix
from .state_catalog import TmssSpec, make_tmss
from .utils import EprwitError
from .witness_bounds import duan_bound

OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])
BONA_FIDE_TOLERANCE = 1e-9
BOUNDARY_TOLERANCE = 1e-10


class CovarianceReport(object):
    def __init__(self, covariance, means, nu_minus, entangled, symplectic):
        self.covariance = covariance
        self.means = means
        self.nu_minus = float(nu_minus)
        self.entangled = bool(entangled)
        self.symplectic = symplectic

    def __repr__(self):  # pragma: no cover
        return f"<CovarianceReport nu_minus={self.nu_minus:.6g} entangled={self.entangled}>"

    def to_dict(self):
        return {
            "criterion": "simon",
            "nu_minus": self.nu_minus,
            "boundary": VACUUM_VARIANCE,
            "entangled": self.entangled,
            "covariance": self.covariance.tolist(),
            "means": self.means.tolist(),
        }


class DuanReport(object):
    def __init__(self, e1_prime, bound, entangled, g, phi_a, phi_b):
        self.e1_prime = float(e1_prime)
        self.bound = float(bound)
        self.entangled = bool(entangled)
        self.g = g
        self.phi_a = phi_a
        self.phi_b = phi_b

    def __repr__(self):  # pragma: no cover
        return f"<DuanReport E1'={self.e1_prime:.6g} bound={self.bound:.6g}>"

    def to_dict(self):
        return {
            "criterion": "duan",
            "E1_prime": self.e1_prime,
            "bound": self.bound,
            "entangled": self.entangled,
            "g": self.g,
            "phiA": self.phi_a,
            "phiB": self.phi_b,
        }


def symplectic_eigenvalues(cov):
    """Symplectic spectrum (ν₋, ν₊) of a two-mode covariance matrix."""
    values = np.abs(np.linalg.eigvals(1j * OMEGA @ cov))
    values = np.sort(values)
    # eigenvalues come in ± pairs
    return values[0::2]


def check_bona_fide(cov):
    """Raise when V + (i/4)Ω is not positive semidefinite."""
    smallest = np.linalg.eigvalsh(cov + 1j * VACUUM_VARIANCE * OMEGA)[0]
    if smallest < -BONA_FIDE_TOLERANCE:
        raise EprwitError(
            error_type="Unphysical",
            message=f"Covariance matrix violates the uncertainty relation (eigenvalue {smallest:.3g})")


def simon_test(state):
    """Entangled iff the partially transposed covariance has ν̃₋ < 1/4."""
    cov, means = covariance_matrix(state)
    check_bona_fide(cov)
    transposed = PARTIAL_TRANSPOSE @ cov @ PARTIAL_TRANSPOSE
    spectrum = symplectic_eigenvalues(transposed)
    nu_minus = spectrum[0]
    return CovarianceReport(
        cov, means, nu_minus, nu_minus < VACUUM_VARIANCE - BOUNDARY_TOLERANCE, spectrum)


def rotation(phi_a, phi_b):
    """Block rotation with X′ = cosφ X − sinφ P, P′ = sinφ X + cosφ P per mode."""
    def block(phi):
        c, s = math.cos(phi), math.sin(phi)
        return np.array([[c, -s], [s, c]])

    out = np.zeros((4, 4))
    out[:2, :2] = block(phi_a)
    out[2:, 2:] = block(phi_b)
    return out


def rotate_covariance(cov, phi_a, phi_b):
    r = rotation(phi_a, phi_b)
    return r @ cov @ r.T


def duan_test(state, g=1.0, phi_a=0.0, phi_b=0.0):
    """Var(û′) + Var(v̂′) with û′ = |g|X_A − X_B/g, v̂′ = |g|P_A + P_B/g after local rotations."""
    bound = duan_bound(g)
    cov, _ = covariance_matrix(state)
    rotated = rotate_covariance(cov, phi_a, phi_b)
    u = np.array([abs(g), 0.0, -1 / g, 0.0])
    v = np.array([0.0, abs(g), 0.0, 1 / g])
    e1_prime = u @ rotated @ u + v @ rotated @ v
    return DuanReport(
        e1_prime, bound, e1_prime < bound - BOUNDARY_TOLERANCE, g, phi_a, phi_b)


def simon_squeezing_threshold(operation, lower=0.05, upper=1.0, tolerance=1e-4):
    """Squeezing s above which the Simon test detects the TMSS family `operation`."""
    def margin(s):
        return simon_test(make_tmss(TmssSpec(s, operation))).nu_minus - VACUUM_VARIANCE

    if margin(lower) * margin(upper) > 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"Simon verdict does not change between s={lower} and s={upper}")
    return brentq(margin, lower, upper, xtol=tolerance)
