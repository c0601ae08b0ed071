"""Example states: dephased cats, c₀|00>+c₁|11>, TMSS with photon
subtraction/addition, and the separable products used as references."""
import math

import numpy as np

from .conventions import MIN_CUTOFF
from .fock_core import (
    TwoModeState, adaptive_cutoff, coherent_ket, make_fock_superposition,
    make_product_state, thermal_populations)
from .utils import EprwitError


class CatSpec(object):
    def __init__(self, nu, p):
        if nu < 0:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Coherent amplitude must be >= 0, got {nu}")
        if not 0 <= p <= 1:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Dephasing parameter p must be in [0, 1], got {p}")
        if nu == 0 and p == 1:
            raise EprwitError(
                error_type="InvalidParameter",
                message="The cat with nu=0 and p=1 has zero norm")
        self.nu = float(nu)
        self.p = float(p)

    def __repr__(self):  # pragma: no cover
        return f"<CatSpec nu={self.nu} p={self.p}>"


class TmssSpec(object):
    NONE = "none"
    SUBTRACT_BOTH = "subtract_both"
    ADD_BOTH = "add_both"
    OPERATIONS = (NONE, SUBTRACT_BOTH, ADD_BOTH)

    def __init__(self, s, operation=NONE):
        if s < 0:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Squeezing must be >= 0, got {s}")
        if operation not in self.OPERATIONS:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Unknown TMSS operation '{operation}', expected one of {', '.join(self.OPERATIONS)}")
        if operation == self.SUBTRACT_BOTH and s == 0:
            raise EprwitError(
                error_type="InvalidParameter",
                message="Photon subtraction from the vacuum (s=0) has zero norm")
        self.s = float(s)
        self.operation = operation

    def __repr__(self):  # pragma: no cover
        return f"<TmssSpec s={self.s} {self.operation}>"


def dephased_cat_normalization(spec):
    """Trace of the unnormalised cat, 2 − 2p·exp(−4ν²)."""
    return 2 - 2 * spec.p * math.exp(-4 * spec.nu ** 2)


def make_dephased_cat(spec):
    """ρ ∝ |ν,ν><ν,ν| + |−ν,−ν><−ν,−ν| − p(|ν,ν><−ν,−ν| + h.c.)."""

    def build(dim):
        plus = np.outer(coherent_ket(spec.nu, dim), coherent_ket(spec.nu, dim)).reshape(-1)
        minus = np.outer(coherent_ket(-spec.nu, dim), coherent_ket(-spec.nu, dim)).reshape(-1)
        matrix = np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()) \
            - spec.p * (np.outer(plus, minus.conj()) + np.outer(minus, plus.conj()))
        if spec.p == 1:
            return TwoModeState.from_ket((plus - minus).reshape(dim, dim), normalize=True)
        return TwoModeState.from_matrix(matrix, dim, dim, normalize=True)

    return adaptive_cutoff(build, mean_photons=spec.nu ** 2)


def tmss_amplitudes(s, operation, dim):
    """Schmidt amplitudes c_n on |n, n>, unnormalised for the ladder cases."""
    lam = math.tanh(s)
    n = np.arange(dim, dtype=float)
    base = math.sqrt(1 - lam ** 2) * lam ** n

    if operation == TmssSpec.NONE:
        return base
    if operation == TmssSpec.SUBTRACT_BOTH:
        # a_A a_B |n, n> = n |n−1, n−1>
        out = np.zeros(dim)
        out[:-1] = (n[1:]) * base[1:]
        return out
    # a_A† a_B† |n, n> = (n+1) |n+1, n+1>
    out = np.zeros(dim)
    out[1:] = (n[:-1] + 1) * base[:-1]
    return out


def tmss_mean_photons(spec):
    """Mean photon number per mode (closed forms for the three families)."""
    nbar = math.sinh(spec.s) ** 2
    if spec.operation == TmssSpec.NONE:
        return nbar
    lam2 = math.tanh(spec.s) ** 2
    if spec.operation == TmssSpec.SUBTRACT_BOTH:
        # Σ n² λ^{2n} (n−1) / Σ n² λ^{2n}
        return (1 + 4 * lam2 + lam2 ** 2) / ((1 - lam2) * (1 + lam2)) - 1
    # Σ (n+1)³ λ^{2n} / Σ (n+1)² λ^{2n}
    return (1 + 4 * lam2 + lam2 ** 2) / ((1 - lam2) * (1 + lam2))


def make_tmss(spec):
    def build(dim):
        amplitudes = tmss_amplitudes(spec.s, spec.operation, dim)
        return TwoModeState.from_ket(np.diag(amplitudes).astype(complex), normalize=True)

    return adaptive_cutoff(build, mean_photons=tmss_mean_photons(spec))


def energy_matched_tmss(spec):
    """Plain TMSS whose mean photon number per mode equals that of `spec`."""
    nbar = tmss_mean_photons(spec)
    return TmssSpec(math.asinh(math.sqrt(nbar)))


def make_psi_b(c0, phase=0.0):
    """c₀|00> + c₁|11> with c₁ = e^{iθ}√(1 − c₀²)."""
    if not 0 <= c0 <= 1:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"c0 must be in [0, 1], got {c0}")
    c1 = np.exp(1j * phase) * math.sqrt(max(0.0, 1 - c0 ** 2))
    return make_fock_superposition([(0, 0, c0), (1, 1, c1)])


def make_vacuum(dim=MIN_CUTOFF):
    return make_fock_superposition([(0, 0, 1.0)], dims=(dim, dim))


def make_coherent_pair(alpha, beta):
    def build(dim):
        return make_product_state(coherent_ket(alpha, dim), coherent_ket(beta, dim))

    return adaptive_cutoff(build, mean_photons=max(abs(alpha), abs(beta)) ** 2)


def make_thermal_coherent(nth, beta):
    """Thermal state (occupation nth) on A times coherent |β> on B."""
    def build(dim):
        thermal = np.diag(thermal_populations(nth, dim)).astype(complex)
        return make_product_state(thermal, coherent_ket(beta, dim))

    return adaptive_cutoff(build, mean_photons=max(nth, abs(beta) ** 2))


def state_from_params(family, params):
    """Build a catalog state from a family tag and a parameter dict."""
    try:
        if family == "cat":
            return make_dephased_cat(CatSpec(params.get("nu", 0.5), params.get("p", 0.3)))
        if family == "tmss":
            operation = {
                "none": TmssSpec.NONE,
                "subtract": TmssSpec.SUBTRACT_BOTH,
                "subtract_both": TmssSpec.SUBTRACT_BOTH,
                "add": TmssSpec.ADD_BOTH,
                "add_both": TmssSpec.ADD_BOTH,
            }.get(params.get("op", "none"))
            if operation is None:
                raise EprwitError(
                    error_type="InvalidConfig",
                    message=f"Unknown TMSS operation '{params.get('op')}'")
            return make_tmss(TmssSpec(params.get("s", 0.5), operation))
        if family == "psi":
            return make_psi_b(params.get("c0", 1 / math.sqrt(2)), params.get("phase", 0.0))
        if family == "coherent":
            return make_coherent_pair(complex(params.get("a", 0.0)), complex(params.get("b", 0.0)))
        if family == "thermal":
            return make_thermal_coherent(params.get("nth", 0.1), complex(params.get("b", 0.0)))
        if family == "vacuum":
            return make_vacuum()
    except TypeError as e:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Bad parameters for state family '{family}': {params}",
            source=e)

    raise EprwitError(
        error_type="InvalidConfig",
        message=f"Unknown state family '{family}'")
