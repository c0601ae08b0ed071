"""Braunstein–Kimble teleportation through an arbitrary two-mode channel.

Characteristic functions use D(λ) = exp(λa† − λ*a). The protocol maps the
input as C_out(λ) = C_in(λ) · C_AB(λ*, λ), and overlaps follow from
Tr[ρσ] = (1/π) ∫ C_ρ(λ) C_σ(−λ) d²λ.

The p_m channels are mixtures of quadrature eigenstates with no Fock-space
representation; they enter only through C_p(k) = ∫ p_m(X) e^{−2√2 ikX} dX.
"""
import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad, simpson
from scipy.special import gammaln

from .epr_measure import EprMeasurementConfig, epr_moments, exact_expectation
from .fock_core import PhaseSpaceGrid, displacement_diagonal, joint_characteristic
from .utils import EprwitError
from .witness_bounds import TestFunction

CLASSICAL_LIMIT = 0.5
DEFAULT_EXTENT = 6.0
DEFAULT_POINTS = 121
FOCK_STEP = 0.05
PM_CUT = 1.0
EDGE_TOLERANCE = 1e-6


class PmChannelSpec(object):
    """Channel whose EPR quadratures are distributed as p_m; m sets the tail flatness."""

    def __init__(self, m):
        if int(m) != m or m < 1:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"p_m channel index must be an integer >= 1, got {m}")
        self.m = int(m)
        # p_m(X) = A |X| exp(−B |X|^{2/m})
        self.log_a = math.log(2) + gammaln(2 * self.m + 1) - 2 * gammaln(self.m + 1)
        self.log_b = (math.log(2) + gammaln(2 * self.m + 1) - gammaln(self.m + 1)) / self.m

    def __repr__(self):  # pragma: no cover
        return f"<PmChannelSpec m={self.m}>"

    @property
    def label(self):
        return f"pm:m={self.m}"


class TeleportReport(object):
    def __init__(self, fidelity, e1, channel):
        self.fidelity = float(fidelity)
        self.e1 = float(e1)
        self.lower_bound = em_fidelity_bound(max(self.e1, 0.0))
        self.channel = channel

    def __repr__(self):  # pragma: no cover
        return f"<TeleportReport {self.channel} F={self.fidelity:.6g} E1={self.e1:.6g}>"

    @property
    def beats_classical(self):
        return self.fidelity > CLASSICAL_LIMIT

    def to_dict(self):
        return {
            "channel": self.channel,
            "fidelity": self.fidelity,
            "E1": self.e1,
            "bound": self.lower_bound,
            "beats_classical": self.beats_classical,
        }


def em_fidelity_bound(e1):
    """F ≥ 1 − E₁."""
    if e1 < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"E1 must be >= 0, got {e1}")
    return 1 - e1


def fidelity_via_epr(state, cfg=None, label="state"):
    """Vacuum-input fidelity <e^{−(û² + v̂²)}> together with E₁."""
    cfg = cfg or EprMeasurementConfig()
    fidelity = exact_expectation(state, TestFunction(1.0), cfg).mean
    e1 = epr_moments(state, 1, cfg)[0]
    return TeleportReport(fidelity, e1, label)


def epr_series_partial_sums(moments):
    """Partial sums of Σ_m (−1)^m E_m/m!, starting from E₀ = 1."""
    terms = [1.0] + [(-1) ** m * e / math.factorial(m) for m, e in enumerate(moments, start=1)]
    return np.cumsum(terms)


def vacuum_characteristic(grid):
    return grid.with_values(np.exp(-np.abs(grid.lambdas()) ** 2 / 2), label="C_vacuum")


def coherent_characteristic(beta, grid):
    lams = grid.lambdas()
    beta = complex(beta)
    values = np.exp(-np.abs(lams) ** 2 / 2 + lams * beta.conjugate() - lams.conj() * beta)
    return grid.with_values(values, label=f"C_coherent({beta})")


def fock_characteristic(n, grid):
    return grid.with_values(displacement_diagonal(n, grid.lambdas()).astype(complex), label=f"C_fock({n})")


def ideal_channel(lams):
    return np.ones(np.shape(lams), dtype=complex)


def tmss_channel(s):
    """C_AB(λ*, λ) = exp(−e^{−2s}|λ|²) for the two-mode squeezed vacuum."""
    def evaluate(lams):
        return np.exp(-math.exp(-2 * s) * np.abs(lams) ** 2).astype(complex)
    return evaluate


def state_channel(state):
    """C_AB(λ*, λ) of a Fock-represented resource state."""
    def evaluate(lams):
        lams = np.asarray(lams, dtype=complex)
        return joint_characteristic(state, lams.conj(), lams)
    return evaluate


def pm_channel(spec, extent=DEFAULT_EXTENT, points=DEFAULT_POINTS):
    """C_p(Re λ) C_p(Im λ), with C_p tabulated on the grid axis and interpolated."""
    axis = np.linspace(0, extent * math.sqrt(2), points)
    table = np.array([pm_channel_characteristic(spec, k).real for k in axis])

    def evaluate(lams):
        lams = np.asarray(lams, dtype=complex)
        cx = np.interp(np.abs(lams.real), axis, table, right=0.0)
        cy = np.interp(np.abs(lams.imag), axis, table, right=0.0)
        return (cx * cy).astype(complex)
    return evaluate


def bk_output_characteristic(c_in, c_ab):
    """C_out(λ) = C_in(λ) · C_AB(λ*, λ).

    `c_ab` is either a callable on an array of λ or a PhaseSpaceGrid that must
    be aligned with `c_in`.
    """
    if isinstance(c_ab, PhaseSpaceGrid):
        if not c_in.aligned_with(c_ab):
            raise EprwitError(
                error_type="GridMismatch",
                message=f"Channel grid {c_ab.shape} does not match input grid {c_in.shape}")
        channel = c_ab.values
        converged = c_in.converged and c_ab.converged
    else:
        channel = c_ab(c_in.lambdas())
        converged = c_in.converged
    return c_in.with_values(c_in.values * channel, converged=converged, label="C_out")


def _check_symmetric(grid):
    if not (np.allclose(grid.x, -grid.x[::-1]) and np.allclose(grid.y, -grid.y[::-1])):
        raise EprwitError(
            error_type="GridMismatch",
            message="Overlap integrals need a grid symmetric under λ → −λ")


def characteristic_overlap(c_rho, c_sigma):
    """Tr[ρσ] = (1/π) ∫ C_ρ(λ) C_σ(−λ) d²λ."""
    if not c_rho.aligned_with(c_sigma):
        raise EprwitError(
            error_type="GridMismatch",
            message=f"Grids {c_rho.shape} and {c_sigma.shape} are not aligned")
    _check_symmetric(c_rho)
    mirrored = c_sigma.values[::-1, ::-1]
    return float(np.real(c_rho.integrate(c_rho.values * mirrored)) / math.pi)


def characteristic_fidelity(c_in, channel):
    """Tr[ρ_in ρ_out] for a pure input teleported through `channel`."""
    c_out = bk_output_characteristic(c_in, channel)
    return characteristic_overlap(c_in, c_out)


def output_wigner_cut(c_out, alphas):
    """W(α_x, 0) = (1/π²) ∫ C_out(λ) e^{−2iα_x Im λ} d²λ on the given α_x values."""
    alphas = np.asarray(alphas, dtype=float)
    phases = np.exp(-2j * np.multiply.outer(c_out.y, alphas))
    integrand = c_out.values[:, :, np.newaxis] * phases[np.newaxis, :, :]
    inner = simpson(integrand, x=c_out.y, axis=1)
    return np.real(simpson(inner, x=c_out.x, axis=0)) / math.pi ** 2


def pm_density(spec, x):
    """p_m(X) = A|X| exp(−B|X|^{2/m}) with A = 2(2m)!/(m!)², B = (2(2m)!/m!)^{1/m}."""
    x = np.abs(np.asarray(x, dtype=float))
    b = math.exp(spec.log_b)
    flat = x.reshape(-1)
    out = np.zeros(flat.shape)
    positive = flat > 0
    out[positive] = np.exp(spec.log_a + np.log(flat[positive]) - b * flat[positive] ** (2 / spec.m))
    return out.reshape(x.shape)


def _gamma_density(t, m):
    return math.exp((m - 1) * math.log(t) - t - gammaln(m)) if t > 0 else (1.0 if m == 1 else 0.0)


def _gamma_expectation(m, func, upper=np.inf):
    """E[func(t)] for t ~ Gamma(m, 1) restricted to t < upper.

    |X| = (t/B)^{m/2} maps p_m onto this Gamma law, which is smooth where
    p_m has its cusp at the origin.
    """
    # the Gamma(m) weight is below e^{-40} past this point
    upper = min(upper, m + 40 * math.sqrt(m) + 50)
    value, _ = quad(
        lambda t: _gamma_density(t, m) * func(t), 0, upper,
        points=[min(m, upper / 2)],
        limit=400, epsabs=1e-12, epsrel=1e-10)
    return value


def pm_moment(spec, power):
    """<|X|^power> under p_m."""
    b = math.exp(spec.log_b)
    return _gamma_expectation(spec.m, lambda t: (t / b) ** (spec.m * power / 2))


def f1(spec):
    """f₁ = <e^{−2X²}> under p_m."""
    b = math.exp(spec.log_b)
    return _gamma_expectation(spec.m, lambda t: math.exp(-2 * (t / b) ** spec.m))


def pm_channel_characteristic(spec, k):
    """C_p(k) = ∫ p_m(X) e^{−2√2 ikX} dX, real and even in k."""
    omega = 2 * math.sqrt(2) * abs(k)
    if omega == 0:
        return 1.0 + 0j

    b = math.exp(spec.log_b)
    cut_t = b * PM_CUT ** (2 / spec.m)
    # |X| < PM_CUT in Gamma variables, the flat tail with a Fourier rule
    core = _gamma_expectation(spec.m, lambda t: math.cos(omega * (t / b) ** (spec.m / 2)), upper=cut_t)
    with warnings.catch_warnings():
        # error here is bounded by the p_m mass beyond PM_CUT
        warnings.simplefilter("ignore", IntegrationWarning)
        tail, _ = quad(lambda x: float(pm_density(spec, x)), PM_CUT, np.inf, weight="cos", wvar=omega, limlst=100)
    return complex(core + 2 * tail)


def fock_input_fidelity(spec, n, extent=None, step=FOCK_STEP):
    """Fidelity of |n> teleported through the p_m channel (ideal channel for spec=None).

    F = (1/π) ∫ C_n(λ)² C_p(λ_x) C_p(λ_y) d²λ with C_n(λ) = e^{−|λ|²/2} L_n(|λ|²).
    The window grows with n unless `extent` is given; a window that cuts C_n
    above EDGE_TOLERANCE raises NonConverged.
    """
    if n < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"Fock index must be >= 0, got {n}")
    if extent is None:
        extent = DEFAULT_EXTENT + max(0.0, 2 * math.sqrt(n) - 2)

    points = 2 * int(round(extent / step)) + 1
    grid = PhaseSpaceGrid.square(extent, points, label=f"fock({n})")
    c_in = fock_characteristic(n, grid)
    edge = max(np.max(np.abs(c_in.values[[0, -1], :])), np.max(np.abs(c_in.values[:, [0, -1]])))
    if edge > EDGE_TOLERANCE:
        raise EprwitError(
            error_type="NonConverged",
            message=f"C_{n} is {edge:.3g} on the edge of the |λ| <= {extent} window; widen the extent")

    if spec is None:
        channel = np.ones(grid.shape)
    else:
        # odd symmetric grid: C_p is even, so tabulate k >= 0 and mirror
        half = grid.x[points // 2:]
        table = np.array([pm_channel_characteristic(spec, k).real for k in half])
        axis = np.concatenate([table[:0:-1], table])
        channel = np.multiply.outer(axis, axis)

    c_out = c_in.with_values(c_in.values * channel)
    return characteristic_overlap(c_in, c_out)


def no_epr_report(spec):
    """The p_m channel: E₁ = 2<X₁²> + 2<P₂²> ≥ 1, yet vacuum fidelity f₁² > 1/2 for m ≥ 2."""
    second = pm_moment(spec, 2)
    e1 = 4 * second
    return TeleportReport(f1(spec) ** 2, e1, spec.label)


def coherent_fidelity_tmss(s):
    """Closed form 1/(1 + e^{−2s}) for any coherent input through TMSS(s)."""
    return 1 / (1 + math.exp(-2 * s))
