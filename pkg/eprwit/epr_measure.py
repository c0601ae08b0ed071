"""EPR-operator statistics from two homodyne detectors behind a 50:50 splitter.

Modes A and B pick up local phases φ_A, φ_B, meet on the splitter, and X̂₁ is
read at output 1 and P̂₂ at output 2. Then X_A′ − X_B′ = √2 x₁ and
P_A′ + P_B′ = √2 p₂, so every run yields o_EPR = 2x₁² + 2p₂².
"""
import math

import numpy as np
from scipy.integrate import simpson

from .fock_core import ModeTransform, PhaseSpaceGrid, covariance_matrix, transform_kets
from .noise_channels import apply_loss_thermal
from .utils import EprwitError, chunked, shard_rng

DEFAULT_POINTS = 2049
DEFAULT_SPAN = 8.0
MIN_SPAN = 6.0
NORMALIZATION_TOLERANCE = 1e-6
SIGNIFICANCE_THRESHOLD = 3.0
EXACT_TOLERANCE = 1e-9
SHARD_SIZE = 65536
SAMPLE_HEADER = "x1,p2,o_epr"


class EprMeasurementConfig(object):
    def __init__(self, phi_a=0.0, phi_b=0.0, g=1.0, N=100000, seed=0,
                 points=DEFAULT_POINTS, span=DEFAULT_SPAN, noise=None):
        if g != 1:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"The joint (x1, p2) measurement only realises gain g=1, got g={g}; use duan_test or gain bounds for g != 1")
        if int(N) < 1:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Sample count N must be >= 1, got {N}")
        if span < MIN_SPAN:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Grid must cover at least {MIN_SPAN} standard deviations, got span={span}")
        if int(points) < 3:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Grid needs at least 3 points per axis, got {points}")

        self.phi_a = float(phi_a)
        self.phi_b = float(phi_b)
        self.g = float(g)
        self.N = int(N)
        self.seed = int(seed)
        self.points = int(points)
        self.span = float(span)
        self.noise = noise

    @classmethod
    def from_params(cls, params, noise=None):
        return cls(
            phi_a=float(params.get("phiA", 0.0)),
            phi_b=float(params.get("phiB", 0.0)),
            g=float(params.get("g", 1.0)),
            N=int(params.get("N", 100000)),
            seed=int(params.get("seed", 0)),
            points=int(params.get("points", DEFAULT_POINTS)),
            span=float(params.get("span", DEFAULT_SPAN)),
            noise=noise)

    def with_phases(self, phi_a, phi_b):
        return EprMeasurementConfig(
            phi_a, phi_b, self.g, self.N, self.seed, self.points, self.span, self.noise)

    def __repr__(self):  # pragma: no cover
        return f"<EprMeasurementConfig phi=({self.phi_a:.4g}, {self.phi_b:.4g}) N={self.N} seed={self.seed}>"


class WitnessEstimate(object):
    EXACT = "exact"
    EMPIRICAL = "empirical"

    def __init__(self, mean, delta_f, delta_e, mode, samples_used, converged=True):
        self.mean = float(mean)
        self.delta_f = float(delta_f)
        self.delta_e = None if delta_e is None else float(delta_e)
        self.mode = mode
        self.samples_used = int(samples_used)
        self.converged = converged

    def __repr__(self):  # pragma: no cover
        return f"<WitnessEstimate {self.mode} {self.mean:.6g} ± {self.delta_e}>"

    def to_dict(self):
        return {
            "mean": self.mean,
            "delta_f": self.delta_f,
            "delta_e": self.delta_e,
            "mode": self.mode,
            "samples_used": self.samples_used,
            "converged": self.converged,
        }


class Verdict(object):
    def __init__(self, violation, significance, entangled, side):
        self.violation = float(violation)
        self.significance = significance
        self.entangled = bool(entangled)
        self.side = side

    def __repr__(self):  # pragma: no cover
        return f"<Verdict entangled={self.entangled} violation={self.violation:.4g}>"

    def to_dict(self):
        return {
            "violation": self.violation,
            "significance": self.significance,
            "entangled": self.entangled,
            "side": self.side,
        }


def quadrature_wavefunctions(dim, q):
    """<x|n> for n < dim in the variance-1/4 convention, shape (dim, len(q)).

    Built from the normalised Hermite-function recurrence at √2·x.
    """
    q = np.asarray(q, dtype=float)
    scaled = math.sqrt(2) * q
    out = np.zeros((dim, q.size))
    out[0] = math.pi ** -0.25 * np.exp(-scaled ** 2 / 2)
    if dim > 1:
        out[1] = math.sqrt(2) * scaled * out[0]
    for n in range(1, dim - 1):
        out[n + 1] = math.sqrt(2 / (n + 1)) * scaled * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return 2 ** 0.25 * out


def momentum_wavefunctions(dim, p):
    """<p|n> = (−i)ⁿ <x=p|n>."""
    phases = (-1j) ** np.arange(dim)
    return phases[:, np.newaxis] * quadrature_wavefunctions(dim, p)


def _measured_components(state, cfg):
    """Weighted kets after detection noise, phase shifts and the splitter."""
    if cfg.noise is not None:
        # identical phase-insensitive channels on both modes commute with the
        # phase shifts and the splitter
        state = apply_loss_thermal(state, cfg.noise, ("A", "B"))

    weights, kets = state.components()
    kets = transform_kets(kets, ModeTransform.phase_shift(cfg.phi_a, "A"))
    kets = transform_kets(kets, ModeTransform.phase_shift(cfg.phi_b, "B"))
    kets = transform_kets(kets, ModeTransform.beam_splitter())
    return weights, kets, state.converged


def _local_moments(weights, kets, op, mode):
    """(<O>, <O²>) of a single-mode operator acting on output `mode`."""
    if mode == 1:
        applied = np.einsum("ij,rjb->rib", op, kets)
        squared = np.einsum("ij,rjb->rib", op, applied)
    else:
        applied = np.einsum("ij,raj->rai", op, kets)
        squared = np.einsum("ij,raj->rai", op, applied)
    first = np.einsum("r,rab,rab->", weights, kets.conj(), applied).real
    second = np.einsum("r,rab,rab->", weights, kets.conj(), squared).real
    return first, second


def _axis(weights, kets, op, mode, cfg):
    mean, second = _local_moments(weights, kets, op, mode)
    sigma = math.sqrt(max(second - mean ** 2, 0.0))
    extent = cfg.span * sigma + abs(mean)
    return np.linspace(-extent, extent, cfg.points)


def joint_quadrature_distribution(state, cfg):
    """P(x₁, p₂) on a grid covering `span` standard deviations of each marginal.

    The grid is flagged non-converged when ∫∫P deviates from 1 by more than
    1e−6 or the state itself is truncation-limited.
    """
    weights, kets, state_converged = _measured_components(state, cfg)
    _, dim_1, dim_2 = kets.shape

    a = np.diag(np.sqrt(np.arange(1, dim_1)), k=1)
    x_op = (a + a.T) / 2
    b = np.diag(np.sqrt(np.arange(1, dim_2)), k=1)
    p_op = (b - b.T) / 2j

    x = _axis(weights, kets, x_op, 1, cfg)
    p = _axis(weights, kets, p_op, 2, cfg)
    psi_x = quadrature_wavefunctions(dim_1, x)
    psi_p = momentum_wavefunctions(dim_2, p)

    values = np.zeros((x.size, p.size))
    for weight, ket in zip(weights, kets):
        amplitude = psi_x.T @ ket @ psi_p
        values += weight * np.abs(amplitude) ** 2

    grid = PhaseSpaceGrid(x, p, label="P(x1,p2)")
    total = grid.integrate(values)
    converged = bool(state_converged and abs(total - 1) <= NORMALIZATION_TOLERANCE)
    return grid.with_values(values, converged=converged)


def epr_values(grid):
    """o_EPR = 2x₁² + 2p₂² at every grid node."""
    xx, pp = grid.mesh()
    return 2 * xx ** 2 + 2 * pp ** 2


def expectation_on_grid(grid, f, n_samples=1):
    """<F(Ô)> and Δ_F from a tabulated distribution."""
    evaluated = f.evaluate(epr_values(grid))
    mean = grid.integrate(grid.values * evaluated)
    second = grid.integrate(grid.values * evaluated ** 2)
    delta_f = math.sqrt(max(second - mean ** 2, 0.0))
    return WitnessEstimate(
        mean, delta_f, delta_f / math.sqrt(n_samples), WitnessEstimate.EXACT,
        n_samples, converged=grid.converged)


def exact_expectation(state, f, cfg):
    """<F(Ô)> = ∫∫ P(x₁, p₂) F(2x₁² + 2p₂²); δ_e is predictive for cfg.N runs."""
    grid = joint_quadrature_distribution(state, cfg)
    return expectation_on_grid(grid, f, cfg.N)


def epr_moments(state, m_max, cfg):
    """E_m = <Ô^m> for m = 1..m_max."""
    if m_max < 1:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"m_max must be >= 1, got {m_max}")
    grid = joint_quadrature_distribution(state, cfg)
    o = epr_values(grid)
    return [float(grid.integrate(grid.values * o ** m)) for m in range(1, m_max + 1)]


def _linear_inverse(u, left, right):
    """Invert the CDF of a density ∝ left·(1−s) + right·s on [0, 1]."""
    total = left + right
    root = np.sqrt(np.maximum(left ** 2 + (right - left) * total * u, 0.0))
    denominator = left + root
    safe = np.where(denominator > 0, denominator, 1.0)
    return np.where(denominator > 0, u * total / safe, u)


def _draw(grid, masses, cdf, rng, count):
    values = np.clip(grid.values, 0.0, None)
    cell = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
    cell = np.minimum(cell, masses.size - 1)
    i, j = np.unravel_index(cell, masses.shape)

    p00, p10 = values[i, j], values[i + 1, j]
    p01, p11 = values[i, j + 1], values[i + 1, j + 1]
    s = _linear_inverse(rng.random(count), p00 + p01, p10 + p11)
    t = _linear_inverse(rng.random(count), p00 * (1 - s) + p10 * s, p01 * (1 - s) + p11 * s)

    dx, dp = grid.spacing
    x1 = grid.x[i] + s * dx
    p2 = grid.y[j] + t * dp
    return np.column_stack([x1, p2, 2 * x1 ** 2 + 2 * p2 ** 2])


def sample_grid(grid, n, seed):
    """N draws from a tabulated P(x₁, p₂): inverse CDF over cells, then
    bilinear interpolation inside the chosen cell.

    Samples are produced in shards of SHARD_SIZE; shard k uses the generator
    seeded by (seed, k), so the output depends only on (grid, n, seed).
    """
    if grid.values is None or not np.all(np.isfinite(grid.values)):
        raise EprwitError(
            error_type="NonConverged",
            message="Refusing to sample from an invalid distribution grid")

    values = np.clip(grid.values, 0.0, None)
    masses = (values[:-1, :-1] + values[1:, :-1] + values[:-1, 1:] + values[1:, 1:]).reshape(-1)
    if masses.sum() <= 0:
        raise EprwitError(
            error_type="NonConverged",
            message="Distribution grid carries no probability mass")
    masses = masses.reshape(values.shape[0] - 1, values.shape[1] - 1)
    cdf = np.cumsum(masses.reshape(-1))

    shards = [
        _draw(grid, masses, cdf, shard_rng(seed, k), stop - start)
        for k, (start, stop) in enumerate(chunked(n, SHARD_SIZE))
    ]
    return np.concatenate(shards, axis=0)


def sample_homodyne(state, cfg):
    """cfg.N rows of (x₁, p₂, o_EPR), reproducible for fixed (state, cfg)."""
    grid = joint_quadrature_distribution(state, cfg)
    if not grid.converged:
        raise EprwitError(
            error_type="NonConverged",
            message="Distribution grid is not normalised; raise the cutoff or the grid span")
    return sample_grid(grid, cfg.N, cfg.seed)


def empirical_witness(samples, f):
    """Sample mean of F(o_EPR) with population Δ_F and δ_e = Δ_F/√N.

    Accepts the (N, 3) sample array or a flat array of o_EPR values. δ_e is
    None for a single sample.
    """
    samples = np.asarray(samples, dtype=float)
    o = samples[:, 2] if samples.ndim == 2 else samples
    if o.size == 0:
        raise EprwitError(
            error_type="InvalidData",
            message="No samples to evaluate")

    values = f.evaluate(o)
    delta_f = float(np.std(values))
    delta_e = delta_f / math.sqrt(o.size) if o.size > 1 else None
    return WitnessEstimate(
        float(np.mean(values)), delta_f, delta_e, WitnessEstimate.EMPIRICAL, o.size)


def verdict(estimate, bounds, threshold=SIGNIFICANCE_THRESHOLD):
    """Compare an estimate with [f_min, f_max]; refuses provisional bounds."""
    if not bounds.converged:
        raise EprwitError(
            error_type="ProvisionalBounds",
            message="Separability bounds are provisional; raise n_max or choose a certifiable test function")

    above = estimate.mean - bounds.f_max
    below = bounds.f_min - estimate.mean
    violation = max(above, below)
    side = "upper" if above >= below else "lower"

    if estimate.delta_e:
        significance = violation / estimate.delta_e
    else:
        significance = math.copysign(math.inf, violation) if violation else 0.0

    if estimate.mode == WitnessEstimate.EXACT:
        entangled = violation > EXACT_TOLERANCE
    else:
        entangled = significance > threshold
    return Verdict(violation, significance, entangled, side)


def _rotated_directions(phi_a, phi_b):
    # X′ = cosφ X − sinφ P, P′ = sinφ X + cosφ P on each mode
    u = np.array([math.cos(phi_a), -math.sin(phi_a), -math.cos(phi_b), math.sin(phi_b)])
    v = np.array([math.sin(phi_a), math.cos(phi_a), math.sin(phi_b), math.cos(phi_b)])
    return u, v


def gaussian_wigner_expectation(state, f, phi_a=0.0, phi_b=0.0, points=513, span=DEFAULT_SPAN):
    """<F(û² + v̂²)> from the covariance matrix alone.

    û = X_A′ − X_B′ and v̂ = P_A′ + P_B′ commute, so their joint Wigner marginal
    is their distribution; for Gaussian states it is the bivariate normal fixed
    by the first and second moments. Exact only for Gaussian inputs.
    """
    cov, means = covariance_matrix(state)
    u_dir, v_dir = _rotated_directions(phi_a, phi_b)
    directions = np.stack([u_dir, v_dir])
    sigma = directions @ cov @ directions.T
    centre = directions @ means

    widths = np.sqrt(np.diag(sigma))
    axes = [
        np.linspace(centre[k] - span * widths[k], centre[k] + span * widths[k], points)
        for k in range(2)
    ]
    uu, vv = np.meshgrid(axes[0], axes[1], indexing="ij")
    offset = np.stack([uu - centre[0], vv - centre[1]], axis=-1)
    inverse = np.linalg.inv(sigma)
    exponent = np.einsum("...i,ij,...j->...", offset, inverse, offset)
    density = np.exp(-exponent / 2) / (2 * math.pi * math.sqrt(np.linalg.det(sigma)))

    integrand = density * f.evaluate(uu ** 2 + vv ** 2)
    return float(simpson(simpson(integrand, x=axes[1], axis=1), x=axes[0], axis=0))


def save_samples(samples, path):
    np.savetxt(path, np.asarray(samples), delimiter=",", header=SAMPLE_HEADER, comments="", fmt="%.17g")


def load_samples(path):
    """Read `x1,p2[,o_epr]` rows; o_EPR is recomputed when the column is absent."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise EprwitError(
            error_type="InvalidData",
            message=f"Could not read homodyne samples from {path}",
            source=e)

    if data.shape[0] == 0 or data.shape[1] not in (2, 3):
        raise EprwitError(
            error_type="InvalidData",
            message=f"Expected rows of x1,p2[,o_epr] in {path}, got shape {data.shape}")
    if data.shape[1] == 2:
        o = 2 * data[:, 0] ** 2 + 2 * data[:, 1] ** 2
        data = np.column_stack([data, o])
    return data
