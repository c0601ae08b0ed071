"""Loss with thermal admixture, applied in the Fock basis.

Each selected mode is mixed with a thermal mode of occupation n_th on a beam
splitter of transmissivity η. The channel is built as an amplifier of gain
G = 1 + (1 − η) n_th after a pure loss of transmissivity η/G; both stages
have closed-form Kraus operators that only shift photon number.
"""
import math

import numpy as np
from scipy.special import gammaln, xlogy

from .conventions import MAX_CUTOFF, VACUUM_VARIANCE
from .fock_core import MODES, TwoModeState
from .utils import EprwitError

KRAUS_TOLERANCE = 1e-8
TRACE_DEVIATION = 1e-6
MAX_AMPLIFIER_KRAUS = 4 * MAX_CUTOFF


class NoiseSpec(object):
    CHANNEL = "channel"
    DETECTION = "detection"
    STAGES = (CHANNEL, DETECTION)

    def __init__(self, eta=1.0, nth=0.0, stage=CHANNEL):
        if not 0 < eta <= 1:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Transmissivity must be in (0, 1], got {eta}")
        if nth < 0:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Thermal occupation must be >= 0, got {nth}")
        if stage not in self.STAGES:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Unknown noise stage '{stage}', expected one of {', '.join(self.STAGES)}")
        self.eta = float(eta)
        self.nth = float(nth)
        self.stage = stage

    @classmethod
    def from_params(cls, params):
        return cls(
            eta=float(params.get("eta", 1.0)),
            nth=float(params.get("nth", 0.0)),
            stage=params.get("stage", cls.CHANNEL))

    @property
    def is_identity(self):
        return self.eta == 1

    @property
    def gain(self):
        return 1 + (1 - self.eta) * self.nth

    def __repr__(self):  # pragma: no cover
        return f"<NoiseSpec eta={self.eta} nth={self.nth} {self.stage}>"


def loss_coefficients(transmissivity, dim):
    """c[k, n] so that K_k = Σ_n c[k, n] |n−k><n| for the pure-loss channel."""
    n = np.arange(dim)[np.newaxis, :]
    k = np.arange(dim)[:, np.newaxis]
    valid = n >= k
    nk = np.where(valid, n - k, 0)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(nk + 1)
    log_c = 0.5 * (log_binom + xlogy(nk, transmissivity) + xlogy(k, 1 - transmissivity))
    return np.where(valid, np.exp(log_c), 0.0)


def amplifier_coefficients(gain, dim, kraus):
    """b[k, n] so that B_k = Σ_n b[k, n] |n+k><n| for the phase-insensitive amplifier."""
    n = np.arange(dim)[np.newaxis, :]
    k = np.arange(kraus)[:, np.newaxis]
    log_binom = gammaln(n + k + 1) - gammaln(k + 1) - gammaln(n + 1)
    log_b = 0.5 * (log_binom - (n + 1) * math.log(gain) + xlogy(k, 1 - 1 / gain))
    return np.exp(log_b)


def _amplifier_kraus_count(gain, populations):
    """Smallest number of amplifier Kraus operators whose dropped weight,
    averaged over the input photon distribution, is below KRAUS_TOLERANCE."""
    dim = len(populations)
    kept = np.zeros(dim)
    for count in range(1, MAX_AMPLIFIER_KRAUS + 1):
        kept += amplifier_coefficients(gain, dim, count)[-1] ** 2
        missing = float(np.sum(populations * (1 - kept)))
        if missing < KRAUS_TOLERANCE:
            return count, missing
    return MAX_AMPLIFIER_KRAUS, missing


def _lower(tensor, coefficients):
    """Σ_k K_k T K_k† on the first mode of T[n, b, m, d], K_k lowering by k."""
    dim = tensor.shape[0]
    out = np.zeros_like(tensor)
    for k in range(dim):
        c = coefficients[k, k:]
        weight = np.multiply.outer(c, c)[:, np.newaxis, :, np.newaxis]
        out[:dim - k, :, :dim - k, :] += tensor[k:, :, k:, :] * weight
    return out


def _raise(tensor, coefficients):
    """Σ_k B_k T B_k† on the first mode of T, B_k raising by k.

    The caller pads T so that nothing is pushed past the top level.
    """
    dim = tensor.shape[0]
    out = np.zeros_like(tensor)
    for k in range(coefficients.shape[0]):
        c = coefficients[k, :dim - k]
        weight = np.multiply.outer(c, c)[:, np.newaxis, :, np.newaxis]
        out[k:, :, k:, :] += tensor[:dim - k, :, :dim - k, :] * weight
    return out


def _on_mode(tensor, mode, action):
    if mode == "A":
        return action(tensor)
    swapped = tensor.transpose(1, 0, 3, 2)
    return action(swapped).transpose(1, 0, 3, 2)


def apply_loss_thermal(state, spec, modes=MODES):
    """Thermal attenuator with transmissivity η and occupation n_th on each of `modes`.

    η = 1 returns the input unchanged. When the amplifier stage would need more
    Kraus operators than allowed, the result carries converged=False and a
    suggested cutoff.
    """
    for mode in modes:
        if mode not in MODES:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Unknown mode '{mode}', expected A and/or B")
    if spec.is_identity or not modes:
        return state

    gain = spec.gain
    transmissivity = spec.eta / gain
    state = state.trimmed(tolerance=1e-14)
    tensor = np.array(state.tensor)
    dims = {"A": state.dim_a, "B": state.dim_b}
    suggested = None

    for mode in modes:
        dim = dims[mode]
        loss = loss_coefficients(transmissivity, dim)
        tensor = _on_mode(tensor, mode, lambda t: _lower(t, loss))
        if gain == 1:
            continue

        if mode == "A":
            populations = np.einsum("abab->a", tensor).real
        else:
            populations = np.einsum("abab->b", tensor).real
        kraus, missing = _amplifier_kraus_count(gain, populations)
        if missing > TRACE_DEVIATION:
            suggested = dim + 2 * kraus

        width = dim + kraus
        pad = [(0, 0)] * 4
        axes = (0, 2) if mode == "A" else (1, 3)
        for axis in axes:
            pad[axis] = (0, kraus)
        tensor = np.pad(tensor, pad)
        amplifier = amplifier_coefficients(gain, width, kraus)
        tensor = _on_mode(tensor, mode, lambda t: _raise(t, amplifier))
        dims[mode] = width

    dim_a, dim_b = dims["A"], dims["B"]
    matrix = tensor.reshape(dim_a * dim_b, dim_a * dim_b)
    out = TwoModeState(dim_a, dim_b, matrix=(matrix + matrix.conj().T) / 2).trimmed()
    if suggested is not None:
        out.converged = False
        out.suggested_cutoff = min(suggested, 2 * MAX_AMPLIFIER_KRAUS)
    return out


def decoherence_trajectory(state, nth, times, modes=MODES):
    """States after loss η = e^{−t} with thermal occupation `nth`, one per t."""
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise EprwitError(
            error_type="InvalidParameter",
            message="Decoherence times log(1/η) must be >= 0")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise EprwitError(
            error_type="InvalidParameter",
            message="Decoherence times must be strictly increasing")

    return [apply_loss_thermal(state, NoiseSpec(math.exp(-t), nth), modes) for t in times]


def gaussian_channel_covariance(cov, eta, nth, modes=MODES):
    """σ → ησ + (1 − η)(2n_th + 1)/4 · I on the 2x2 blocks of `modes`."""
    cov = np.array(cov, dtype=float)
    added = (1 - eta) * (2 * nth + 1) * VACUUM_VARIANCE
    for mode in modes:
        block = slice(0, 2) if mode == "A" else slice(2, 4)
        cov[:, block] *= math.sqrt(eta)
        cov[block, :] *= math.sqrt(eta)
        cov[block, block] += added * np.eye(2)
    return cov


def gaussian_channel_means(means, eta, modes=MODES):
    means = np.array(means, dtype=float)
    for mode in modes:
        block = slice(0, 2) if mode == "A" else slice(2, 4)
        means[block] *= math.sqrt(eta)
    return means
