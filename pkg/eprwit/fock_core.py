import math
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, eval_laguerre, gammaln

from .conventions import (
    CONVENTION_TAG, HERMITIAN_TOLERANCE, MAX_CUTOFF, MIN_CUTOFF,
    PSD_TOLERANCE, TAIL_TOLERANCE, TRACE_TOLERANCE,
    quadrature_p, quadrature_x)
from .utils import EprwitError, chunked

MODES = ("A", "B")


class TwoModeState(object):
    """Density operator on a truncated two-mode Fock basis |n_A>⊗|n_B>.

    The matrix is stored row-major with index n_A * dim_b + n_B. Pure states
    keep their ket and only materialise the matrix when it is asked for, which
    keeps large-cutoff pure states (e.g. strongly squeezed TMSS) cheap.
    """

    def __init__(self, dim_a, dim_b, matrix=None, ket=None):
        if matrix is None and ket is None:
            raise ValueError("TwoModeState needs a matrix or a ket")

        self.dim_a = int(dim_a)
        self.dim_b = int(dim_b)
        self._ket = None
        self._matrix = None

        if ket is not None:
            ket = np.array(ket, dtype=complex).reshape(self.dim_a, self.dim_b)
            ket.setflags(write=False)
            self._ket = ket
        if matrix is not None:
            matrix = np.array(matrix, dtype=complex)
            matrix.setflags(write=False)
            self._matrix = matrix

        self.tail = max(self.tail_population("A"), self.tail_population("B"))
        self.converged = self.tail <= TAIL_TOLERANCE
        # set by channels whose Kraus truncation ran out of room
        self.suggested_cutoff = None

    @classmethod
    def from_ket(cls, ket, normalize=False):
        ket = np.array(ket, dtype=complex)
        if ket.ndim != 2:
            raise ValueError("ket must be a (dim_a, dim_b) amplitude array")

        norm = np.sum(np.abs(ket) ** 2)
        if normalize:
            if norm <= 0:
                raise EprwitError(
                    error_type="InvalidParameter",
                    message="Cannot normalize a zero vector")
            ket = ket / np.sqrt(norm)
        elif abs(norm - 1) > TRACE_TOLERANCE:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"State vector has norm² {norm:.12g}; squared amplitudes must sum to 1")

        return cls(ket.shape[0], ket.shape[1], ket=ket)

    @classmethod
    def from_matrix(cls, matrix, dim_a, dim_b, normalize=False, check=True):
        size = dim_a * dim_b
        matrix = np.array(matrix, dtype=complex).reshape(size, size)

        deviation = np.max(np.abs(matrix - matrix.conj().T)) if size else 0.0
        if deviation > 1e3 * HERMITIAN_TOLERANCE:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Density matrix is not Hermitian (max deviation {deviation:.3g})")
        matrix = (matrix + matrix.conj().T) / 2

        trace = np.trace(matrix).real
        if normalize:
            if trace <= 0:
                raise EprwitError(
                    error_type="InvalidParameter",
                    message="Cannot normalize a density matrix with non-positive trace")
            matrix = matrix / trace
        elif abs(trace - 1) > TRACE_TOLERANCE:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Density matrix has trace {trace:.12g}, expected 1")

        if check:
            smallest = np.linalg.eigvalsh(matrix)[0]
            if smallest < -PSD_TOLERANCE:
                raise EprwitError(
                    error_type="InvalidParameter",
                    message=f"Density matrix is not positive semidefinite (eigenvalue {smallest:.3g})")

        return cls(dim_a, dim_b, matrix=matrix)

    def __repr__(self):  # pragma: no cover
        kind = "pure" if self.is_pure else "mixed"
        return f"<TwoModeState {self.dim_a}x{self.dim_b} {kind} tail={self.tail:.2g}>"

    @property
    def is_pure(self):
        return self._ket is not None

    @property
    def ket(self):
        return self._ket

    @property
    def matrix(self):
        if self._matrix is None:
            flat = self._ket.reshape(-1)
            matrix = np.outer(flat, flat.conj())
            matrix.setflags(write=False)
            self._matrix = matrix
        return self._matrix

    @property
    def tensor(self):
        """Matrix viewed as rho[n_A, n_B, m_A, m_B]."""
        return self.matrix.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)

    def populations(self):
        """Joint photon-number distribution P(n_A, n_B)."""
        if self.is_pure:
            return np.abs(self._ket) ** 2
        return np.einsum("abab->ab", self.tensor).real

    def tail_population(self, mode):
        pops = self.populations()
        if mode == "A":
            return float(np.sum(pops[-1, :]))
        return float(np.sum(pops[:, -1]))

    def trace(self):
        return float(np.sum(self.populations()))

    def purity(self):
        if self.is_pure:
            return self.trace() ** 2
        return float(np.real(np.sum(self.matrix * self.matrix.T)))

    def mean_photons(self):
        pops = self.populations()
        return (float(np.sum(pops.sum(axis=1) * np.arange(self.dim_a))),
                float(np.sum(pops.sum(axis=0) * np.arange(self.dim_b))))

    def reduced(self, mode):
        if self.is_pure:
            psi = self._ket
            if mode == "A":
                return psi @ psi.conj().T
            return psi.T @ psi.conj()
        if mode == "A":
            return np.einsum("ajbj->ab", self.tensor)
        return np.einsum("jajb->ab", self.tensor)

    def expect_local(self, op_a, op_b):
        """<op_a ⊗ op_b> without building the Kronecker product."""
        if self.is_pure:
            psi = self._ket
            return complex(np.sum(psi.conj() * (op_a @ psi @ op_b.T)))
        return complex(np.einsum("klij,ik,jl->", self.tensor, op_a, op_b))

    def components(self, threshold=1e-13):
        """Decompose into weighted pure states.

        Returns (weights, kets) with kets shaped (r, dim_a, dim_b). Eigenvalues
        below `threshold` times the largest are dropped.
        """
        if self.is_pure:
            return np.ones(1), self._ket[np.newaxis, :, :]

        values, vectors = np.linalg.eigh(self.matrix)
        keep = values > threshold * max(values[-1], 0.0)
        weights = values[keep]
        kets = vectors[:, keep].T.reshape(-1, self.dim_a, self.dim_b)
        return weights, kets

    def padded(self, dim_a, dim_b):
        if dim_a < self.dim_a or dim_b < self.dim_b:
            raise ValueError("padded() can only enlarge the cutoff")
        if self.is_pure:
            ket = np.zeros((dim_a, dim_b), dtype=complex)
            ket[:self.dim_a, :self.dim_b] = self._ket
            return TwoModeState(dim_a, dim_b, ket=ket)
        tensor = np.zeros((dim_a, dim_b, dim_a, dim_b), dtype=complex)
        tensor[:self.dim_a, :self.dim_b, :self.dim_a, :self.dim_b] = self.tensor
        return TwoModeState(dim_a, dim_b, matrix=tensor.reshape(dim_a * dim_b, -1))

    def trimmed(self, tolerance=1e-12, minimum=1):
        """Drop top Fock levels whose summed population is below `tolerance`."""
        pops = self.populations()
        dim_a = _trim_dimension(pops.sum(axis=1), tolerance, minimum)
        dim_b = _trim_dimension(pops.sum(axis=0), tolerance, minimum)
        if (dim_a, dim_b) == (self.dim_a, self.dim_b):
            return self

        if self.is_pure:
            ket = self._ket[:dim_a, :dim_b]
            return TwoModeState.from_ket(ket, normalize=True)
        tensor = self.tensor[:dim_a, :dim_b, :dim_a, :dim_b]
        return TwoModeState.from_matrix(
            tensor.reshape(dim_a * dim_b, -1), dim_a, dim_b, normalize=True, check=False)


def _trim_dimension(marginal, tolerance, minimum):
    # populations summed from the top level downwards
    tail = np.cumsum(marginal[::-1])[::-1]
    keep = len(marginal)
    while keep > minimum and tail[keep - 1] <= tolerance:
        keep -= 1
    return max(keep, minimum)


class ModeTransform(object):
    PHASE_SHIFT = "phase_shift"
    BEAM_SPLITTER = "beam_splitter_50_50"
    DISPLACEMENT = "displacement"

    def __init__(self, kind, target="A", parameter=0.0):
        if kind not in (self.PHASE_SHIFT, self.BEAM_SPLITTER, self.DISPLACEMENT):
            raise ValueError(f"Unknown transform kind {kind}")
        if target not in MODES:
            raise ValueError(f"Unknown mode {target}")
        self.kind = kind
        self.target = target
        self.parameter = parameter

    @classmethod
    def phase_shift(cls, phi, target="A"):
        return cls(cls.PHASE_SHIFT, target, float(phi))

    @classmethod
    def beam_splitter(cls):
        return cls(cls.BEAM_SPLITTER)

    @classmethod
    def displacement(cls, lam, target="A"):
        return cls(cls.DISPLACEMENT, target, complex(lam))

    def __repr__(self):  # pragma: no cover
        return f"<ModeTransform {self.kind} on {self.target} ({self.parameter})>"


class PhaseSpaceGrid(object):
    """Values sampled on a rectangular grid of two real axes.

    Used both for quadrature distributions P(x₁, p₂) and for characteristic
    functions C(λ) with x = Re λ, y = Im λ. values[i, j] sits at (x[i], y[j]).
    """

    def __init__(self, x, y, values=None, converged=True, label=""):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.values = values
        self.converged = converged
        self.label = label

    @classmethod
    def square(cls, extent, points, label=""):
        axis = np.linspace(-extent, extent, int(points))
        return cls(axis, axis.copy(), label=label)

    def __repr__(self):  # pragma: no cover
        return f"<PhaseSpaceGrid {self.label} {len(self.x)}x{len(self.y)}>"

    @property
    def shape(self):
        return (len(self.x), len(self.y))

    @property
    def spacing(self):
        return (self.x[1] - self.x[0], self.y[1] - self.y[0])

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def lambdas(self):
        xx, yy = self.mesh()
        return xx + 1j * yy

    def with_values(self, values, converged=True, label=None):
        return PhaseSpaceGrid(
            self.x, self.y, values, converged=converged,
            label=self.label if label is None else label)

    def aligned_with(self, other):
        return self.shape == other.shape and \
            np.allclose(self.x, other.x) and np.allclose(self.y, other.y)

    def integrate(self, values=None):
        values = self.values if values is None else values
        return simpson(simpson(values, x=self.y, axis=1), x=self.x, axis=0)


def _log_factorial(n):
    return gammaln(np.asarray(n, dtype=float) + 1)


def displacement_element(m, n, lam):
    """<m|D(λ)|n> with D(λ) = exp(λa† − λ*a), Cahill–Glauber form."""
    lam = np.asarray(lam, dtype=complex)
    r2 = np.abs(lam) ** 2
    if m >= n:
        prefactor = np.exp(0.5 * (_log_factorial(n) - _log_factorial(m)) - r2 / 2)
        return prefactor * lam ** (m - n) * eval_genlaguerre(n, m - n, r2)
    prefactor = np.exp(0.5 * (_log_factorial(m) - _log_factorial(n)) - r2 / 2)
    return prefactor * (-lam.conj()) ** (n - m) * eval_genlaguerre(m, n - m, r2)


def displacement_matrix(lam, dim):
    matrix = np.zeros((dim, dim), dtype=complex)
    for m in range(dim):
        for n in range(dim):
            matrix[m, n] = displacement_element(m, n, lam)
    return matrix


def displacement_elements(lams, dim):
    """Stack of <m|D(λ)|n> for a flat array of λ, shaped (dim, dim, len(λ))."""
    lams = np.asarray(lams, dtype=complex).reshape(-1)
    out = np.empty((dim, dim, lams.size), dtype=complex)
    for m in range(dim):
        for n in range(dim):
            out[m, n] = displacement_element(m, n, lams)
    return out


def displacement_diagonal(n, lam):
    """<n|D(λ)|n> = exp(−|λ|²/2) L_n(|λ|²)."""
    if n < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"Fock index must be non-negative, got {n}")
    r2 = np.abs(np.asarray(lam, dtype=complex)) ** 2
    return np.exp(-r2 / 2) * eval_laguerre(n, r2)


def coherent_ket(alpha, dim):
    """Column D(α)|0> of the exact displacement matrix."""
    n = np.arange(dim)
    log_amp = -abs(alpha) ** 2 / 2 - 0.5 * _log_factorial(n)
    with np.errstate(divide="ignore"):
        powers = np.power(complex(alpha), n) if alpha != 0 else (n == 0).astype(complex)
    return np.exp(log_amp) * powers


def thermal_populations(nth, dim):
    n = np.arange(dim)
    if nth == 0:
        return (n == 0).astype(float)
    return nth ** n / (1 + nth) ** (n + 1)


@lru_cache(maxsize=16)
def _beam_splitter_blocks(dim):
    """Per-total-photon-number blocks of the 50:50 splitter on dim x dim modes.

    The splitter maps a_A -> (a_A − a_B)/√2 and a_B -> (a_A + a_B)/√2 in the
    Heisenberg picture. Photon number is conserved, so the unitary is block
    diagonal in N = n_A + n_B; blocks with N <= dim − 1 are exact.
    """
    theta = -np.pi / 4
    blocks = []
    for total in range(2 * dim - 1):
        ks = np.arange(max(0, total - dim + 1), min(total, dim - 1) + 1)
        size = len(ks)
        generator = np.zeros((size, size))
        for j, k in enumerate(ks):
            # a_A† a_B |k, N−k>
            if j + 1 < size:
                generator[j + 1, j] += math.sqrt((k + 1) * (total - k))
            # − a_A a_B† |k, N−k>
            if j - 1 >= 0:
                generator[j - 1, j] -= math.sqrt(k * (total - k + 1))
        unitary = expm(theta * generator)
        blocks.append((ks, total - ks, unitary))
    return tuple(blocks)


def transform_kets(kets, transform):
    """Apply a mode transform to a stack of kets shaped (r, dim_a, dim_b)."""
    kets = np.asarray(kets, dtype=complex)
    _, dim_a, dim_b = kets.shape

    if transform.kind == ModeTransform.PHASE_SHIFT:
        # U = exp(iφ n) so that U†aU = e^{iφ}a, i.e. X' = cosφ X − sinφ P
        if transform.target == "A":
            phases = np.exp(1j * transform.parameter * np.arange(dim_a))
            return kets * phases[np.newaxis, :, np.newaxis]
        phases = np.exp(1j * transform.parameter * np.arange(dim_b))
        return kets * phases[np.newaxis, np.newaxis, :]

    if transform.kind == ModeTransform.DISPLACEMENT:
        if transform.target == "A":
            disp = displacement_matrix(transform.parameter, dim_a)
            return np.einsum("ij,rjb->rib", disp, kets)
        disp = displacement_matrix(transform.parameter, dim_b)
        return np.einsum("ij,raj->rai", disp, kets)

    # the splitter needs room for every total photon number present
    dim = dim_a + dim_b - 1
    padded = np.zeros((kets.shape[0], dim, dim), dtype=complex)
    padded[:, :dim_a, :dim_b] = kets
    out = np.zeros_like(padded)
    for ka, kb, unitary in _beam_splitter_blocks(dim):
        out[:, ka, kb] = padded[:, ka, kb] @ unitary.T
    return out


def apply_transform(state, transform):
    """ρ' = UρU† for a phase shift, the 50:50 splitter or a displacement.

    The splitter enlarges both cutoffs to dim_a + dim_b − 1 so that no photon
    number sector is cut.
    """
    if state.is_pure:
        ket = transform_kets(state.ket[np.newaxis], transform)[0]
        return TwoModeState(ket.shape[0], ket.shape[1], ket=ket)

    size = state.dim_a * state.dim_b
    # columns of ρ as kets: U ρ, then (U (Uρ)†)† = U ρ U†
    columns = state.matrix.T.reshape(size, state.dim_a, state.dim_b)
    left = transform_kets(columns, transform)
    dim_a, dim_b = left.shape[1:]
    out_size = dim_a * dim_b
    # row r of conj(Uρ) is column r of (Uρ)†
    rows = left.reshape(size, out_size).T.conj().reshape(out_size, state.dim_a, state.dim_b)
    both = transform_kets(rows, transform).reshape(out_size, out_size).T
    matrix = both.conj().T
    matrix = (matrix + matrix.conj().T) / 2
    return TwoModeState(dim_a, dim_b, matrix=matrix)


def make_fock_superposition(coeffs, dims=(MIN_CUTOFF, MIN_CUTOFF)):
    """Pure state Σ c |n_A, n_B> from (n_A, n_B, c) triples."""
    dim_a, dim_b = dims
    ket = np.zeros((dim_a, dim_b), dtype=complex)
    for n_a, n_b, amplitude in coeffs:
        if not (0 <= n_a < dim_a and 0 <= n_b < dim_b):
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Fock index ({n_a}, {n_b}) outside cutoff {dims}")
        ket[n_a, n_b] += amplitude

    norm = np.sum(np.abs(ket) ** 2)
    if abs(norm - 1) > TRACE_TOLERANCE:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"Squared amplitudes sum to {norm:.12g}; divide the coefficients by {math.sqrt(norm):.12g} to normalize")
    return TwoModeState.from_ket(ket)


def make_product_state(rho_a, rho_b):
    """ρ_A ⊗ ρ_B from two single-mode density matrices or kets."""
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_a.ndim == 1 and rho_b.ndim == 1:
        return TwoModeState.from_ket(np.outer(rho_a, rho_b), normalize=True)
    if rho_a.ndim == 1:
        rho_a = np.outer(rho_a, rho_a.conj())
    if rho_b.ndim == 1:
        rho_b = np.outer(rho_b, rho_b.conj())
    return TwoModeState.from_matrix(
        np.kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0], normalize=True)


def adaptive_cutoff(build, mean_photons=0.0):
    """Build a state at growing cutoffs until the tail invariant holds.

    Starts at max(16, ceil(8 n̄)) and doubles up to the maximum cutoff; the
    last state is returned either way, carrying its converged flag.
    """
    dim = max(MIN_CUTOFF, int(math.ceil(8 * mean_photons)))
    dim = min(dim, MAX_CUTOFF)
    while True:
        state = build(dim)
        if state.converged or dim >= MAX_CUTOFF:
            return state
        dim = min(2 * dim, MAX_CUTOFF)


def reduced_characteristic(rho, lams, chunk=4096):
    """C(λ) = Tr[ρ D(λ)] of a single-mode density matrix at each λ."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    lams = np.asarray(lams, dtype=complex)
    flat = lams.reshape(-1)
    out = np.empty(flat.size, dtype=complex)
    for start, stop in chunked(flat.size, chunk):
        disp = displacement_elements(flat[start:stop], dim)
        # Tr[ρD] = Σ_{mn} ρ[n, m] D[m, n]
        out[start:stop] = np.einsum("nm,mnp->p", rho, disp)
    return out.reshape(lams.shape)


def characteristic_function(state, grid, mode="A"):
    """Characteristic function of one mode's reduced state on `grid`.

    The grid is flagged non-converged when |C| has not decayed below 1e−6 on
    its boundary.
    """
    values = reduced_characteristic(state.reduced(mode), grid.lambdas())
    edge = max(np.max(np.abs(values[[0, -1], :])), np.max(np.abs(values[:, [0, -1]])))
    return grid.with_values(values, converged=bool(edge <= 1e-6), label=f"C_{mode}")


def joint_characteristic(state, lam_a, lam_b, chunk=2048):
    """C_AB(λ_A, λ_B) = Tr[ρ D(λ_A) ⊗ D(λ_B)] for paired arrays of λ."""
    lam_a = np.asarray(lam_a, dtype=complex)
    lam_b = np.asarray(lam_b, dtype=complex)
    flat_a = lam_a.reshape(-1)
    flat_b = lam_b.reshape(-1)
    dim_a, dim_b = state.dim_a, state.dim_b

    # ρ[(ia, ja), (ib, jb)] so that mode A contracts by one matrix product
    if state.is_pure:
        psi = state.ket
        pairs = np.einsum("ab,cd->acbd", psi, psi.conj()).reshape(dim_a * dim_a, dim_b * dim_b)
    else:
        pairs = state.tensor.transpose(0, 2, 1, 3).reshape(dim_a * dim_a, dim_b * dim_b)

    out = np.empty(flat_a.size, dtype=complex)
    for start, stop in chunked(flat_a.size, chunk):
        disp_a = displacement_elements(flat_a[start:stop], dim_a)
        disp_b = displacement_elements(flat_b[start:stop], dim_b)
        # D[ja, ia] pairs with ρ[ia, ·, ja, ·]
        weights_a = disp_a.transpose(1, 0, 2).reshape(dim_a * dim_a, -1)
        weights_b = disp_b.transpose(1, 0, 2).reshape(dim_b * dim_b, -1)
        partial = pairs.T @ weights_a
        out[start:stop] = np.sum(partial * weights_b, axis=0)
    return out.reshape(lam_a.shape)


def first_moments(state):
    eye_a = np.eye(state.dim_a)
    eye_b = np.eye(state.dim_b)
    xa, pa = quadrature_x(state.dim_a), quadrature_p(state.dim_a)
    xb, pb = quadrature_x(state.dim_b), quadrature_p(state.dim_b)
    return np.array([
        state.expect_local(xa, eye_b).real,
        state.expect_local(pa, eye_b).real,
        state.expect_local(eye_a, xb).real,
        state.expect_local(eye_a, pb).real,
    ])


def covariance_matrix(state):
    """Covariance of (X_A, P_A, X_B, P_B) and the mean vector.

    Entries are symmetrised second central moments; the vacuum gives I/4.
    """
    eye_a = np.eye(state.dim_a)
    eye_b = np.eye(state.dim_b)
    ops = [
        (quadrature_x(state.dim_a), eye_b),
        (quadrature_p(state.dim_a), eye_b),
        (eye_a, quadrature_x(state.dim_b)),
        (eye_a, quadrature_p(state.dim_b)),
    ]
    means = first_moments(state)

    cov = np.zeros((4, 4))
    for i, (ia, ib) in enumerate(ops):
        for j, (ja, jb) in enumerate(ops):
            if j < i:
                continue
            forward = state.expect_local(ia @ ja, ib @ jb)
            backward = state.expect_local(ja @ ia, jb @ ib)
            value = 0.5 * (forward + backward).real - means[i] * means[j]
            cov[i, j] = cov[j, i] = value
    return cov, means


STATE_HEADER = "# eprwit two-mode state"
FILE_TRACE_TOLERANCE = 1e-6


def save_state(state, path):
    """Write a state as text: header, dims, convention tag, then one
    `re im` line per matrix entry in row-major order (17 significant digits).
    """
    lines = [
        STATE_HEADER,
        f"dims {state.dim_a} {state.dim_b}",
        f"convention {CONVENTION_TAG}",
    ]
    for value in state.matrix.reshape(-1):
        lines.append(f"{value.real:.17g} {value.imag:.17g}")

    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_state(path):
    with open(path) as f:
        lines = [line.strip() for line in f if line.strip()]

    if not lines or lines[0] != STATE_HEADER:
        raise EprwitError(
            error_type="InvalidData",
            message=f"{path} is not an eprwit state file")

    try:
        _, dim_a, dim_b = lines[1].split()
        dim_a, dim_b = int(dim_a), int(dim_b)
        convention = lines[2].split(maxsplit=1)[1]
        entries = [complex(float(re), float(im)) for re, im in (line.split() for line in lines[3:])]
    except (IndexError, ValueError) as e:
        raise EprwitError(
            error_type="InvalidData",
            message=f"Could not parse state file {path}",
            source=e)

    if convention != CONVENTION_TAG:
        raise EprwitError(
            error_type="InvalidData",
            message=f"State file uses convention '{convention}', expected '{CONVENTION_TAG}'")
    if len(entries) != (dim_a * dim_b) ** 2:
        raise EprwitError(
            error_type="InvalidData",
            message=f"Expected {(dim_a * dim_b) ** 2} entries, found {len(entries)}")

    matrix = np.array(entries, dtype=complex).reshape(dim_a * dim_b, -1)
    # channel outputs are trimmed, so their trace may sit a tail's worth below 1
    trace = np.trace(matrix).real
    if abs(trace - 1) > FILE_TRACE_TOLERANCE:
        raise EprwitError(
            error_type="InvalidData",
            message=f"State file {path} has trace {trace:.12g}, expected 1")
    try:
        return TwoModeState.from_matrix(matrix, dim_a, dim_b, normalize=True)
    except EprwitError as e:
        raise EprwitError(
            error_type="InvalidData",
            message=f"State file {path} does not hold a density matrix: {e.message}",
            source=e)
