"""Separability bounds for functional EPR witnesses.

For a test function F of the EPR operator Ô = (X_A − X_B)² + (P_A + P_B)²,
every separable state satisfies min_n O_n ≤ <F(Ô)> ≤ max_n O_n with

    O_n = (−1)ⁿ ∫₀^∞ F(z) e^{−z} L_n(2z) dz.

For F(z) = e^{−Cz} Σ_m d_m z^m the integral has a finite closed form that
follows from the Laguerre generating function; with a = 1 + C and
b = (1 − C)/(1 + C),

    O_n = Σ_m d_m m!/a^{m+1} Σ_{j ≤ min(m, n)} C(m, j) C(n − j + m, m) b^{n−j}.
"""
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import comb, eval_laguerre, j0, roots_laguerre

from .utils import EprwitError

DEFAULT_NMAX = 64
MAX_NMAX = 1024
CERTIFY_MARGIN = 1e-10
# tail below this is treated as zero when a side can only be reached as a limit
TAIL_ZERO = 1e-8
QUAD_TOLERANCE = 1e-8


class TestFunction(object):
    """F(z) = e^{−Cz} (1 + Σ_{m ≥ 1} D_m z^m), or a pure power z^m."""

    # keep nose from collecting this as a test class
    __test__ = False

    def __init__(self, C=1.0, poly=(), power=None):
        C = float(C)
        if not math.isfinite(C) or C < 0:
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Decay rate C must be a finite number >= 0, got {C}")

        if power is not None:
            power = int(power)
            if power < 0:
                raise EprwitError(
                    error_type="InvalidParameter",
                    message=f"Power must be >= 0, got {power}")
            coefficients = np.zeros(power + 1)
            coefficients[power] = 1.0
        else:
            coefficients = np.concatenate([[1.0], np.atleast_1d(np.asarray(poly, dtype=float))])

        if not np.all(np.isfinite(coefficients)):
            raise EprwitError(
                error_type="InvalidParameter",
                message=f"Polynomial coefficients must be finite, got {list(poly)}")

        self.C = C
        self.power = power
        self.coefficients = coefficients

    @classmethod
    def exponential(cls, C, D=0.0):
        """The M = 1 family e^{−Cz}(1 + Dz)."""
        return cls(C, poly=(D,))

    @classmethod
    def power_law(cls, m):
        return cls(0.0, power=m)

    @classmethod
    def from_coefficients(cls, C, coefficients):
        f = cls(C)
        f.coefficients = np.asarray(coefficients, dtype=float)
        return f

    def __repr__(self):  # pragma: no cover
        if self.power is not None and self.C == 0:
            return f"<TestFunction z^{self.power}>"
        return f"<TestFunction C={self.C} d={list(self.coefficients)}>"

    @property
    def order(self):
        return len(self.coefficients) - 1

    @property
    def poly(self):
        return tuple(self.coefficients[1:])

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        # np.polyval wants the highest power first
        return np.exp(-self.C * z) * np.polyval(self.coefficients[::-1], z)

    def monomials(self, z):
        """e^{−Cz} z^m for m = 0..M, stacked on the first axis."""
        z = np.asarray(z, dtype=float)
        decay = np.exp(-self.C * z)
        return np.stack([decay * z ** m for m in range(self.order + 1)])

    def rescaled(self, factor):
        """The function z ↦ F(factor · z)."""
        powers = factor ** np.arange(self.order + 1)
        f = TestFunction.from_coefficients(self.C * factor, self.coefficients * powers)
        f.power = self.power
        return f


class SeparabilityBounds(object):
    def __init__(self, values, f_min, f_max, n_at_min, n_at_max, converged, tail_bound, gain=1.0):
        self.values = np.asarray(values, dtype=float)
        self.f_min = float(f_min)
        self.f_max = float(f_max)
        self.n_at_min = int(n_at_min)
        self.n_at_max = int(n_at_max)
        self.converged = bool(converged)
        self.tail_bound = float(tail_bound)
        self.gain = float(gain)

    def __repr__(self):  # pragma: no cover
        flag = "" if self.converged else " provisional"
        return f"<SeparabilityBounds [{self.f_min:.6g}, {self.f_max:.6g}] n_max={self.n_max}{flag}>"

    @property
    def n_max(self):
        return len(self.values) - 1

    @property
    def provisional(self):
        return not self.converged

    def rows(self):
        return [(n, float(value)) for n, value in enumerate(self.values)]


def _monomial_bounds(C, m, ns):
    """O_n for e^{−Cz} z^m at every n in `ns`."""
    ns = np.asarray(ns, dtype=int)
    a = 1 + C
    b = (1 - C) / (1 + C)
    total = np.zeros(ns.shape)
    for j in range(m + 1):
        active = ns >= j
        exponent = np.where(active, ns - j, 0)
        term = comb(m, j) * comb(exponent + m, m) * np.power(b, exponent)
        total += np.where(active, term, 0.0)
    return math.factorial(m) / a ** (m + 1) * total


def _series_bounds(f, ns):
    ns = np.atleast_1d(ns)
    values = np.zeros(ns.shape)
    for m, d in enumerate(f.coefficients):
        if d != 0:
            values += d * _monomial_bounds(f.C, m, ns)
    return values


def _gauss_laguerre_bound(f, n):
    """Gauss–Laguerre rule on t = (1 + C) z, where the integrand becomes
    e^{−t} times a polynomial of degree M + n and the rule is exact.

    Loses accuracy past n ≈ 40 from cancellation in L_n.
    """
    a = 1 + f.C
    nodes, weights = roots_laguerre((f.order + n) // 2 + 1)
    z = nodes / a
    polynomial = np.polyval(f.coefficients[::-1], z)
    return (-1) ** n * float(np.sum(weights * polynomial * eval_laguerre(n, 2 * z))) / a


def _quad_bound(f, n):
    value, error = quad(
        lambda z: f.evaluate(z) * math.exp(-z) * eval_laguerre(n, 2 * z),
        0, np.inf, limit=400, epsabs=QUAD_TOLERANCE / 10, epsrel=1e-10)
    if error > QUAD_TOLERANCE * max(1.0, abs(value)):
        raise EprwitError(
            error_type="NonConverged",
            message=f"1D quadrature for O_{n} reports error {error:.3g} (C={f.C}, d={list(f.coefficients)})")
    return (-1) ** n * value


def bound_via_1d_reduction(f, n, method="series"):
    """O_n = (−1)ⁿ ∫₀^∞ F(z) e^{−z} L_n(2z) dz.

    `series` evaluates the integral in closed form and is used everywhere in
    production. `gauss_laguerre` and `quad` are numerical cross-checks.
    """
    if n < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"n must be >= 0, got {n}")
    if method == "series":
        return float(_series_bounds(f, [n])[0])
    if method == "gauss_laguerre":
        return _gauss_laguerre_bound(f, n)
    if method == "quad":
        return _quad_bound(f, n)
    raise ValueError(f"Unknown reduction method {method}")


def bound_via_2d_quadrature(f, n):
    """O_n = 4∫₀^∞∫₀^∞ F(2x²) e^{−y²/2} L_n(y²) J₀(2xy) x y dx dy by nested quad.

    Only usable for C > 0: without exponential decay the J₀ kernel leaves an
    oscillatory tail that quadrature cannot resolve.
    """
    if n < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"n must be >= 0, got {n}")
    if f.C <= 0:
        raise EprwitError(
            error_type="NonConverged",
            message=f"2D quadrature needs C > 0; the J0 kernel does not decay for C={f.C}")

    def inner(y):
        value, _ = quad(
            lambda x: f.evaluate(2 * x * x) * j0(2 * x * y) * x,
            0, np.inf, limit=400, epsabs=1e-12, epsrel=1e-11)
        return value

    value, error = quad(
        lambda y: math.exp(-y * y / 2) * eval_laguerre(n, y * y) * y * inner(y),
        0, np.inf, limit=400, epsabs=1e-11, epsrel=1e-10)
    if error > QUAD_TOLERANCE:
        raise EprwitError(
            error_type="NonConverged",
            message=f"2D quadrature for O_{n} reports error {error:.3g} (C={f.C}, d={list(f.coefficients)})")
    return 4 * value


def bound_closed_form(C, D, n):
    """O_n = (1−C)^{n−1}/(1+C)^{n+2} · [1 − C² + D(1 − C + 2n)] for e^{−Cz}(1 + Dz).

    At C = 1 the limit is O₀ = (2 + D)/4, O₁ = D/4 and O_n = 0 for n ≥ 2.
    """
    if C <= 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"Closed form needs C > 0, got {C}")
    if n < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"n must be >= 0, got {n}")
    if C == 1:
        if n == 0:
            return (2 + D) / 4
        if n == 1:
            return D / 4
        return 0.0
    return (1 - C) ** (n - 1) / (1 + C) ** (n + 2) * (1 - C ** 2 + D * (1 - C + 2 * n))


def _envelope(f, ns):
    """Upper bound on |O_n| from |C(n−j+m, m) b^{n−j}| ≤ C(n+m, m)|b|^{max(n−m, 0)}."""
    ns = np.asarray(ns, dtype=float)
    a = 1 + f.C
    b = abs((1 - f.C) / (1 + f.C))
    total = np.zeros(ns.shape)
    for m, d in enumerate(f.coefficients):
        if d != 0:
            total += abs(d) * math.factorial(m) / a ** (m + 1) * 2 ** m \
                * comb(ns + m, m) * np.power(b, np.maximum(ns - m, 0))
    return total


def _tail_bound(f, n_max):
    """sup of the envelope over n > n_max."""
    b = abs((1 - f.C) / (1 + f.C))
    if b == 0:
        # O_n vanishes exactly for n > M
        if n_max + 1 > f.order:
            return 0.0
        return float(np.max(_envelope(f, np.arange(n_max + 1, f.order + 1))))
    if b >= 1:
        return math.inf
    order = f.order
    # every envelope term decreases once n + 1 > m|b|/(1 − |b|)
    turning = max(order, int(math.ceil(order * b / (1 - b))) + 1)
    last = max(n_max + 1, turning)
    if last - n_max > 10 ** 6:
        return math.inf
    return float(np.max(_envelope(f, np.arange(n_max + 1, last + 1))))


def _unbounded_family_bounds(f, n_max, gain):
    # C = 0: O_n is a sum of terms nondecreasing in n when every d_m >= 0
    ns = np.arange(n_max + 1)
    values = _series_bounds(f, ns)
    if np.all(f.coefficients >= 0):
        grows = np.any(f.coefficients[1:] > 0)
        return SeparabilityBounds(
            values, f_min=values[0], f_max=math.inf if grows else values[0],
            n_at_min=0, n_at_max=n_max if grows else 0,
            converged=True, tail_bound=math.inf if grows else 0.0, gain=gain)

    return SeparabilityBounds(
        values, f_min=np.min(values), f_max=np.max(values),
        n_at_min=int(np.argmin(values)), n_at_max=int(np.argmax(values)),
        converged=False, tail_bound=math.inf, gain=gain)


def gain_factor(g):
    """Argument rescaling (g² + 1/g²)/2 that maps the gain-g witness onto F."""
    if g == 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message="Gain g must be nonzero")
    return (g ** 2 + 1 / g ** 2) / 2


def separability_bounds(f, n_max=DEFAULT_NMAX, g=1.0):
    """Scan O_0..O_{n_max} and certify the extrema with the analytic envelope.

    n_max is doubled (up to MAX_NMAX) until no omitted term can exceed the
    extrema. A side that is only approached as n → ∞ (O_n → 0) is widened by
    the remaining tail bound. Bounds that cannot be certified come back with
    converged=False.
    """
    if n_max < 0:
        raise EprwitError(
            error_type="InvalidParameter",
            message=f"n_max must be >= 0, got {n_max}")
    if g != 1:
        f = f.rescaled(gain_factor(g))

    if f.C == 0:
        return _unbounded_family_bounds(f, n_max, g)

    while True:
        values = _series_bounds(f, np.arange(n_max + 1))
        f_min, f_max = float(np.min(values)), float(np.max(values))
        tail = _tail_bound(f, n_max)
        upper_ok = tail <= f_max - CERTIFY_MARGIN
        lower_ok = -tail >= f_min + CERTIFY_MARGIN
        if (upper_ok and lower_ok) or tail == 0 or n_max >= MAX_NMAX:
            break
        n_max = min(2 * n_max if n_max else 1, MAX_NMAX)

    n_at_min, n_at_max = int(np.argmin(values)), int(np.argmax(values))
    if not upper_ok:
        f_max = max(f_max, tail)
    if not lower_ok:
        f_min = min(f_min, -tail)
    converged = (upper_ok and lower_ok) or tail <= TAIL_ZERO
    return SeparabilityBounds(
        values, f_min, f_max, n_at_min, n_at_max, converged, tail, gain=g)


def moment_bound(m):
    """Separable lower bound m! on the EPR moment E_m = <Ô^m>."""
    return separability_bounds(TestFunction.power_law(m), n_max=0).f_min


def duan_bound(g):
    """½(g² + 1/g²): separable lower bound on Var(û′) + Var(v̂′)."""
    return gain_factor(g)
