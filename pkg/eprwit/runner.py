import csv
import io
import json
import logging
import math

import numpy as np
from scipy.optimize import minimize

from .baselines import duan_test, simon_test
from .epr_measure import (
    EprMeasurementConfig, WitnessEstimate, empirical_witness, epr_moments, epr_values,
    expectation_on_grid, joint_quadrature_distribution, sample_homodyne,
    verdict)
from .noise_channels import NoiseSpec, apply_loss_thermal, decoherence_trajectory
from .state_catalog import (
    CatSpec, TmssSpec, energy_matched_tmss, make_dephased_cat, make_psi_b,
    make_tmss)
from .utils import EprwitError
from .witness_bounds import TestFunction, separability_bounds

logger = logging.getLogger(__name__)

OURS = "ours"
SIMON = "simon"
DUAN = "duan"
CRITERIA = (OURS, SIMON, DUAN)
FIGURES = ("1b", "1c", "1d", "2a", "2b")

DETECTION_RESOLUTION = 1e-3
DETECTION_CAP = 8.0
DETECTION_START = 0.25
# D/C ratios tried next to the linear D grid; F ≈ 1 − C²z²/2 near D = C
DECAY_RATIOS = (0.5, 0.9, 1.0, 1.1, 2.0)


class OptimizationSpec(object):
    VIOLATION = "violation"
    SIGNIFICANCE = "significance"
    EXACT = "exact"
    EMPIRICAL = "empirical"

    def __init__(self, c_range=(1e-3, 10.0), d_range=(-80.0, 80.0), phi_range=(0.0, math.pi),
                 order=1, objective=VIOLATION, mode=EXACT, grid=(32, 32, 8, 8),
                 tolerance=1e-6, max_iterations=400, threshold=3.0):
        for name, (low, high) in (("C", c_range), ("D", d_range), ("phi", phi_range)):
            if low > high:
                raise EprwitError(
                    error_type="InvalidConfig",
                    message=f"Empty {name} range [{low}, {high}]")
        if c_range[0] <= 0:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"C range must be strictly positive, got {c_range}")
        if order < 0:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Polynomial order must be >= 0, got {order}")
        if objective not in (self.VIOLATION, self.SIGNIFICANCE):
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Unknown objective '{objective}'")
        if mode not in (self.EXACT, self.EMPIRICAL):
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Unknown mode '{mode}'")
        if len(grid) != 4 or min(grid) < 1:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Coarse grid needs four positive sizes (C, D, phiA, phiB), got {grid}")

        self.c_range = tuple(float(v) for v in c_range)
        self.d_range = tuple(float(v) for v in d_range)
        self.phi_range = tuple(float(v) for v in phi_range)
        self.order = int(order)
        self.objective = objective
        self.mode = mode
        self.grid = tuple(int(v) for v in grid)
        self.tolerance = float(tolerance)
        self.max_iterations = int(max_iterations)
        self.threshold = float(threshold)

    @classmethod
    def from_params(cls, params):
        defaults = cls()
        return cls(
            c_range=params.get("C_range", defaults.c_range),
            d_range=params.get("D_range", defaults.d_range),
            phi_range=params.get("phi_range", defaults.phi_range),
            order=params.get("order", defaults.order),
            objective=params.get("objective", defaults.objective),
            mode=params.get("mode", defaults.mode),
            grid=params.get("grid", defaults.grid),
            tolerance=params.get("tolerance", defaults.tolerance),
            max_iterations=params.get("max_iterations", defaults.max_iterations),
            threshold=params.get("threshold", defaults.threshold))

    def with_order(self, order):
        return OptimizationSpec(
            self.c_range, self.d_range, self.phi_range, order, self.objective, self.mode,
            self.grid, self.tolerance, self.max_iterations, self.threshold)

    def with_objective(self, objective):
        return OptimizationSpec(
            self.c_range, self.d_range, self.phi_range, self.order, objective, self.mode,
            self.grid, self.tolerance, self.max_iterations, self.threshold)

    def __repr__(self):  # pragma: no cover
        return f"<OptimizationSpec M={self.order} {self.mode}/{self.objective} grid={self.grid}>"

    def c_values(self):
        low, high = self.c_range
        if self.grid[0] == 1 or low == high:
            return np.array([math.sqrt(low * high)])
        return np.geomspace(low, high, self.grid[0])

    def d_values(self):
        if self.order == 0:
            return np.zeros(1)
        low, high = self.d_range
        values = np.linspace(low, high, self.grid[1])
        if low <= 0 <= high:
            values = np.union1d(values, [0.0])
        return values

    def d_values_for(self, C):
        """Coarse D_1 values at decay rate C: the linear grid plus multiples of C."""
        values = self.d_values()
        if self.order == 0:
            return values
        low, high = self.d_range
        near = [ratio * C for ratio in DECAY_RATIOS if low <= ratio * C <= high]
        return np.union1d(values, near)

    def phi_values(self, points):
        low, high = self.phi_range
        if points == 1 or low == high:
            return np.array([low])
        return np.linspace(low, high, points, endpoint=False)

    @property
    def phases_free(self):
        return self.phi_range[0] < self.phi_range[1] and max(self.grid[2:]) > 1


class OptimizationResult(object):
    def __init__(self, f, phi_a, phi_b, objective, estimate, bounds, decision):
        self.f = f
        self.phi_a = float(phi_a)
        self.phi_b = float(phi_b)
        self.objective = float(objective)
        self.estimate = estimate
        self.bounds = bounds
        self.verdict = decision

    def __repr__(self):  # pragma: no cover
        return f"<OptimizationResult C={self.C:.4g} D={self.D} violation={self.violation:.4g}>"

    @property
    def C(self):
        return self.f.C

    @property
    def D(self):
        return tuple(float(d) for d in self.f.poly)

    @property
    def violation(self):
        return self.verdict.violation if self.verdict else -math.inf

    @property
    def significance(self):
        return self.verdict.significance if self.verdict else None

    @property
    def entangled(self):
        return bool(self.verdict and self.verdict.entangled)

    def to_dict(self):
        return {
            "C": self.C,
            "D": list(self.D),
            "phiA": self.phi_a,
            "phiB": self.phi_b,
            "objective": self.objective,
            "estimate": self.estimate.to_dict(),
            "f_min": self.bounds.f_min,
            "f_max": self.bounds.f_max,
            "n_at_max": self.bounds.n_at_max,
            "verdict": self.verdict.to_dict() if self.verdict else None,
        }


class SweepResult(object):
    def __init__(self, figure, columns, rows, meta=None):
        self.figure = figure
        self.columns = list(columns)
        self.rows = [list(row) for row in rows]
        self.meta = meta or {}

    def __repr__(self):  # pragma: no cover
        return f"<SweepResult {self.figure} {len(self.rows)} rows>"

    def column(self, name):
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_format(v) for v in row])
        return out.getvalue()

    def to_json(self):
        return json.dumps({
            "figure": self.figure,
            "meta": self.meta,
            "columns": self.columns,
            "rows": self.rows,
        }, indent=2, sort_keys=True, default=_json_default)


def _format(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Cannot serialise {type(value)}")


def _grid_moments(grid, C, count):
    o = epr_values(grid)
    weighted = grid.values * np.exp(-C * o)
    return np.array([grid.integrate(weighted * o ** k) for k in range(count)])


def _sample_moments(o, C, count):
    weighted = np.exp(-C * o)
    return np.array([np.mean(weighted * o ** k) for k in range(count)])


class _WitnessScore(object):
    """Objective over (C, D, φ_A, φ_B) using linearity of <F> in the D_m.

    With d = (1, D_1, …, D_M), <F> = Σ d_m μ_m and <F²> = Σ d_i d_j ν_{i+j}
    where μ_k = <e^{−CÔ}Ô^k> and ν_k = <e^{−2CÔ}Ô^k>.
    """

    def __init__(self, spec, runs, moments):
        self.spec = spec
        self.runs = runs
        self.moments = moments
        self._bounds = {}

    def bounds(self, C, D):
        key = (round(C, 12), tuple(round(d, 12) for d in D))
        if key not in self._bounds:
            self._bounds[key] = separability_bounds(TestFunction(C, D))
        return self._bounds[key]

    def score(self, C, D, source):
        bounds = self.bounds(C, D)
        if not bounds.converged:
            return -math.inf

        order = self.spec.order
        d = np.concatenate([[1.0], D])
        mu = self.moments(source, C, order + 1)
        mean = float(d @ mu)
        violation = max(mean - bounds.f_max, bounds.f_min - mean)
        if self.spec.objective == OptimizationSpec.VIOLATION:
            return violation

        nu = self.moments(source, 2 * C, 2 * order + 1)
        second = sum(d[i] * d[j] * nu[i + j] for i in range(order + 1) for j in range(order + 1))
        delta_e = math.sqrt(max(second - mean ** 2, 0.0) / self.runs)
        if delta_e == 0:
            return math.copysign(math.inf, violation) if violation else 0.0
        return violation / delta_e


def _bounded(x, lows, highs):
    return np.minimum(np.maximum(x, lows), highs)


def optimize_witness(state, spec=None, cfg=None, samples=None, start=None):
    """Search (C, D, φ_A, φ_B) for the largest violation (or significance).

    A coarse grid scan is refined with Nelder–Mead. In empirical mode one
    sample set is drawn (or `samples` reused) and only (C, D) are searched.
    `start` is an optional (C, D, φ_A, φ_B) tuple competing with the coarse
    optimum as the refinement seed. The reported verdict is recomputed with
    freshly certified bounds.
    """
    spec = spec or OptimizationSpec()
    cfg = cfg or EprMeasurementConfig()
    order = spec.order

    if spec.mode == OptimizationSpec.EMPIRICAL:
        if samples is None:
            samples = sample_homodyne(state, cfg)
        o = np.asarray(samples)[:, 2]
        scorer = _WitnessScore(spec, len(o), _sample_moments)
        phase_pairs = [(cfg.phi_a, cfg.phi_b)]
        sources = {phase_pairs[0]: o}
        phases_free = False
    else:
        scorer = _WitnessScore(spec, cfg.N, _grid_moments)
        phase_pairs = [
            (phi_a, phi_b)
            for phi_a in spec.phi_values(spec.grid[2])
            for phi_b in spec.phi_values(spec.grid[3])
        ]
        sources = {}
        phases_free = spec.phases_free

    def source(phi_a, phi_b):
        key = (round(phi_a, 12), round(phi_b, 12))
        if key not in sources:
            sources[key] = joint_quadrature_distribution(state, cfg.with_phases(phi_a, phi_b))
        return sources[key]

    best = (-math.inf, None)
    for phi_a, phi_b in phase_pairs:
        grid = source(phi_a, phi_b)
        for C in spec.c_values():
            for d1 in spec.d_values_for(C):
                D = np.zeros(order)
                if order:
                    D[0] = d1
                value = scorer.score(C, D, grid)
                if value > best[0]:
                    best = (value, (C, D, phi_a, phi_b))
    logger.info(f"Coarse scan best objective {best[0]:.6g} at {best[1]}")

    if start is not None:
        C, D, phi_a, phi_b = start
        D = np.resize(np.asarray(D, dtype=float), order) if order else np.zeros(0)
        value = scorer.score(C, D, source(phi_a, phi_b) if phases_free else source(*phase_pairs[0]))
        if value > best[0]:
            best = (value, (C, D, phi_a, phi_b))

    if best[1] is None:
        raise EprwitError(
            error_type="NonConverged",
            message="No test function in the search box has certified separability bounds")

    C0, D0, phi_a0, phi_b0 = best[1]
    lows = [spec.c_range[0]] + [spec.d_range[0]] * order
    highs = [spec.c_range[1]] + [spec.d_range[1]] * order
    x0 = [C0] + list(D0)
    if phases_free:
        lows += [spec.phi_range[0]] * 2
        highs += [spec.phi_range[1]] * 2
        x0 += [phi_a0, phi_b0]
    lows, highs = np.array(lows), np.array(highs)

    def unpack(x):
        x = _bounded(np.asarray(x, dtype=float), lows, highs)
        if phases_free:
            return x[0], x[1:1 + order], x[-2], x[-1]
        return x[0], x[1:1 + order], phi_a0, phi_b0

    def negative(x):
        C, D, phi_a, phi_b = unpack(x)
        value = scorer.score(C, D, source(phi_a, phi_b))
        return 1e6 if not math.isfinite(value) and value < 0 else -value

    result = minimize(
        negative, np.array(x0, dtype=float), method="Nelder-Mead",
        bounds=list(zip(lows, highs)),
        options={"xatol": 1e-6, "fatol": spec.tolerance, "maxiter": spec.max_iterations})

    if -result.fun >= best[0]:
        C, D, phi_a, phi_b = unpack(result.x)
        objective = -result.fun
    else:
        C, D, phi_a, phi_b = C0, D0, phi_a0, phi_b0
        objective = best[0]
    logger.info(f"Refined objective {objective:.6g} at C={C:.6g} D={list(D)} phi=({phi_a:.4g}, {phi_b:.4g})")

    f = TestFunction(C, D)
    bounds = separability_bounds(f)
    if spec.mode == OptimizationSpec.EMPIRICAL:
        estimate = empirical_witness(samples, f)
    else:
        estimate = expectation_on_grid(source(phi_a, phi_b), f, cfg.N)
    decision = verdict(estimate, bounds, threshold=spec.threshold) if bounds.converged else None
    return OptimizationResult(f, phi_a, phi_b, objective, estimate, bounds, decision)


def detected(state, criterion, spec=None, cfg=None):
    if criterion == SIMON:
        return simon_test(state).entangled
    if criterion == DUAN:
        return duan_test(state).entangled
    if criterion == OURS:
        return optimize_witness(state, spec, cfg).entangled
    raise EprwitError(
        error_type="InvalidConfig",
        message=f"Unknown criterion '{criterion}', expected one of {', '.join(CRITERIA)}")


def detection_time(state, nth, criterion=OURS, spec=None, cfg=None,
                   resolution=DETECTION_RESOLUTION, cap=DETECTION_CAP):
    """Largest log(1/η) at which `criterion` still detects entanglement.

    Brackets by doubling from DETECTION_START, then bisects to `resolution`.
    States never detected give 0; states still detected at `cap` give `cap`.
    """
    def detected_at(t):
        decohered = decoherence_trajectory(state, nth, [t])[0]
        return detected(decohered, criterion, spec, cfg)

    if not detected(state, criterion, spec, cfg):
        logger.info(f"{criterion}: not detected at t=0")
        return 0.0

    low, high = 0.0, DETECTION_START
    while detected_at(high):
        low = high
        if high >= cap:
            logger.info(f"{criterion}: still detected at the cap t={cap}")
            return cap
        high = min(2 * high, cap)

    while high - low > resolution:
        middle = (low + high) / 2
        if detected_at(middle):
            low = middle
        else:
            high = middle
        logger.debug(f"{criterion}: bracket [{low:.5f}, {high:.5f}]")
    return low


def epr_simon_decoherence_time(epr_mean, nth):
    """log(1/η*) at which ⟨Ô⟩ = η·epr_mean + (1 − η)(2n_th + 1) reaches 1.

    For symmetric phase-insensitive states with zero means (TMSS and its
    photon-subtracted or -added versions) this is where Simon stops detecting.
    """
    if epr_mean >= 1:
        return 0.0
    if nth == 0:
        return math.inf
    return -math.log(2 * nth / (2 * nth + 1 - epr_mean))


def tmss_simon_decoherence_time(s, nth):
    """log(1/η*) with η* = 2n_th/(2n_th + 1 − e^{−2s}); infinite for n_th = 0."""
    return epr_simon_decoherence_time(math.exp(-2 * s), nth)


def _sweep_axis(config, key, default):
    values = config.get(key, default)
    values = [float(v) for v in values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Sweep axis '{key}' must be strictly increasing, got {values}")
    return values


def _sweep_parts(config):
    spec = OptimizationSpec.from_params(config.get("optimize", {}))
    measure = dict(config.get("measure", {}))
    measure.setdefault("points", 257)
    return spec, measure


def _sweep_1b(config):
    spec, measure = _sweep_parts(config)
    sweep = config.get("sweep", {})
    p = float(sweep.get("p", 0.3))
    nus = _sweep_axis(sweep, "nu", [0.2, 0.4, 0.6, 0.8, 1.0])
    etas = _sweep_axis(sweep, "eta", [0.5, 0.7, 0.9, 1.0])
    cfg = EprMeasurementConfig.from_params(measure)

    rows = []
    for nu in nus:
        state = make_dephased_cat(CatSpec(nu, p))
        for eta in etas:
            noisy = apply_loss_thermal(state, NoiseSpec(eta, 0.0))
            best = optimize_witness(noisy, spec, cfg)
            logger.info(f"1b nu={nu} eta={eta}: violation {best.violation:.6g}")
            rows.append([nu, eta, best.C, best.D[0] if best.D else 0.0, best.phi_a, best.phi_b, best.violation])
    return SweepResult("1b", ["nu", "eta", "C", "D", "phiA", "phiB", "violation"], rows, {"p": p})


def _detection_noise(sweep, eta_default=0.7, nth_default=0.07):
    return NoiseSpec(float(sweep.get("eta", eta_default)), float(sweep.get("nth", nth_default)), NoiseSpec.DETECTION)


def _sweep_1c(config):
    spec, measure = _sweep_parts(config)
    sweep = config.get("sweep", {})
    p = float(sweep.get("p", 0.5))
    nus = _sweep_axis(sweep, "nu", [0.2, 0.4, 0.6, 0.8, 1.0])
    measure.setdefault("N", 100000)
    cfg = EprMeasurementConfig.from_params(measure, noise=_detection_noise(sweep))

    mode = sweep.get("mode", OptimizationSpec.EMPIRICAL)
    if mode not in (OptimizationSpec.EXACT, OptimizationSpec.EMPIRICAL):
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Sweep 1c mode must be exact or empirical, got '{mode}'")

    rows = []
    for nu in nus:
        state = make_dephased_cat(CatSpec(nu, p))
        best = optimize_witness(state, spec, cfg)
        estimate, decision = best.estimate, best.verdict
        if mode == OptimizationSpec.EMPIRICAL and best.bounds.converged:
            # the witness is chosen on the predicted distribution, then measured
            samples = sample_homodyne(state, cfg.with_phases(best.phi_a, best.phi_b))
            estimate = empirical_witness(samples, best.f)
            decision = verdict(estimate, best.bounds, threshold=spec.threshold)
        violation = decision.violation if decision else best.violation
        logger.info(f"1c nu={nu}: violation {violation:.6g} ± {estimate.delta_e}")
        rows.append([
            nu, best.C, best.D[0] if best.D else 0.0, best.phi_a, best.phi_b, best.violation,
            estimate.mean, violation, estimate.delta_e, decision.significance if decision else None])
    return SweepResult(
        "1c",
        ["nu", "C", "D", "phiA", "phiB", "predicted_violation", "mean", "violation", "delta_e", "significance"],
        rows,
        {"p": p, "eta": cfg.noise.eta, "nth": cfg.noise.nth, "N": cfg.N, "seed": cfg.seed, "mode": mode})


def _sweep_1d(config):
    spec, measure = _sweep_parts(config)
    spec = spec.with_objective(OptimizationSpec.SIGNIFICANCE)
    sweep = config.get("sweep", {})
    c0s = _sweep_axis(sweep, "c0", [0.2, 0.4, 0.6, 0.8])
    measure.setdefault("N", 100000)
    cfg = EprMeasurementConfig.from_params(measure, noise=_detection_noise(sweep))

    rows = []
    for c0 in c0s:
        state = make_psi_b(c0)
        plain = optimize_witness(state, spec.with_order(0), cfg)
        # the plain optimum seeds the larger family so it can only improve
        seed = (plain.C, [0.0], plain.phi_a, plain.phi_b)
        linear = optimize_witness(state, spec.with_order(1), cfg, start=seed)
        logger.info(f"1d c0={c0}: significance {plain.objective:.4g} -> {linear.objective:.4g}")
        rows.append([c0, plain.objective, linear.objective, linear.C, linear.D[0]])
    return SweepResult(
        "1d", ["c0", "significance_exp", "significance_exp_linear", "C", "D"], rows,
        {"eta": cfg.noise.eta, "nth": cfg.noise.nth, "N": cfg.N})


def _sweep_2a(config):
    spec, measure = _sweep_parts(config)
    sweep = config.get("sweep", {})
    nth = float(sweep.get("nth", 0.5))
    c0s = _sweep_axis(sweep, "c0", [0.2, 0.4, 0.6, 0.8])
    cfg = EprMeasurementConfig.from_params(measure)

    rows = []
    for c0 in c0s:
        state = make_psi_b(c0)
        linear = detection_time(state, nth, OURS, spec.with_order(1), cfg)
        plain = detection_time(state, nth, OURS, spec.with_order(0), cfg)
        simon = detection_time(state, nth, SIMON)
        logger.info(f"2a c0={c0}: {linear:.4f} / {plain:.4f} / {simon:.4f}")
        rows.append([c0, linear, plain, simon])
    return SweepResult("2a", ["c0", "time_exp_linear", "time_exp", "time_simon"], rows, {"nth": nth})


def _sweep_2b(config):
    spec, measure = _sweep_parts(config)
    sweep = config.get("sweep", {})
    nth = float(sweep.get("nth", 0.05))
    squeezings = _sweep_axis(sweep, "s", [0.2, 0.4, 0.6])
    cfg = EprMeasurementConfig.from_params(measure)

    spec = spec.with_order(max(spec.order, 1))

    rows = []
    for s in squeezings:
        subtracted = TmssSpec(s, TmssSpec.SUBTRACT_BOTH)
        state = make_tmss(subtracted)
        ours = detection_time(state, nth, OURS, spec, cfg)
        simon = detection_time(state, nth, SIMON)
        simon_closed = epr_simon_decoherence_time(epr_moments(state, 1, cfg)[0], nth)
        matched = energy_matched_tmss(subtracted)
        gaussian = tmss_simon_decoherence_time(matched.s, nth)
        logger.info(f"2b s={s}: {ours:.4f} / {simon:.4f} / matched TMSS {gaussian:.4f}")
        if ours <= gaussian:
            logger.warning(f"2b s={s}: the witness stops at {ours:.4f}, before Simon on the matched TMSS ({gaussian:.4f})")
        rows.append([s, ours, simon, simon_closed, matched.s, gaussian, ours - gaussian])
    return SweepResult(
        "2b",
        ["s", "time_ours", "time_simon", "time_simon_closed", "matched_s", "time_simon_matched_tmss", "margin"],
        rows,
        {"nth": nth, "order": spec.order, "ours_outlasts_matched": all(row[-1] > 0 for row in rows)})


def figure_sweep(figure, config=None):
    """Data table behind one of the figure families; `config` uses the JSON schema."""
    config = config or {}
    sweeps = {
        "1b": _sweep_1b,
        "1c": _sweep_1c,
        "1d": _sweep_1d,
        "2a": _sweep_2a,
        "2b": _sweep_2b,
    }
    if figure not in sweeps:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Unknown figure '{figure}', expected one of {', '.join(FIGURES)}")
    logger.info(f"Running sweep {figure}")
    return sweeps[figure](config)


def witness_report(state, f, cfg, samples=None, threshold=3.0):
    """Estimate, bounds and verdict for one test function."""
    bounds = separability_bounds(f)
    if samples is not None:
        estimate = empirical_witness(samples, f)
    else:
        estimate = expectation_on_grid(joint_quadrature_distribution(state, cfg), f, cfg.N)

    report = {
        "estimate": estimate.to_dict(),
        "f_min": bounds.f_min,
        "f_max": bounds.f_max,
        "n_at_max": bounds.n_at_max,
        "bounds_converged": bounds.converged,
    }
    if bounds.converged:
        report["verdict"] = verdict(estimate, bounds, threshold).to_dict()
    else:
        report["verdict"] = None
    if estimate.mode == WitnessEstimate.EXACT and not estimate.converged:
        logger.warning("Distribution grid did not normalise; the estimate may be inaccurate")
    return report
