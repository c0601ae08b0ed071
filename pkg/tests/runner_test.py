from unittest import TestCase
import math
import numpy as np
import sure  # noqa: F401

from eprwit import CatSpec, EprMeasurementConfig, EprwitError, TmssSpec
from eprwit.epr_measure import sample_homodyne
from eprwit.runner import (
    OURS, SIMON, OptimizationSpec, decoherence_trajectory, detection_time,
    epr_simon_decoherence_time, figure_sweep, optimize_witness,
    tmss_simon_decoherence_time, witness_report)
from eprwit.state_catalog import make_dephased_cat, make_psi_b, make_tmss, make_vacuum
from eprwit.witness_bounds import TestFunction


def fixed_phases(**kwargs):
    kwargs.setdefault("grid", (8, 5, 1, 1))
    kwargs.setdefault("phi_range", (0.0, 0.0))
    return OptimizationSpec(**kwargs)


def small_config(**kwargs):
    kwargs.setdefault("points", 129)
    return EprMeasurementConfig(**kwargs)


class OptimizationSpecTest(TestCase):
    def test_validation(self):
        for kwargs in ({"c_range": (0.0, 1.0)}, {"d_range": (2.0, 1.0)}, {"order": -1},
                       {"objective": "fame"}, {"mode": "guess"}, {"grid": (4, 4, 4)}):
            with self.assertRaises(EprwitError) as context:
                OptimizationSpec(**kwargs)
            context.exception.error_type.should.equal("InvalidConfig")

    def test_from_params(self):
        spec = OptimizationSpec.from_params({"C_range": [0.5, 2.0], "order": 0, "grid": [3, 3, 2, 2]})

        spec.c_range.should.equal((0.5, 2.0))
        spec.order.should.equal(0)
        spec.grid.should.equal((3, 3, 2, 2))
        spec.with_order(2).c_range.should.equal((0.5, 2.0))

    def test_decay_matched_d_values(self):
        spec = OptimizationSpec(grid=(4, 3, 1, 1), d_range=(-1.0, 4.0))

        values = list(spec.d_values_for(2.0))
        for expected in (1.0, 1.8, 2.0, 2.2, 4.0):
            any(abs(v - expected) < 1e-12 for v in values).should.be.true
        list(spec.with_order(0).d_values_for(2.0)).should.equal(list(spec.with_order(0).d_values()))

    def test_axes(self):
        spec = OptimizationSpec(c_range=(0.1, 10.0), d_range=(-1.0, 2.0), grid=(3, 4, 4, 1))

        np.allclose(spec.c_values(), [0.1, 1.0, 10.0]).should.be.true
        (0.0 in spec.d_values()).should.be.true
        spec.with_order(0).d_values().tolist().should.equal([0.0])
        spec.phi_values(1).tolist().should.equal([0.0])
        (spec.phi_values(4).max() < math.pi).should.be.true
        spec.phases_free.should.be.true
        fixed_phases().phases_free.should.be.false


class OptimizeWitnessTest(TestCase):
    def test_detects_psi_b(self):
        for c0 in (0.5, 0.9):
            result = optimize_witness(make_psi_b(c0), fixed_phases(), small_config())

            result.entangled.should.be.true
            result.violation.should.be.greater_than(0)
            (result.C > 0).should.be.true
            result.to_dict()["verdict"]["entangled"].should.be.true

    def test_detects_dephased_cat(self):
        spec = OptimizationSpec(grid=(6, 9, 4, 4))
        result = optimize_witness(make_dephased_cat(CatSpec(0.5, 0.3)), spec, small_config())

        result.violation.should.be.greater_than(0)

    def test_detects_photon_added_tmss_below_simon_threshold(self):
        state = make_tmss(TmssSpec(0.3, TmssSpec.ADD_BOTH))
        result = optimize_witness(state, fixed_phases(grid=(8, 9, 1, 1)), small_config())

        result.entangled.should.be.true

    def test_vacuum_is_not_detected(self):
        result = optimize_witness(make_vacuum(), fixed_phases(), small_config())

        result.entangled.should.be.false
        (result.violation <= 1e-8).should.be.true

    def test_linear_term_never_hurts_when_seeded(self):
        state = make_psi_b(0.5)
        cfg = small_config(N=100000)
        spec = fixed_phases(objective=OptimizationSpec.SIGNIFICANCE)

        plain = optimize_witness(state, spec.with_order(0), cfg)
        linear = optimize_witness(state, spec.with_order(1), cfg, start=(plain.C, [0.0], plain.phi_a, plain.phi_b))

        (linear.objective >= plain.objective - 1e-9).should.be.true
        len(linear.D).should.equal(1)
        plain.D.should.equal(())

    def test_empirical_mode(self):
        state = make_psi_b(0.9)
        cfg = small_config(N=20000, seed=7)
        samples = sample_homodyne(state, cfg)
        spec = fixed_phases(mode=OptimizationSpec.EMPIRICAL)

        result = optimize_witness(state, spec, cfg, samples=samples)
        again = optimize_witness(state, spec, cfg, samples=samples)

        result.estimate.mode.should.equal("empirical")
        result.estimate.samples_used.should.equal(20000)
        result.entangled.should.be.true
        result.C.should.equal(again.C)


class DetectionTimeTest(TestCase):
    def test_simon_on_tmss_matches_closed_form(self):
        s, nth = 0.5, 0.1
        expected = tmss_simon_decoherence_time(s, nth)

        found = detection_time(make_tmss(TmssSpec(s)), nth, SIMON)
        found.should.be.within(expected - 2e-3, expected + 2e-3)

    def test_closed_form_without_thermal_noise(self):
        tmss_simon_decoherence_time(0.5, 0.0).should.equal(math.inf)

    def test_undetected_state(self):
        detection_time(make_vacuum(), 0.1, SIMON).should.equal(0.0)

    def test_cap(self):
        detection_time(make_tmss(TmssSpec(0.5)), 0.0, SIMON, cap=1.0).should.equal(1.0)

    def test_witness_on_tmss_stops_with_simon(self):
        s, nth = 0.5, 0.1
        expected = tmss_simon_decoherence_time(s, nth)

        found = detection_time(make_tmss(TmssSpec(s)), nth, OURS, fixed_phases(grid=(4, 3, 1, 1)), small_config())
        found.should.be.within(expected - 0.02, expected + 2e-3)

    def test_violation_shrinks_along_the_trajectory(self):
        f = TestFunction(1.0)
        states = decoherence_trajectory(make_tmss(TmssSpec(0.5)), 0.1, [0.2, 0.6, 1.0])
        violations = [witness_report(state, f, small_config())["verdict"]["violation"] for state in states]

        for a, b in zip(violations, violations[1:]):
            b.should.be.lower_than(a)

    def test_epr_closed_form(self):
        epr_simon_decoherence_time(1.2, 0.1).should.equal(0.0)
        epr_simon_decoherence_time(0.5, 0.0).should.equal(math.inf)
        epr_simon_decoherence_time(math.exp(-1), 0.1).should.equal(tmss_simon_decoherence_time(0.5, 0.1))

    def test_unknown_criterion(self):
        with self.assertRaises(EprwitError) as context:
            detection_time(make_tmss(TmssSpec(0.5)), 0.1, "hunch")

        context.exception.error_type.should.equal("InvalidConfig")


class FigureSweepTest(TestCase):
    config = {
        "sweep": {"p": 0.3, "nu": [0.6], "eta": [0.9]},
        "optimize": {"grid": [4, 3, 1, 1], "phi_range": [0.0, 0.0], "max_iterations": 60},
        "measure": {"points": 129},
    }

    def test_sweep_is_deterministic(self):
        first = figure_sweep("1b", self.config)
        again = figure_sweep("1b", self.config)

        first.columns.should.equal(["nu", "eta", "C", "D", "phiA", "phiB", "violation"])
        first.rows.should.have.length_of(1)
        first.column("nu").should.equal([0.6])
        first.to_csv().should.equal(again.to_csv())
        first.to_csv().splitlines()[0].should.equal("nu,eta,C,D,phiA,phiB,violation")
        first.meta["p"].should.equal(0.3)

    def test_1c_measures_the_chosen_witness(self):
        config = {
            "sweep": {"p": 0.3, "nu": [0.5], "eta": 1.0, "nth": 0.0},
            "optimize": {"grid": [4, 5, 1, 1], "order": 0, "phi_range": [0.0, 0.0], "max_iterations": 60},
            "measure": {"points": 129, "N": 20000, "seed": 11},
        }
        first = figure_sweep("1c", config)
        again = figure_sweep("1c", config)

        first.columns.should.equal([
            "nu", "C", "D", "phiA", "phiB", "predicted_violation", "mean", "violation", "delta_e", "significance"])
        first.meta["mode"].should.equal("empirical")
        first.meta["N"].should.equal(20000)
        row = dict(zip(first.columns, first.rows[0]))
        row["delta_e"].should.be.greater_than(0)
        row["significance"].should.be.within(
            row["violation"] / row["delta_e"] - 1e-9, row["violation"] / row["delta_e"] + 1e-9)
        # sampled and predicted violations agree within the statistical error
        abs(row["violation"] - row["predicted_violation"]).should.be.lower_than(5 * row["delta_e"])
        first.to_csv().should.equal(again.to_csv())

        config["sweep"]["mode"] = "exact"
        exact = dict(zip(first.columns, figure_sweep("1c", config).rows[0]))
        exact["violation"].should.equal(row["predicted_violation"])

        config["sweep"]["mode"] = "guess"
        with self.assertRaises(EprwitError) as context:
            figure_sweep("1c", config)
        context.exception.error_type.should.equal("InvalidConfig")

    def test_1d_linear_term_never_hurts(self):
        config = {
            "sweep": {"c0": [0.5, 0.9]},
            "optimize": {"grid": [4, 3, 1, 1], "phi_range": [0.0, 0.0], "max_iterations": 60},
            "measure": {"points": 129},
        }
        result = figure_sweep("1d", config)

        result.columns.should.equal(["c0", "significance_exp", "significance_exp_linear", "C", "D"])
        result.column("c0").should.equal([0.5, 0.9])
        for plain, linear in zip(result.column("significance_exp"), result.column("significance_exp_linear")):
            (linear >= plain - 1e-9).should.be.true

    def test_2a_witness_outlasts_simon_on_psi_b(self):
        config = {
            "sweep": {"c0": [0.5], "nth": 0.5},
            "optimize": {"grid": [4, 3, 1, 1], "phi_range": [0.0, 0.0], "max_iterations": 60},
            "measure": {"points": 129},
        }
        result = figure_sweep("2a", config)

        result.columns.should.equal(["c0", "time_exp_linear", "time_exp", "time_simon"])
        row = dict(zip(result.columns, result.rows[0]))
        # Simon misses ψ_B for c0 below 1/√2
        row["time_simon"].should.equal(0.0)
        row["time_exp_linear"].should.be.greater_than(0)
        (row["time_exp"] >= 0).should.be.true

    def test_2b_subtracted_against_matched_tmss(self):
        nth = 0.05
        config = {
            "sweep": {"s": [0.5], "nth": nth},
            "optimize": {"grid": [4, 3, 1, 1], "phi_range": [0.0, 0.0], "max_iterations": 60},
            "measure": {"points": 129},
        }
        result = figure_sweep("2b", config)

        result.columns.should.equal([
            "s", "time_ours", "time_simon", "time_simon_closed", "matched_s", "time_simon_matched_tmss", "margin"])
        row = dict(zip(result.columns, result.rows[0]))
        row["matched_s"].should.be.within(0.87803 - 1e-4, 0.87803 + 1e-4)
        row["time_simon_matched_tmss"].should.equal(tmss_simon_decoherence_time(row["matched_s"], nth))
        row["time_simon_matched_tmss"].should.be.within(2.2271 - 1e-3, 2.2271 + 1e-3)
        row["time_simon_closed"].should.be.within(2.1780 - 1e-3, 2.1780 + 1e-3)
        row["time_simon"].should.be.within(row["time_simon_closed"] - 2e-3, row["time_simon_closed"] + 2e-3)

        # the witness follows Simon on the subtracted state and stops before the matched TMSS
        row["time_ours"].should.be.within(row["time_simon_closed"] - 0.02, row["time_simon_matched_tmss"])
        row["margin"].should.equal(row["time_ours"] - row["time_simon_matched_tmss"])
        result.meta["ours_outlasts_matched"].should.be.false
        result.meta["order"].should.equal(1)

    def test_json(self):
        text = figure_sweep("1b", self.config).to_json()

        text.should.contain('"figure": "1b"')

    def test_unknown_figure(self):
        with self.assertRaises(EprwitError) as context:
            figure_sweep("9z")

        context.exception.error_type.should.equal("InvalidConfig")

    def test_axis_must_increase(self):
        with self.assertRaises(EprwitError) as context:
            figure_sweep("1b", {"sweep": {"nu": [0.6, 0.2]}})

        context.exception.error_type.should.equal("InvalidConfig")


class WitnessReportTest(TestCase):
    def test_report(self):
        report = witness_report(make_tmss(TmssSpec(0.5)), TestFunction(1.0), small_config())

        report["f_max"].should.equal(0.5)
        report["bounds_converged"].should.be.true
        report["verdict"]["entangled"].should.be.true

    def test_provisional_bounds_give_no_verdict(self):
        report = witness_report(make_vacuum(), TestFunction(0.0, (-1.0, 0.5)), small_config())

        report["verdict"].should.be.none
        report["bounds_converged"].should.be.false
