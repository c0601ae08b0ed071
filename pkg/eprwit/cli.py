import argparse
import json
import logging
import math
import sys

import eprwit.text.cli_text as cli_text
from .baselines import duan_test, simon_test
from .config import (
    load_config, measurement_from_config, merge_overrides, noise_from_config,
    optimization_from_config, prepared_state, state_from_config,
    witness_from_config)
from .epr_measure import epr_moments, load_samples, sample_homodyne, save_samples
from .fock_core import PhaseSpaceGrid
from .runner import CRITERIA, FIGURES, OURS, detection_time, figure_sweep, witness_report
from .teleport import (
    DEFAULT_EXTENT, DEFAULT_POINTS, PmChannelSpec, TeleportReport,
    characteristic_fidelity, coherent_characteristic, fock_characteristic,
    fock_input_fidelity, no_epr_report, pm_channel, pm_moment, state_channel,
    tmss_channel, vacuum_characteristic)
from .utils import EprwitError, parse_spec_string
from .witness_bounds import separability_bounds

USAGE_ERRORS = ("InvalidConfig", "InvalidParameter")
TELEPORT_INPUTS = {
    "vacuum": (),
    "coherent": ("b", "beta", "β"),
    "fock": ("n",),
}


def teleport_input_params(family, params, text):
    """Check the keys of a teleportation input; `beta` and `β` alias `b`."""
    if family not in TELEPORT_INPUTS:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Unknown teleportation input '{text}', expected one of {', '.join(TELEPORT_INPUTS)}")

    unknown = sorted(set(params) - set(TELEPORT_INPUTS[family]))
    if unknown:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Unknown key(s) {', '.join(unknown)} in teleportation input '{text}'")

    if family == "coherent":
        values = [params[key] for key in TELEPORT_INPUTS["coherent"] if key in params]
        if len(values) > 1:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Give the coherent amplitude once in '{text}'")
        return {"b": values[0] if values else 0.0}
    if family == "fock":
        return {"n": params.get("n", 0)}
    return {}


def add_common_args(parser):
    parser.add_argument("--config", "-c", type=str, help="JSON run configuration")
    parser.add_argument("--out", "-o", type=str, help="Write the result to this file instead of stdout")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress")


def add_state_arg(parser):
    parser.add_argument(
        "--state",
        type=str,
        help="State as family:key=value,... (cat, tmss, psi, coherent, thermal, vacuum) or file:PATH")


def add_noise_args(parser):
    parser.add_argument("--eta", type=float, help="Transmissivity of the thermal attenuator")
    parser.add_argument("--nth", type=float, help="Thermal occupation of the attenuator")
    parser.add_argument(
        "--stage",
        choices=("channel", "detection"),
        help="Apply the attenuator to the state (channel) or in front of the detectors (detection)")


def add_measure_args(parser):
    parser.add_argument("--phiA", type=float, help="Local phase on mode A")
    parser.add_argument("--phiB", type=float, help="Local phase on mode B")
    parser.add_argument("--N", type=int, help="Number of homodyne repetitions")
    parser.add_argument("--seed", type=int, help="Sampling seed")
    parser.add_argument("--points", type=int, help="Grid points per quadrature axis")


def add_witness_args(parser):
    parser.add_argument("--C", type=float, help="Decay rate of the test function")
    parser.add_argument(
        "--D",
        type=float,
        action="append",
        help="Polynomial coefficient; repeat for D_1, D_2, ...")


class Cli(object):
    def main(self, passed_args=None):
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="Certify two-mode entanglement with functional EPR witnesses")

        subparsers = parser.add_subparsers(dest="cmd")

        bounds_parser = subparsers.add_parser(
            "bounds",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=cli_text.bounds_help,
            help="Print the separability bounds O_n of a test function")
        add_common_args(bounds_parser)
        add_witness_args(bounds_parser)
        bounds_parser.add_argument("--nmax", type=int, default=64, help="Initial Fock cutoff of the O_n scan")
        bounds_parser.add_argument("--g", type=float, default=1.0, help="Gain of the rescaled witness")

        witness_parser = subparsers.add_parser(
            "witness",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=cli_text.witness_help,
            help="Evaluate a witness on a state and report the verdict")
        add_common_args(witness_parser)
        add_state_arg(witness_parser)
        add_noise_args(witness_parser)
        add_measure_args(witness_parser)
        add_witness_args(witness_parser)
        witness_parser.add_argument("--samples", type=str, help="Recorded x1,p2[,o_epr] CSV to evaluate")
        witness_parser.add_argument("--draw", type=str, help="Sample N rows, save them here and evaluate them")
        witness_parser.add_argument("--threshold", type=float, default=3.0, help="Significance needed to certify")

        baseline_parser = subparsers.add_parser(
            "baseline",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=cli_text.baseline_help,
            help="Run the Simon or Duan criterion")
        add_common_args(baseline_parser)
        add_state_arg(baseline_parser)
        add_noise_args(baseline_parser)
        baseline_parser.add_argument("--criterion", choices=("simon", "duan"), default="simon")
        baseline_parser.add_argument("--g", type=float, default=1.0, help="Duan gain")
        baseline_parser.add_argument("--phiA", type=float, default=0.0)
        baseline_parser.add_argument("--phiB", type=float, default=0.0)

        teleport_parser = subparsers.add_parser(
            "teleport",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=cli_text.teleport_help,
            help="Teleportation fidelity through a channel")
        add_common_args(teleport_parser)
        add_state_arg(teleport_parser)
        teleport_parser.add_argument("--channel", type=str, default="tmss:s=0.5")
        teleport_parser.add_argument("--input", type=str, default="vacuum")

        sweep_parser = subparsers.add_parser(
            "sweep",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=cli_text.sweep_help,
            help="Data table behind one of the figures")
        add_common_args(sweep_parser)
        sweep_parser.add_argument("--figure", choices=FIGURES, required=True)
        sweep_parser.add_argument("--seed", type=int, help="Sampling seed")

        detect_parser = subparsers.add_parser(
            "detect-time",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=cli_text.detect_time_help,
            help="Decoherence time up to which a criterion detects entanglement")
        add_common_args(detect_parser)
        add_state_arg(detect_parser)
        add_measure_args(detect_parser)
        detect_parser.add_argument("--nth", type=float, help="Thermal occupation of the attenuator")
        detect_parser.add_argument("--criterion", choices=CRITERIA, default=OURS)
        detect_parser.add_argument("--order", type=int, help="Polynomial order of the optimised witness")

        if passed_args is not None:
            args = parser.parse_args(passed_args)
        else:
            args = parser.parse_args()  # pragma: no cover

        if not args.cmd:
            parser.print_help()
            sys.exit(1)
            return

        if args.verbose:
            logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")

        func = args.cmd.replace("-", "_")
        try:
            getattr(self, func)(args)
        except EprwitError as e:
            self.fail(e, args)

    def bounds(self, args):
        config = load_config(args.config)
        f = witness_from_config(merge_overrides(config.get("witness"), C=args.C, D=args.D))
        result = separability_bounds(f, n_max=args.nmax, g=args.g)

        lines = ["kind,n,value"]
        lines += [f"O,{n},{value!r}" for n, value in result.rows()]
        lines.append(f"min,{result.n_at_min},{result.f_min!r}")
        lines.append(f"max,{result.n_at_max},{result.f_max!r}")
        if not result.converged:
            print("Warning: bounds are provisional, the O_n tail could not be certified", file=sys.stderr)
        self.emit("\n".join(lines), args)

    def witness(self, args):
        config = load_config(args.config)
        noise = self.get_noise(args, config)
        cfg = self.get_measurement(args, config, noise)
        f = witness_from_config(merge_overrides(config.get("witness"), C=args.C, D=args.D))

        samples = None
        if args.samples:
            samples = load_samples(args.samples)
            state = None
        else:
            state = prepared_state(self.get_state(args, config), noise)
            if args.draw:
                samples = sample_homodyne(state, cfg)
                save_samples(samples, args.draw)

        report = witness_report(state, f, cfg, samples=samples, threshold=args.threshold)
        self.emit(json.dumps(report, indent=2), args)

    def baseline(self, args):
        config = load_config(args.config)
        state = prepared_state(self.get_state(args, config), self.get_noise(args, config))
        if args.criterion == "duan":
            report = duan_test(state, g=args.g, phi_a=args.phiA, phi_b=args.phiB)
        else:
            report = simon_test(state)
        self.emit(json.dumps(report.to_dict(), indent=2), args)

    def teleport(self, args):
        config = load_config(args.config)
        family, params = parse_spec_string(args.channel)
        input_family, input_params = parse_spec_string(args.input)
        grid = PhaseSpaceGrid.square(DEFAULT_EXTENT, DEFAULT_POINTS, label="teleport")

        input_params = teleport_input_params(input_family, input_params, args.input)
        if input_family == "vacuum":
            c_in = vacuum_characteristic(grid)
        elif input_family == "coherent":
            c_in = coherent_characteristic(complex(input_params["b"]), grid)
        else:
            c_in = fock_characteristic(int(input_params["n"]), grid)

        if family == "tmss":
            s = float(params.get("s", 0.5))
            report = TeleportReport(characteristic_fidelity(c_in, tmss_channel(s)), math.exp(-2 * s), args.channel)
        elif family == "pm":
            spec = PmChannelSpec(params.get("m", 1))
            if input_family == "fock":
                report = TeleportReport(
                    fock_input_fidelity(spec, int(input_params.get("n", 0))), 4 * pm_moment(spec, 2), spec.label)
            elif input_family == "vacuum":
                report = no_epr_report(spec)
            else:
                report = TeleportReport(
                    characteristic_fidelity(c_in, pm_channel(spec)), 4 * pm_moment(spec, 2), spec.label)
        elif family == "state":
            state = self.get_state(args, config)
            e1 = epr_moments(state, 1, measurement_from_config(config.get("measure")))[0]
            report = TeleportReport(characteristic_fidelity(c_in, state_channel(state)), e1, "state")
        else:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Unknown teleportation channel '{args.channel}'")

        self.emit(json.dumps(report.to_dict(), indent=2), args)

    def sweep(self, args):
        config = load_config(args.config)
        if args.seed is not None:
            config = dict(config, measure=merge_overrides(config.get("measure"), seed=args.seed))
        result = figure_sweep(args.figure, config)
        self.emit(result.to_csv().rstrip("\n"), args)

    def detect_time(self, args):
        config = load_config(args.config)
        state = self.get_state(args, config)
        nth = args.nth if args.nth is not None else float(config.get("noise", {}).get("nth", 0.0))
        spec = optimization_from_config(merge_overrides(config.get("optimize"), order=args.order))
        cfg = self.get_measurement(args, config, None)

        t = detection_time(state, nth, args.criterion, spec, cfg)
        self.emit(json.dumps({"criterion": args.criterion, "nth": nth, "time": t}, indent=2), args)

    def get_state(self, args, config):
        if args.state:
            return state_from_config(args.state)
        if "state" in config:
            return state_from_config(config["state"])
        raise EprwitError(
            error_type="InvalidConfig",
            message="No state given")

    def get_noise(self, args, config):
        section = merge_overrides(config.get("noise"), eta=args.eta, nth=args.nth, stage=args.stage)
        return noise_from_config(section)

    def get_measurement(self, args, config, noise):
        section = merge_overrides(
            config.get("measure"), phiA=args.phiA, phiB=args.phiB, N=args.N, seed=args.seed, points=args.points)
        return measurement_from_config(section, noise)

    def emit(self, text, args):
        if args.out:
            with open(args.out, "w") as f:
                f.write(text + "\n")
        else:
            print(text)

    def fail(self, e, args):
        message = e.message
        if e.error_type == "InvalidConfig":
            if getattr(args, "config", None):
                message += f"\n\tCheck the sections of {args.config} against the documented schema."
            else:
                message += "\n\tState specs look like cat:nu=0.5,p=0.3 or tmss:s=0.4,op=subtract."
        if e.error_type == "ProvisionalBounds":
            message += "\n\tThe O_n tail was not certified; try a larger --nmax or a smaller |D|."
        if e.error_type == "NonConverged":
            message += "\n\tRaise the grid span or the Fock cutoff."
        if e.error_type == "InvalidData":
            message += "\n\tSample files need a header line and x1,p2[,o_epr] columns."

        print(message)
        sys.exit(2 if e.error_type in USAGE_ERRORS else 1)
