from unittest import TestCase
from unittest.mock import MagicMock
from .helper import captured_output, config_file, temp_path
import json
import math
import sure  # noqa: F401
import sys

from eprwit import Cli
from eprwit.runner import tmss_simon_decoherence_time


class CliTest(TestCase):
    sweep_config = {
        "sweep": {"p": 0.3, "nu": [0.6], "eta": [0.9]},
        "optimize": {"grid": [4, 3, 1, 1], "phi_range": [0.0, 0.0], "max_iterations": 60},
        "measure": {"points": 129},
    }

    def setUp(self):
        super().setUp()

        self.exit_mock = MagicMock()
        self.original_exit = sys.exit
        sys.exit = self.exit_mock

    def tearDown(self):
        sys.exit = self.original_exit
        super().tearDown()

    def get_cmd_output(self, cli, cli_args):
        with captured_output() as (out, err):
            cli.main(cli_args)
        output = out.getvalue().strip()
        error = err.getvalue().strip()

        return output, error

    def test_no_command(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, [])

        out.should.contain("usage:")
        self.exit_mock.assert_called_with(1)

    def test_bounds(self):
        cli = Cli()
        out, err = self.get_cmd_output(cli, ["bounds", "--C", "1", "--D", "2", "--nmax", "8"])

        lines = [line.split(",") for line in out.split("\n")]
        lines[0].should.equal(["kind", "n", "value"])
        for row, expected in ((lines[1], ("O", "0", 1.0)), (lines[2], ("O", "1", 0.5)), (lines[-1], ("max", "0", 1.0))):
            row[:2].should.equal(list(expected[:2]))
            float(row[2]).should.be.within(expected[2] - 1e-12, expected[2] + 1e-12)
        err.should.equal("")
        self.exit_mock.assert_not_called()

    def test_bounds_provisional_warning(self):
        cli = Cli()
        _, err = self.get_cmd_output(cli, ["bounds", "--C", "0", "--D", "-1", "--D", "0.5"])

        err.should.contain("provisional")

    def test_witness(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, ["witness", "--state", "tmss:s=0.5", "--C", "1", "--points", "129"])
        report = json.loads(out)

        report["f_max"].should.be.within(0.5 - 1e-12, 0.5 + 1e-12)
        report["verdict"]["entangled"].should.be.true
        report["estimate"]["mode"].should.equal("exact")

    def test_witness_draws_samples(self):
        cli = Cli()
        with temp_path(suffix=".csv") as path:
            out, _ = self.get_cmd_output(cli, [
                "witness", "--state", "psi:c0=0.9", "--C", "1", "--N", "5000", "--seed", "2", "--draw", path])
            report = json.loads(out)

            report["estimate"]["mode"].should.equal("empirical")
            report["estimate"]["samples_used"].should.equal(5000)

            again, _ = self.get_cmd_output(cli, ["witness", "--samples", path, "--C", "1"])
            json.loads(again)["estimate"]["mean"].should.equal(report["estimate"]["mean"])

    def test_baseline(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, ["baseline", "--state", "tmss:s=0.5"])
        report = json.loads(out)

        report["criterion"].should.equal("simon")
        report["entangled"].should.be.true

        out, _ = self.get_cmd_output(cli, ["baseline", "--state", "vacuum", "--criterion", "duan"])
        json.loads(out)["entangled"].should.be.false

    def test_teleport(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, ["teleport", "--channel", "tmss:s=0.5", "--input", "vacuum"])
        report = json.loads(out)

        expected = 1 / (1 + math.exp(-1))
        report["fidelity"].should.be.within(expected - 1e-6, expected + 1e-6)
        report["beats_classical"].should.be.true

        out, _ = self.get_cmd_output(cli, ["teleport", "--channel", "pm:m=2"])
        report = json.loads(out)
        report["fidelity"].should.be.greater_than(0.5)
        report["E1"].should.be.within(1 - 1e-6, 1 + 1e-6)

    def test_teleport_coherent_input_keys(self):
        cli = Cli()
        reports = []
        for text in ("coherent:b=0.5", "coherent:beta=0.5", "coherent:β=0.5"):
            out, _ = self.get_cmd_output(cli, ["teleport", "--channel", "tmss:s=0.5", "--input", text])
            reports.append(json.loads(out))

        expected = 1 / (1 + math.exp(-1))
        for report in reports:
            report["fidelity"].should.be.within(expected - 1e-6, expected + 1e-6)
        self.exit_mock.assert_not_called()

    def test_teleport_rejects_unknown_input_keys(self):
        cli = Cli()
        for text in ("coherent:amp=0.5", "coherent:b=0.5,beta=0.5", "fock:m=1", "squeezed:r=1"):
            out, _ = self.get_cmd_output(cli, ["teleport", "--channel", "tmss:s=0.5", "--input", text])

            out.should.contain("teleportation input")
            self.exit_mock.assert_called_with(2)

    def test_teleport_unknown_channel(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, ["teleport", "--channel", "fiber:len=3"])

        out.should.contain("Unknown teleportation channel")
        self.exit_mock.assert_called_with(2)

    def test_sweep(self):
        cli = Cli()
        with config_file(self.sweep_config) as path:
            out, _ = self.get_cmd_output(cli, ["sweep", "--figure", "1b", "--config", path])
            again, _ = self.get_cmd_output(cli, ["sweep", "--figure", "1b", "--config", path])

        out.split("\n")[0].should.equal("nu,eta,C,D,phiA,phiB,violation")
        out.split("\n").should.have.length_of(2)
        out.should.equal(again)

    def test_detect_time(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, [
            "detect-time", "--state", "tmss:s=0.5", "--nth", "0.1", "--criterion", "simon"])
        report = json.loads(out)

        expected = tmss_simon_decoherence_time(0.5, 0.1)
        report["time"].should.be.within(expected - 2e-3, expected + 2e-3)
        report["criterion"].should.equal("simon")

    def test_out_file(self):
        cli = Cli()
        with temp_path(suffix=".csv") as path:
            out, _ = self.get_cmd_output(cli, ["bounds", "--nmax", "4", "--out", path])
            with open(path) as f:
                written = f.read()

        out.should.equal("")
        written.splitlines()[0].should.equal("kind,n,value")
        float(written.splitlines()[1].split(",")[2]).should.be.within(0.5 - 1e-12, 0.5 + 1e-12)

    def test_bad_state(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, ["baseline", "--state", "bogus:x=1"])

        out.should.contain("Unknown state family 'bogus'")
        out.should.contain("cat:nu=0.5,p=0.3")
        self.exit_mock.assert_called_with(2)

    def test_missing_state(self):
        cli = Cli()
        out, _ = self.get_cmd_output(cli, ["baseline"])

        out.should.contain("No state given")
        self.exit_mock.assert_called_with(2)

    def test_bad_config(self):
        cli = Cli()
        with config_file("{not json") as path:
            out, _ = self.get_cmd_output(cli, ["bounds", "--config", path])

            out.should.contain("is not valid JSON")
            out.should.contain(f"Check the sections of {path}")
        self.exit_mock.assert_called_with(2)

    def test_config_sections(self):
        cli = Cli()
        config = {"state": {"family": "tmss", "s": 0.5}, "noise": {"eta": 0.9, "nth": 0.0}}
        with config_file(config) as path:
            out, _ = self.get_cmd_output(cli, ["baseline", "--config", path])

        json.loads(out)["entangled"].should.be.true
        self.exit_mock.assert_not_called()
