from unittest import TestCase
import sure  # noqa: F401

from eprwit import EprwitError, NoiseSpec, TmssSpec
from eprwit.config import (
    load_config, measurement_from_config, merge_overrides, noise_from_config,
    optimization_from_config, prepared_state, state_from_config,
    witness_from_config)
from eprwit.fock_core import save_state
from eprwit.state_catalog import make_tmss
from .helper import config_file, temp_path


class LoadConfigTest(TestCase):
    def test_no_path(self):
        load_config(None).should.equal({})

    def test_sections(self):
        config = {"state": {"family": "vacuum"}, "measure": {"points": 129}}
        with config_file(config) as path:
            load_config(path).should.equal(config)

    def test_missing_file(self):
        with self.assertRaises(EprwitError) as context:
            load_config("/nonexistent/run.json")

        context.exception.error_type.should.equal("InvalidConfig")

    def test_invalid_documents(self):
        for document in ("[1, 2]", '{"colour": {}}', '{"noise": 3}', "{oops"):
            with config_file(document) as path:
                with self.assertRaises(EprwitError) as context:
                    load_config(path)
                context.exception.error_type.should.equal("InvalidConfig")


class SectionTest(TestCase):
    def test_merge_overrides(self):
        merged = merge_overrides({"C": 1.0, "D": [2.0]}, C=0.5, D=None)

        merged.should.equal({"C": 0.5, "D": [2.0]})
        merge_overrides(None, seed=3).should.equal({"seed": 3})

    def test_state_from_string_and_section(self):
        text = state_from_config("tmss:s=0.4")
        section = state_from_config({"family": "tmss", "s": 0.4})

        (text.dim_a, text.dim_b).should.equal((section.dim_a, section.dim_b))
        (abs(text.matrix - section.matrix).max() < 1e-12).should.be.true

    def test_state_needs_family(self):
        with self.assertRaises(EprwitError) as context:
            state_from_config({"s": 0.4})

        context.exception.error_type.should.equal("InvalidConfig")

    def test_state_file(self):
        state = make_tmss(TmssSpec(0.3))
        with temp_path(suffix=".txt") as path:
            save_state(state, path)
            loaded = state_from_config(f"file:{path}")

        (abs(loaded.matrix - state.matrix).max() < 1e-12).should.be.true

    def test_witness(self):
        f = witness_from_config({"C": 0.5, "D": 2.0})

        f.C.should.equal(0.5)
        f.poly.should.equal((2.0,))
        witness_from_config(None).C.should.equal(1.0)

        with self.assertRaises(EprwitError):
            witness_from_config({"C": "fast"})

    def test_noise_stages(self):
        noise_from_config({}).should.be.none

        state = make_tmss(TmssSpec(0.3))
        channel = noise_from_config({"eta": 0.8, "nth": 0.1})
        detection = noise_from_config({"eta": 0.8, "nth": 0.1, "stage": "detection"})

        prepared_state(state, detection).should.be(state)
        (prepared_state(state, channel) is state).should.be.false
        measurement_from_config({}, channel).noise.should.be.none
        measurement_from_config({}, detection).noise.stage.should.equal(NoiseSpec.DETECTION)

    def test_bad_measure_section(self):
        with self.assertRaises(EprwitError) as context:
            measurement_from_config({"phiA": "north"})

        context.exception.error_type.should.equal("InvalidConfig")

    def test_optimization(self):
        optimization_from_config({"order": 0}).order.should.equal(0)

        with self.assertRaises(EprwitError):
            optimization_from_config({"grid": [1, 2]})
