# flake8: noqa F401

from .fock_core import TwoModeState, PhaseSpaceGrid, ModeTransform
from .state_catalog import CatSpec, TmssSpec
from .noise_channels import NoiseSpec
from .witness_bounds import TestFunction, SeparabilityBounds, separability_bounds
from .epr_measure import EprMeasurementConfig, WitnessEstimate, Verdict
from .runner import OptimizationSpec, optimize_witness, detection_time, figure_sweep
from .utils import EprwitError
from .cli import Cli

cli = Cli().main
