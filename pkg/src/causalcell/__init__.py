"""Quantum-switch charging and stabilization of qubit batteries."""

from .channels import KrausChannel, LindbladSpec, apply, choi, kraus_from_choi, kraus_from_dilation, lindblad_integrate, lindblad_propagator
from .errors import CausalCellError, InvalidInput, NoRescueFound, NumericalFailure
from .switch import ControlState, SwitchOutcome, measure_control, switch_evolve, switch_kraus, switch_of_duration

__version__ = "0.1.0"
