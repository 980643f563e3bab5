"""Ideal-measurement (Lueders) channels on a trapped-ion qutrit.

The package simulates a fluorescence measurement pulse as a quantum channel,
integrates the underlying master equation, generates synthetic process
tomography data, reconstructs Choi matrices from it, and runs the associated
statistical tests.  See the module docstrings for conventions; the Choi index
ordering (system (x) auxiliary) is documented in :mod:`lueders.channels`.
"""

from . import channels, dynamics, linalg, states, tomography
from .channels import (
    MeasurementModel,
    apply_channel,
    identity_choi,
    kraus_channel,
    lueders_channel,
    measurement_channel,
    pointer_model_channel,
    process_fidelity,
)
from .dynamics import (
    ExperimentParams,
    g0_adiabatic,
    g0_exact,
    p_scatt,
    param_uncertainty,
)
from .states import preparation_set, preparation_states, rotation_unitary
from .tomography import (
    ReconstructionResult,
    TomographyDataset,
    bootstrap_uncertainty,
    probabilities,
    reconstruct,
    reconstruct_tp,
    simulate_dataset,
    tp_likelihood_ratio_test,
)

__version__ = "0.1.0"

__all__ = [
    "MeasurementModel",
    "ExperimentParams",
    "ReconstructionResult",
    "TomographyDataset",
    "apply_channel",
    "bootstrap_uncertainty",
    "channels",
    "dynamics",
    "g0_adiabatic",
    "g0_exact",
    "identity_choi",
    "kraus_channel",
    "linalg",
    "lueders_channel",
    "measurement_channel",
    "p_scatt",
    "param_uncertainty",
    "pointer_model_channel",
    "preparation_set",
    "preparation_states",
    "probabilities",
    "process_fidelity",
    "reconstruct",
    "reconstruct_tp",
    "rotation_unitary",
    "simulate_dataset",
    "states",
    "tomography",
    "tp_likelihood_ratio_test",
]
