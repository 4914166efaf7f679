"""Exact capacity of MISO channels with one-bit DACs and ADCs."""

__version__ = "0.1.0"

from .capacity import (  # noqa: E402
    CapacityResult,
    InputDistribution,
    capacity,
    capacity_full_power,
    capacity_infinite_dacs,
    csir_only_siso_capacity,
    dac_loss_siso,
    feedback_bits,
    mi_bruteforce,
    miso_capacity,
    phase_threshold_rate,
    power_loss_bounds,
    siso_capacity,
)
from .channel import ComplexChannel, RealChannel, binary_entropy, q_function, realify, subset_entropy  # noqa: E402
from .constellation import Constellation, RotationalSubset, enumerate_constellation, orbit_of  # noqa: E402
from .simulate import SweepConfig, ergodic_sweep, sample_channel  # noqa: E402
from .training import TrainingSweepConfig, dominant_training, ergodic_training_sweep, full_training  # noqa: E402
