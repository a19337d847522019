"""Relay-side detection for the multiple-access phase of a two-way relay channel
with a two-antenna relay: MIMO NC vs MIMO PNC, plus Monte Carlo BER tools."""

__version__ = "0.1.0"

from .channel import ChannelMatrix, modulate, sample_channel, transmit, xor_symbol
from .detectors import DetectorKind, EqualizedObservation, ThresholdMode, detect
from .simulator import BerPoint, SweepConfig, estimate_ber, sweep

__all__ = [
    "BerPoint",
    "ChannelMatrix",
    "DetectorKind",
    "EqualizedObservation",
    "SweepConfig",
    "ThresholdMode",
    "detect",
    "estimate_ber",
    "modulate",
    "sample_channel",
    "sweep",
    "transmit",
    "xor_symbol",
]
