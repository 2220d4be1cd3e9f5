"""Physical constants and collapse-model parameters.

All quantities are SI. The reference mass ``m0`` defaults to the atomic
mass unit; it is configurable because different conventions pick the
proton or the average nucleon mass instead.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used across the pipeline (SI units)."""

    hbar: float = 1.054571817e-34          # J s
    k_boltzmann: float = 1.380649e-23      # J/K
    m0: float = 1.66053906660e-27          # kg, reference nucleon mass

    def __post_init__(self):
        if self.hbar <= 0 or self.k_boltzmann <= 0 or self.m0 <= 0:
            raise ValueError("physical constants must be strictly positive")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class CslParams:
    """Collapse-model parameters.

    collapse_rate      lambda, s^-1
    correlation_length r_C, m
    colored_cutoff     optional noise-spectrum cutoff Omega_C, rad/s; None
                       selects the white (flat) noise model
    """

    collapse_rate: float
    correlation_length: float
    colored_cutoff: float | None = None

    def __post_init__(self):
        if self.collapse_rate < 0:
            raise ValueError("collapse rate must be non-negative")
        if self.correlation_length <= 0:
            raise ValueError("correlation length must be positive")
        if self.colored_cutoff is not None and self.colored_cutoff <= 0:
            raise ValueError("colored-noise cutoff must be positive")
