"""Physical constants and dielectric models of the plate material."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    c: float
    hbar: float
    k_B: float
    e: float


# CODATA 2018; all four are exact in the 2019 SI.
CONSTANTS = PhysicalConstants(
    c=299792458.0,
    hbar=6.62607015e-34 / (2 * math.pi),
    k_B=1.380649e-23,
    e=1.602176634e-19,
)


class Model(enum.Enum):
    DRUDE = "drude"
    PLASMA = "plasma"
    VACUUM = "vacuum"


@dataclass(frozen=True)
class Material:
    """Half-space material.

    ``plasma_frequency`` and ``relaxation`` are angular frequencies in rad/s.
    ``relaxation`` is ignored by the plasma model; the vacuum model has
    ``eps == 1`` everywhere and exists so that "no interface" runs go through
    the same code paths.
    """

    model: Model
    plasma_frequency: float = 0.0
    relaxation: float = 0.0

    def __post_init__(self):
        if self.model is Model.VACUUM:
            return
        if not self.plasma_frequency > 0:
            raise ValueError(f"plasma frequency must be positive, got {self.plasma_frequency}")
        if not self.relaxation >= 0:
            raise ValueError(f"relaxation must be non-negative, got {self.relaxation}")

    @classmethod
    def drude(cls, plasma_frequency: float, relaxation: float) -> "Material":
        return cls(Model.DRUDE, plasma_frequency, relaxation)

    @classmethod
    def plasma(cls, plasma_frequency: float) -> "Material":
        return cls(Model.PLASMA, plasma_frequency, 0.0)

    @property
    def damping(self) -> float:
        """Relaxation rate actually entering the permittivity."""
        return self.relaxation if self.model is Model.DRUDE else 0.0

    @property
    def is_vacuum(self) -> bool:
        return self.model is Model.VACUUM


VACUUM = Material(Model.VACUUM)


def ev_to_angular_frequency(energy_ev: float) -> float:
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    if not energy_ev > 0:
        raise ValueError(f"energy must be positive, got {energy_ev}")
    return energy_ev * CONSTANTS.e / CONSTANTS.hbar


def _check_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise ValueError(f"{name} must be > 0")
    return arr


def susceptibility(material: Material, omega):
    """``eps(omega) - 1`` on the real axis; avoids cancellation when |eps| is large."""
    omega = _check_positive(omega, "omega")
    if material.is_vacuum:
        return np.zeros_like(omega, dtype=complex)[()]
    wp2 = material.plasma_frequency ** 2
    return (-wp2 / (omega * (omega + 1j * material.damping)))[()]


def permittivity(material: Material, omega):
    """Complex permittivity ``eps(omega)`` for real ``omega > 0``.

    Drude: ``1 - wp^2 / (omega (omega + i nu))``; the plasma model is the same
    expression with ``nu = 0`` so the two agree bit for bit in that limit.
    """
    return 1.0 + susceptibility(material, omega)


def permittivity_imag_axis(material: Material, xi):
    """Real permittivity ``eps(i xi)`` at imaginary frequency ``xi > 0``."""
    xi = _check_positive(xi, "xi")
    if material.is_vacuum:
        return np.ones_like(xi)[()]
    return (1.0 + material.plasma_frequency ** 2 / (xi * (xi + material.damping)))[()]
