"""Momenta, Fresnel coefficients and sector classification on the real axis.

Branch conventions (normative for the whole package):

* vacuum ``q = sqrt(k_perp^2 - omega^2/c^2)``: real and positive for
  evanescent waves; ``q = -i k_z`` with ``k_z > 0`` for propagating ones, so
  ``exp(-2 l q) = exp(2 i l k_z)`` has unit modulus;
* medium ``k = sqrt(k_perp^2 - eps omega^2/c^2)``: ``Re k >= 0``, and
  ``Im k <= 0`` on the cut ``Re k == 0``.

Square roots are taken as principal values and then moved onto these
half-planes explicitly.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

import numpy as np

from .materials import CONSTANTS, Material, susceptibility


class Polarization(enum.Enum):
    TM = "TM"
    TE = "TE"


class Sector(enum.Enum):
    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"


class WavePoint(NamedTuple):
    omega: float
    k_perp: float


def _decaying_sqrt(z):
    """Square root with ``Re >= 0`` and, on the cut, ``Im <= 0``."""
    r = np.sqrt(np.asarray(z, dtype=complex))
    r = np.where(r.real < 0, -r, r)
    return np.where(r.real == 0, -1j * np.abs(r.imag), r)


def _validate(omega, k_perp):
    omega = np.asarray(omega, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    if not np.all(omega > 0):
        raise ValueError("omega must be > 0")
    if not np.all(k_perp >= 0):
        raise ValueError("k_perp must be >= 0")
    return omega, k_perp


def vacuum_momentum_sq(omega, k_perp):
    """``q^2 = k_perp^2 - omega^2/c^2``, factored to stay accurate near the light cone."""
    k0 = np.asarray(omega, dtype=float) / CONSTANTS.c
    k_perp = np.asarray(k_perp, dtype=float)
    return (k_perp - k0) * (k_perp + k0)


def momentum_from_sq(q2):
    """Vacuum ``q`` from a real ``q^2`` with the package branch convention."""
    q2 = np.asarray(q2, dtype=float)
    root = np.sqrt(np.abs(q2))
    return np.where(q2 >= 0, root + 0j, -1j * root)


def vacuum_momentum_q(omega, k_perp):
    omega, k_perp = _validate(omega, k_perp)
    return momentum_from_sq(vacuum_momentum_sq(omega, k_perp))[()]


def medium_momentum_from(q2, omega, chi):
    """Medium ``k`` given vacuum ``q^2`` and ``chi = eps - 1``: ``k^2 = q^2 - chi omega^2/c^2``."""
    k0 = np.asarray(omega, dtype=float) / CONSTANTS.c
    return _decaying_sqrt(q2 - chi * k0 * k0)


def medium_momentum_k(omega, k_perp, eps):
    omega, k_perp = _validate(omega, k_perp)
    chi = np.asarray(eps, dtype=complex) - 1.0
    return medium_momentum_from(vacuum_momentum_sq(omega, k_perp), omega, chi)[()]


def reflection(q, k, eps, pol: Polarization, dk2=None):
    """Fresnel coefficient from precomputed momenta.

    ``dk2 = q^2 - k^2 = (eps - 1) omega^2 / c^2``, when given, is used for the
    TE numerator, ``q - k = dk2 / (q + k)``, which otherwise cancels when
    ``|r_TE| << 1`` (low frequencies in a Drude metal).
    """
    if pol is Polarization.TM:
        return (eps * q - k) / (eps * q + k)
    s = q + k
    if dk2 is not None:
        return dk2 / (s * s)
    return (q - k) / s


def one_minus_r_sq(q, k, eps, pol: Polarization):
    """``1 - r^2`` in factored form, free of cancellation when ``r -> +-1``."""
    if pol is Polarization.TM:
        s = eps * q + k
        return 4.0 * eps * q * k / (s * s)
    s = q + k
    return 4.0 * q * k / (s * s)


def fresnel(omega, k_perp, eps, pol: Polarization):
    """Reflection coefficient ``r_TM = (eps q - k)/(eps q + k)`` or ``r_TE = (q - k)/(q + k)``."""
    omega, k_perp = _validate(omega, k_perp)
    eps = np.asarray(eps, dtype=complex)
    q2 = vacuum_momentum_sq(omega, k_perp)
    q = momentum_from_sq(q2)
    k = medium_momentum_from(q2, omega, eps - 1.0)
    den = eps * q + k if pol is Polarization.TM else q + k
    if np.any(den == 0):
        raise ArithmeticError("Fresnel coefficient pole on the real axis")
    k0 = omega / CONSTANTS.c
    return reflection(q, k, eps, pol, (eps - 1.0) * k0 * k0)[()]


def fresnel_material(omega, k_perp, material: Material, pol: Polarization):
    """``fresnel`` with ``eps`` taken from ``material``; ``eps - 1`` is used unrounded."""
    omega, k_perp = _validate(omega, k_perp)
    chi = susceptibility(material, omega)
    q2 = vacuum_momentum_sq(omega, k_perp)
    q = momentum_from_sq(q2)
    k = medium_momentum_from(q2, omega, chi)
    k0 = omega / CONSTANTS.c
    return reflection(q, k, 1.0 + chi, pol, chi * k0 * k0)[()]


def reduced_te_terms(u, v, material: Material, separation: float):
    """``(v, w, d)`` with ``d = w^2 - v^2 = wp^2 l^2 u / (i wp^2 l^2 + c^2 u)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.all(u > 0):
        raise ValueError("u must be > 0")
    if not np.all(v >= 0):
        raise ValueError("v must be >= 0")
    if material.is_vacuum:
        raise ValueError("reduced variables need a plasma frequency")
    wpl2 = (material.plasma_frequency * separation) ** 2
    d = wpl2 * u / (1j * wpl2 + CONSTANTS.c ** 2 * u)
    return v, _decaying_sqrt(v * v + d), d


def dimensionless_te_w(u, v, material: Material, separation: float):
    """``w = l k`` in the reduced variables ``u`` (frequency) and ``v = l q``."""
    return reduced_te_terms(u, v, material, separation)[1]


def fresnel_te_dimensionless(u, v, material: Material, separation: float):
    """TE coefficient ``(v - w)/(v + w) = -d / (v + w)^2``, ``w^2 = v^2 + d``."""
    v, w, d = reduced_te_terms(u, v, material, separation)
    s = v + w
    return (-d / (s * s))[()]


def reduced_frequency_unit(material: Material, separation: float) -> float:
    """``omega`` per unit ``u``: ``omega = nu c^2 u / (wp^2 l^2)``."""
    if material.damping <= 0:
        raise ValueError("the reduced frequency u needs a Drude material with nu > 0")
    return material.damping * CONSTANTS.c ** 2 / (material.plasma_frequency * separation) ** 2


def reduced_to_dimensional(u, v, material: Material, separation: float):
    """Map ``(u, v)`` back to ``(omega, k_perp)`` on the evanescent side."""
    omega = np.asarray(u, dtype=float) * reduced_frequency_unit(material, separation)
    q = np.asarray(v, dtype=float) / separation
    k_perp = np.hypot(q, omega / CONSTANTS.c)
    return omega, k_perp


def classify(omega: float, k_perp: float) -> Sector:
    """Sector of a single wave point; the light cone itself counts as evanescent."""
    _validate(omega, k_perp)
    if vacuum_momentum_sq(omega, k_perp) >= 0:
        return Sector.EVANESCENT
    return Sector.PROPAGATING
