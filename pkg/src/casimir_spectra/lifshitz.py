"""Thermal correction to the Casimir pressure from real-frequency Lifshitz theory.

The pressure between two identical half-spaces is

    F(l, T) = -(hbar/pi^2) int k dk int d omega n(omega) Im{ q sum_s X_s },
    X_s = [r_s^-2 exp(2 l q) - 1]^-1 = r_s^2 e^{-2lq} / (1 - r_s^2 e^{-2lq}),

with the Bose occupation ``n``. The second form of ``X_s`` is what gets
evaluated: it never overflows, and ``1 - r^2`` is taken in factored form.

Each (polarization, sector) channel is integrated with ``k_perp`` outside.
Evanescent channels use the reduced frequency ``u`` inside; propagating
channels integrate over ``k_z`` because ``exp(2 i l k_z)`` has a fixed period
there. ``te_evanescent_dimensionless`` is the same TE-evanescent quantity
with the order of integration swapped and written in reduced variables; the
two are used to check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .kernel import (
    Polarization,
    Sector,
    medium_momentum_from,
    momentum_from_sq,
    one_minus_r_sq,
    reduced_frequency_unit,
    reduced_te_terms,
    reflection,
    vacuum_momentum_sq,
)
from .materials import CONSTANTS, Material, Model, susceptibility
from .quadrature import (
    DEFAULT_OUTER,
    QuadratureResult,
    QuadratureSpec,
    integrate_finite,
    integrate_oscillatory,
    integrate_semi_infinite,
)

HBAR = CONSTANTS.hbar
C = CONSTANTS.c
K_B = CONSTANTS.k_B
PREFACTOR = -HBAR / math.pi ** 2


@dataclass(frozen=True)
class Gap:
    separation: float
    temperature: float = 300.0

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError(f"separation must be positive, got {self.separation}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")


@dataclass(frozen=True)
class Channel:
    polarization: Polarization
    sector: Sector

    def __str__(self):
        return f"{self.polarization.value}-{self.sector.value}"


CHANNELS = tuple(Channel(p, s) for p in (Polarization.TM, Polarization.TE)
                 for s in (Sector.PROPAGATING, Sector.EVANESCENT))
TE_EVANESCENT = Channel(Polarization.TE, Sector.EVANESCENT)


@dataclass(frozen=True)
class PressureBreakdown:
    channels: Dict[Channel, QuadratureResult] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return math.fsum(r.value for r in self.channels.values())

    @property
    def error_estimate(self) -> float:
        return math.fsum(r.error_estimate for r in self.channels.values())

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.channels.values())

    def share(self, channel: Channel) -> float:
        """Signed ratio channel / total."""
        return self.channels[channel].value / self.total

    def magnitude_share(self, channel: Channel) -> float:
        mags = [abs(r.value) for r in self.channels.values()]
        return abs(self.channels[channel].value) / math.fsum(mags)


def bose(x):
    """Occupation ``1/(e^x - 1)``; exact to rounding for tiny ``x``, zero past overflow."""
    with np.errstate(over="ignore"):
        return (1.0 / np.expm1(np.asarray(x, dtype=float)))[()]


def bose_factor(omega, temperature: float):
    omega = np.asarray(omega, dtype=float)
    if not np.all(omega > 0) or not temperature > 0:
        raise ValueError("bose_factor needs omega > 0 and T > 0")
    return bose(HBAR * omega / (K_B * temperature))


def _expm1c(z):
    """``exp(z) - 1`` for complex ``z`` without cancellation at small ``|z|``."""
    x = np.real(z)
    y = np.imag(z)
    s = np.sin(0.5 * y)
    return np.expm1(x) * np.cos(y) - 2.0 * s * s + 1j * np.exp(x) * np.sin(y)


def round_trip(q, k, eps, pol: Polarization, separation: float, dk2=None):
    """``X = r^2 e^{-2lq} / (1 - r^2 e^{-2lq})`` evaluated stably; ``dk2`` as in ``reflection``."""
    r = reflection(q, k, eps, pol, dk2)
    r2 = r * r
    z = -2.0 * separation * q
    with np.errstate(under="ignore"):
        den = one_minus_r_sq(q, k, eps, pol) - r2 * _expm1c(z)
        return r2 * np.exp(z) / den


def te_evanescent_kernel(u, v, material: Material, separation: float):
    """``Im[1 - e^{2v}/r_TE(u, v)^2]^-1`` from the reduced TE coefficient."""
    v, w, d = reduced_te_terms(u, v, material, separation)
    s = v + w
    r = -d / (s * s)
    r2 = r * r
    with np.errstate(under="ignore"):
        den = 4.0 * v * w / (s * s) - r2 * np.expm1(-2.0 * v)
        x = r2 * np.exp(-2.0 * v) / den
    return -np.imag(x)


def _decades(lo: float, hi: float):
    """Powers of ten strictly inside ``(lo, hi)``."""
    if not (lo > 0 and hi > lo):
        return []
    k0 = math.floor(math.log10(lo)) + 1
    k1 = math.ceil(math.log10(hi)) - 1
    return [10.0 ** k for k in range(k0, k1 + 1) if lo < 10.0 ** k < hi]


def _inner_spec(spec: QuadratureSpec) -> QuadratureSpec:
    return spec.with_(rel_tol=spec.rel_tol / 10)


class _Tally:
    """Accumulates inner-integration bookkeeping for an outer integrand."""

    def __init__(self):
        self.evaluations = 0
        self.converged = True

    def add(self, r: QuadratureResult) -> float:
        self.evaluations += r.evaluations
        self.converged = self.converged and r.converged
        return r.value

    def finish(self, outer: QuadratureResult, factor: float) -> QuadratureResult:
        res = outer.scaled(factor)
        return QuadratureResult(res.value, res.error_estimate,
                                res.evaluations + self.evaluations,
                                res.converged and self.converged)


def _frequency_unit(gap: Gap, material: Material) -> float:
    if material.damping > 0:
        return reduced_frequency_unit(material, gap.separation)
    return K_B * gap.temperature / HBAR


def _evanescent_inner(kp: float, gap: Gap, material: Material, pol: Polarization,
                      unit: float, spec: QuadratureSpec) -> QuadratureResult:
    """``int_0^{c k_perp} d omega n(omega) Im{q X}``, integrated in ``omega / unit``."""
    l, T = gap.separation, gap.temperature
    u_max = C * kp / unit

    def f(u):
        omega = unit * u
        q2 = vacuum_momentum_sq(omega, kp)
        q = np.sqrt(np.maximum(q2, 0.0)) + 0j
        chi = susceptibility(material, omega)
        k = medium_momentum_from(q2, omega, chi)
        x = round_trip(q, k, 1.0 + chi, pol, l, chi * (omega / C) ** 2)
        return bose_factor(omega, T) * np.imag(q * x)

    points = _decades(u_max * 1e-12, u_max)
    return integrate_finite(f, 0.0, u_max, spec, points).scaled(unit)


def _propagating_inner(kp: float, gap: Gap, material: Material, pol: Polarization,
                       spec: QuadratureSpec) -> QuadratureResult:
    """Same integral over ``omega > c k_perp``, integrated in ``k_z``."""
    l, T = gap.separation, gap.temperature

    def f(kz):
        omega = C * np.hypot(kp, kz)
        q = -1j * kz
        chi = susceptibility(material, omega)
        k = medium_momentum_from(-kz * kz, omega, chi)
        x = round_trip(q, k, 1.0 + chi, pol, l, chi * (omega / C) ** 2)
        return (C * C * kz / omega) * bose_factor(omega, T) * np.imag(q * x)

    return integrate_oscillatory(f, 0.0, math.inf, math.pi / l, spec)


def thermal_pressure_channel(gap: Gap, material: Material, channel: Channel,
                             spec: QuadratureSpec = DEFAULT_OUTER) -> QuadratureResult:
    """One (polarization, sector) part of the thermal pressure, in Pa.

    ``spec`` governs the outer ``k_perp`` integral; inner integrals run ten
    times tighter. With the plasma model the real-axis integrand has poles
    (lossless guided and surface modes) that this evaluation does not pick
    up; only lossy materials are meaningful here.
    """
    if material.is_vacuum:
        return QuadratureResult(0.0, 0.0, 0, True)
    inner = _inner_spec(spec)
    tally = _Tally()
    pol = channel.polarization
    l, T = gap.separation, gap.temperature

    if channel.sector is Sector.EVANESCENT:
        unit = _frequency_unit(gap, material)

        def outer(kps):
            return np.array([kp * tally.add(_evanescent_inner(kp, gap, material, pol, unit, inner))
                             for kp in kps])

        scale = 0.5 / l
    else:
        def outer(kps):
            return np.array([kp * tally.add(_propagating_inner(kp, gap, material, pol, inner))
                             for kp in kps])

        scale = min(0.5 / l, K_B * T / (HBAR * C))

    res = integrate_semi_infinite(outer, 0.0, spec, scale)
    return tally.finish(res, PREFACTOR)


def thermal_pressure_total(gap: Gap, material: Material,
                           spec: QuadratureSpec = DEFAULT_OUTER) -> PressureBreakdown:
    return PressureBreakdown({ch: thermal_pressure_channel(gap, material, ch, spec)
                              for ch in CHANNELS})


def thermal_pressure_direct(gap: Gap, material: Material, pol: Polarization,
                            spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-5)) -> QuadratureResult:
    """Both sectors of one polarization in a single ``omega`` integral (no sector split).

    Slower and less careful than the channel evaluators; used only to check
    that the channels add up.
    """
    if material.is_vacuum:
        return QuadratureResult(0.0, 0.0, 0, True)
    l, T = gap.separation, gap.temperature
    inner = _inner_spec(spec)
    tally = _Tally()
    w_T = K_B * T / HBAR

    def inner_integral(kp):
        def f(omega):
            q2 = vacuum_momentum_sq(omega, kp)
            q = momentum_from_sq(q2)
            chi = susceptibility(material, omega)
            k = medium_momentum_from(q2, omega, chi)
            x = round_trip(q, k, 1.0 + chi, pol, l, chi * (omega / C) ** 2)
            return bose_factor(omega, T) * np.imag(q * x)

        w_cone = C * kp
        points = [w_cone] + _decades(w_cone * 1e-12, w_cone)
        return integrate_semi_infinite(f, 0.0, inner, w_T, points)

    def outer(kps):
        return np.array([kp * tally.add(inner_integral(kp)) for kp in kps])

    res = integrate_semi_infinite(outer, 0.0, spec, 0.5 / l)
    return tally.finish(res, PREFACTOR)


def bose_argument_scale(gap: Gap, material: Material) -> float:
    """``a = (hbar nu / k_B T) c^2 / (wp^2 l^2)``: the Bose exponent per unit ``u``."""
    return HBAR * reduced_frequency_unit(material, gap.separation) / (K_B * gap.temperature)


def te_evanescent_prefactor(gap: Gap, material: Material) -> float:
    """``hbar nu c^2 / (pi^2 wp^2 l^5)``, in Pa."""
    l = gap.separation
    return HBAR * material.damping * C ** 2 / (math.pi ** 2 * material.plasma_frequency ** 2 * l ** 5)


def _require_drude(material: Material):
    if material.model is not Model.DRUDE or not material.relaxation > 0:
        raise ValueError("the reduced TE-evanescent form needs a Drude material with nu > 0")


def spectral_g(v: float, gap: Gap, material: Material,
               spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-8)) -> QuadratureResult:
    """``g(v) = int_0^inf du n(a u) Im[1 - e^{2v}/r_TE^2]^-1``."""
    _require_drude(material)
    a = bose_argument_scale(gap, material)
    l = gap.separation

    def f(u):
        return bose(a * u) * te_evanescent_kernel(u, v, material, l)

    lo = 1e-6 * min(v * v, 1.0) if v > 0 else 1e-12
    points = _decades(lo, 100.0 / a)
    return integrate_semi_infinite(f, 0.0, spec, 1.0 / a, points)


def frequency_density_v_integral(u: float, gap: Gap, material: Material,
                                 spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-8)) -> QuadratureResult:
    """``h(u) = int_0^inf dv v^2 Im[1 - e^{2v}/r_TE^2]^-1`` (no Bose weight)."""
    _require_drude(material)
    l = gap.separation

    def f(v):
        return v * v * te_evanescent_kernel(u, v, material, l)

    points = _decades(1e-3 * min(math.sqrt(u), 1.0), 10.0)
    return integrate_semi_infinite(f, 0.0, spec, 0.5, points)


def te_evanescent_dimensionless(gap: Gap, material: Material,
                                spec: QuadratureSpec = DEFAULT_OUTER) -> QuadratureResult:
    """TE-evanescent thermal pressure as ``prefactor * int dv v^2 g(v)``, in Pa."""
    _require_drude(material)
    inner = _inner_spec(spec)
    tally = _Tally()

    def outer(vs):
        return np.array([v * v * tally.add(spectral_g(v, gap, material, inner)) for v in vs])

    res = integrate_semi_infinite(outer, 0.0, spec, 1.0, points=[0.1, 1.0, 3.0])
    return tally.finish(res, te_evanescent_prefactor(gap, material))
