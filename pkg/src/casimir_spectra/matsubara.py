"""Imaginary-frequency (Matsubara) Lifshitz pressure, used as an independent oracle.

    F(l, T) = -(k_B T / pi) sum'_n int k dk q_n sum_s X_s(i xi_n, k),
    F(l, 0) = -(hbar / 2 pi^2) int_0^inf d xi int k dk q sum_s X_s(i xi, k),

with ``xi_n = 2 pi n k_B T / hbar`` and the ``n = 0`` term halved. On the
imaginary axis every quantity is real, so this module works in real
arithmetic throughout. The ``k`` integral is done in ``q`` (``k dk = q dq``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lifshitz import Gap, _decades
from .materials import CONSTANTS, Material, Model
from .quadrature import QuadratureResult, QuadratureSpec, integrate_semi_infinite

HBAR = CONSTANTS.hbar
C = CONSTANTS.c
K_B = CONSTANTS.k_B

DEFAULT_QSPEC = QuadratureSpec(rel_tol=1e-10)


@dataclass(frozen=True)
class MatsubaraSpec:
    n_max: int = 2000
    tail_rel_tol: float = 1e-9

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if not self.tail_rel_tol > 0:
            raise ValueError("tail_rel_tol must be positive")


def _x_factor(r, one_minus_r2, q, l):
    """``r^2 e^{-2lq} / (1 - r^2 e^{-2lq})`` with ``1 - r^2`` supplied factored."""
    z = -2.0 * l * q
    with np.errstate(under="ignore"):
        return r * r * np.exp(z) / (one_minus_r2 - r * r * np.expm1(z))


def _xi_integrand(xi: float, material: Material, l: float, ideal: bool):
    """Returns ``q -> q^2 [X_TM + X_TE]`` at imaginary frequency ``xi`` (may be 0)."""
    if ideal:
        def f_ideal(q):
            with np.errstate(over="ignore"):
                return q * q / np.expm1(2.0 * l * q)
        return f_ideal, f_ideal

    if material.is_vacuum:
        zero = lambda q: np.zeros_like(q)  # noqa: E731
        return zero, zero

    wp = material.plasma_frequency
    nu = material.damping
    if xi == 0.0:
        # xi -> 0 limits: r_TM -> 1 for both models; kappa^2 = (eps - 1) xi^2/c^2
        # tends to 0 (Drude) or wp^2/c^2 (plasma).
        kappa2 = (wp / C) ** 2 if material.model is Model.PLASMA else 0.0

        def tm(q):
            with np.errstate(over="ignore"):
                return q * q / np.expm1(2.0 * l * q)
    else:
        kappa2 = wp * wp * xi / (C * C * (xi + nu))
        eps = 1.0 + wp * wp / (xi * (xi + nu))

        def tm(q):
            k = np.sqrt(q * q + kappa2)
            s = eps * q + k
            r = (eps * q - k) / s
            return q * q * _x_factor(r, 4.0 * eps * q * k / (s * s), q, l)

    def te(q):
        if kappa2 == 0.0:
            return np.zeros_like(q)
        k = np.sqrt(q * q + kappa2)
        s = q + k
        r = -kappa2 / (s * s)
        return q * q * _x_factor(r, 4.0 * q * k / (s * s), q, l)

    return tm, te


def _check_sign(values):
    # eps(i xi) > 1 makes every r real and X >= 0; anything else is a bug.
    if np.any(values < 0):
        raise ArithmeticError("negative Matsubara integrand; reflection coefficients are broken")
    return values


def matsubara_term(xi: float, gap: Gap, material: Material,
                   qspec: QuadratureSpec = DEFAULT_QSPEC, ideal: bool = False,
                   polarizations=("TM", "TE")) -> QuadratureResult:
    """``int_{xi/c}^inf q^2 dq sum_s X_s`` at imaginary frequency ``xi``."""
    l = gap.separation
    tm, te = _xi_integrand(xi, material, l, ideal)
    parts = {"TM": tm, "TE": te}
    chosen = [parts[p] for p in polarizations]

    def f(q):
        return _check_sign(sum(g(q) for g in chosen))

    return integrate_semi_infinite(f, xi / C, qspec, 0.5 / l)


def pressure_matsubara(gap: Gap, material: Material,
                       mspec: MatsubaraSpec = MatsubaraSpec(),
                       qspec: QuadratureSpec = DEFAULT_QSPEC,
                       ideal: bool = False) -> QuadratureResult:
    """Finite-temperature Lifshitz pressure in Pa.

    ``ideal=True`` forces ``r_TM = 1, r_TE = -1`` (perfect conductor).
    The sum stops once a term drops below ``tail_rel_tol`` of the partial
    sum; the remaining tail is extrapolated geometrically and counted in the
    error estimate. Hitting ``n_max`` first gives ``converged=False``.
    """
    T = gap.temperature
    step = 2.0 * math.pi * K_B * T / HBAR
    first = matsubara_term(0.0, gap, material, qspec, ideal)
    total = 0.5 * first.value
    err = 0.5 * first.error_estimate
    evaluations = first.evaluations
    converged = first.converged
    prev = None
    done = False
    for n in range(1, mspec.n_max + 1):
        r = matsubara_term(n * step, gap, material, qspec, ideal)
        total += r.value
        err += r.error_estimate
        evaluations += r.evaluations
        converged = converged and r.converged
        if r.value == 0.0 and total == 0.0:
            done = True
            break
        if prev is not None and abs(r.value) < mspec.tail_rel_tol * abs(total):
            ratio = r.value / prev if prev else 0.0
            if 0.0 <= ratio < 1.0:
                tail = r.value * ratio / (1.0 - ratio)
                total += tail
                err += abs(tail)
            done = True
            break
        prev = r.value
    factor = -K_B * T / math.pi
    return QuadratureResult(total * factor, err * abs(factor), evaluations,
                            converged and done)


def pressure_zero_temperature(gap: Gap, material: Material,
                              qspec: QuadratureSpec = DEFAULT_QSPEC,
                              ideal: bool = False) -> QuadratureResult:
    """Zero-temperature Lifshitz pressure in Pa (continuous ``xi`` integral)."""
    l = gap.separation
    inner = qspec.with_(rel_tol=qspec.rel_tol / 10)
    evaluations = 0
    converged = True

    def f(xis):
        nonlocal evaluations, converged
        out = np.empty_like(xis)
        for i, xi in enumerate(xis):
            r = matsubara_term(xi, gap, material, inner, ideal)
            evaluations += r.evaluations
            converged = converged and r.converged
            out[i] = r.value
        return out

    scale = C / (2.0 * l)
    res = integrate_semi_infinite(f, 0.0, qspec, scale, _decades(scale * 1e-10, scale))
    factor = -HBAR / (2.0 * math.pi ** 2)
    return QuadratureResult(res.value * factor, res.error_estimate * abs(factor),
                            res.evaluations + evaluations, res.converged and converged)


def thermal_correction_oracle(gap: Gap, material: Material,
                              mspec: MatsubaraSpec = MatsubaraSpec(),
                              qspec: QuadratureSpec = DEFAULT_QSPEC) -> QuadratureResult:
    """``F(l, T) - F(l, 0)`` in Pa."""
    hot = pressure_matsubara(gap, material, mspec, qspec)
    cold = pressure_zero_temperature(gap, material, qspec)
    return hot + cold.scaled(-1.0)
