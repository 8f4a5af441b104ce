"""Spectral make-up of the TE-evanescent thermal correction and the size argument.

Densities are tabulated on log-spaced grids. Cumulative fractions use the
trapezoid rule in ``ln x`` (i.e. on ``x * density``), which is what a
log-spaced grid integrates well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Sequence

import numpy as np

from ._parallel import ordered_map
from .kernel import reduced_frequency_unit
from .lifshitz import (
    PREFACTOR,
    TE_EVANESCENT,
    Gap,
    _evanescent_inner,
    _frequency_unit,
    _inner_spec,
    _require_drude,
    bose,
    bose_argument_scale,
    frequency_density_v_integral,
    spectral_g,
    te_evanescent_prefactor,
)
from .materials import CONSTANTS, Material
from .quadrature import (
    DEFAULT_OUTER,
    QuadratureSpec,
    integrate_finite,
    integrate_semi_infinite,
)

C = CONSTANTS.c
VARIABLES = ("v", "u", "omega", "k_perp")


class SpectrumSignError(ArithmeticError):
    """The tabulated density changes sign, so cumulative fractions are meaningless."""


@dataclass
class SpectrumTable:
    variable: str
    x: np.ndarray
    density: np.ndarray
    cumulative: np.ndarray
    normalization: float
    metadata: Dict[str, float] = field(default_factory=dict)
    extra_columns: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def samples(self):
        return list(zip(self.x.tolist(), self.density.tolist()))

    @property
    def trapezoid_total(self) -> float:
        return float(self.metadata["trapezoid_total"])


@dataclass(frozen=True)
class ContributionRange:
    x_lo: float
    x_hi: float
    fraction: float
    method: str = "equal-tail"


def _cumulative(x, density):
    x = np.asarray(x, dtype=float)
    density = np.asarray(density, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    nonzero = density[density != 0]
    if nonzero.size and not (np.all(nonzero > 0) or np.all(nonzero < 0)):
        raise SpectrumSignError("spectral density changes sign on the grid")
    y = x * density
    steps = 0.5 * (y[1:] + y[:-1]) * np.diff(np.log(x))
    running = np.concatenate([[0.0], np.cumsum(steps)])
    total = running[-1]
    if total == 0:
        raise SpectrumSignError("spectral density vanishes on the whole grid")
    return running / total, float(total)


def _make_table(variable, x, density, normalization, metadata=None, extra=None):
    cumulative, total = _cumulative(x, density)
    meta = dict(metadata or {})
    meta["trapezoid_total"] = total
    return SpectrumTable(variable, np.asarray(x, dtype=float), np.asarray(density, dtype=float),
                         cumulative, normalization, meta, dict(extra or {}))


def _refined(grid: np.ndarray) -> np.ndarray:
    mids = np.sqrt(grid[1:] * grid[:-1])
    out = np.empty(2 * len(grid) - 1)
    out[0::2] = grid
    out[1::2] = mids
    return out


def _tabulate_refining(density_fn, grid, refine: bool, max_refinements: int = 4,
                       fraction: float = 0.9, tolerance: float = 0.01):
    """Evaluate ``density_fn`` on ``grid``; if ``refine``, halve the log spacing
    until the equal-tail ``fraction`` endpoints move by less than ``tolerance``."""
    grid = np.asarray(grid, dtype=float)
    values = np.array(ordered_map(density_fn, grid))
    if not refine:
        return grid, values
    prev = contribution_range(_make_table("x", grid, values, 1.0), fraction)
    for _ in range(max_refinements):
        fine = _refined(grid)
        new_vals = np.empty(len(fine))
        new_vals[0::2] = values
        new_vals[1::2] = ordered_map(density_fn, fine[1::2])
        grid, values = fine, new_vals
        cur = contribution_range(_make_table("x", grid, values, 1.0), fraction)
        moved = max(abs(cur.x_lo / prev.x_lo - 1), abs(cur.x_hi / prev.x_hi - 1))
        prev = cur
        if moved < tolerance:
            break
    return grid, values


def default_v_grid(n: int = 200) -> np.ndarray:
    return np.geomspace(1e-3, 20.0, n)


def default_u_grid(gap: Gap, material: Material, n: int = 200) -> np.ndarray:
    a = bose_argument_scale(gap, material)
    return np.geomspace(1e-4, 1e3 / a, n)


def wavevector_spectrum(gap: Gap, material: Material,
                        v_grid: Optional[Sequence[float]] = None,
                        spec: QuadratureSpec = DEFAULT_OUTER,
                        refine: bool = True) -> SpectrumTable:
    """Density ``v^2 g(v)`` of the reduced TE-evanescent integral over ``v = l q``."""
    _require_drude(material)
    inner = _inner_spec(spec)
    grid = default_v_grid() if v_grid is None else np.asarray(v_grid, dtype=float)

    def density(v):
        return v * v * spectral_g(v, gap, material, inner).value

    grid, values = _tabulate_refining(density, grid, refine)
    norm = integrate_semi_infinite(
        lambda vs: np.array([density(v) for v in vs]), 0.0, spec, 1.0, [0.1, 1.0, 3.0])
    meta = {
        "separation_m": gap.separation,
        "temperature_K": gap.temperature,
        "pressure_prefactor_Pa": te_evanescent_prefactor(gap, material),
        "bose_scale_a": bose_argument_scale(gap, material),
    }
    return _make_table("v", grid, values, norm.value, meta)


def frequency_spectrum(gap: Gap, material: Material,
                       u_grid: Optional[Sequence[float]] = None,
                       spec: QuadratureSpec = DEFAULT_OUTER,
                       variable: str = "u",
                       refine: bool = True) -> SpectrumTable:
    """Frequency density ``n(a u) int dv v^2 Im[1 - e^{2v}/r_TE^2]^-1``.

    With ``variable="omega"`` the same table is returned per unit angular
    frequency; either way the other variable is kept as an extra column.
    """
    _require_drude(material)
    if variable not in ("u", "omega"):
        raise ValueError(f"frequency spectrum variable must be 'u' or 'omega', got {variable!r}")
    inner = _inner_spec(spec)
    a = bose_argument_scale(gap, material)
    unit = reduced_frequency_unit(material, gap.separation)
    grid = default_u_grid(gap, material) if u_grid is None else np.asarray(u_grid, dtype=float)

    def density(u):
        weight = bose(a * u)
        if weight == 0.0:
            return 0.0
        return weight * frequency_density_v_integral(u, gap, material, inner).value

    grid, values = _tabulate_refining(density, grid, refine)
    norm = _frequency_integral(density, a, spec, math.inf)
    meta = {
        "separation_m": gap.separation,
        "temperature_K": gap.temperature,
        "omega_per_u": unit,
        "bose_scale_a": a,
        "pressure_prefactor_Pa": te_evanescent_prefactor(gap, material),
    }
    if variable == "u":
        return _make_table("u", grid, values, norm, meta, {"omega": grid * unit})
    return _make_table("omega", grid * unit, values / unit, norm, meta, {"u": grid})


def _frequency_integral(density, a, spec, upper):
    f = lambda us: np.array([density(u) for u in us])  # noqa: E731
    points = [10.0 ** k for k in range(-4, 4)] + [1.0 / a]
    if math.isinf(upper):
        return integrate_semi_infinite(f, 0.0, spec, 1.0 / a, points).value
    return integrate_finite(f, 0.0, upper, spec, points).value


def fraction_below_frequency(gap: Gap, material: Material, omega: float,
                             spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-6)) -> float:
    """Share of the TE-evanescent thermal correction from frequencies below ``omega``."""
    _require_drude(material)
    inner = _inner_spec(spec)
    a = bose_argument_scale(gap, material)
    u_star = omega / reduced_frequency_unit(material, gap.separation)

    def density(u):
        return bose(a * u) * frequency_density_v_integral(u, gap, material, inner).value

    below = _frequency_integral(density, a, spec, u_star)
    total = below + integrate_semi_infinite(
        lambda us: np.array([density(u) for u in us]), u_star, spec, 1.0 / a).value
    return below / total


def transverse_wavevector_spectrum(gap: Gap, material: Material,
                                   k_grid: Optional[Sequence[float]] = None,
                                   spec: QuadratureSpec = DEFAULT_OUTER,
                                   refine: bool = True) -> SpectrumTable:
    """TE-evanescent pressure per unit ``k_perp`` (Pa m); wavelengths follow as ``2 pi / k_perp``."""
    l = gap.separation
    inner = _inner_spec(spec)
    unit = _frequency_unit(gap, material)
    grid = (np.geomspace(1e-3, 20.0, 200) / l if k_grid is None
            else np.asarray(k_grid, dtype=float))

    def density(kp):
        r = _evanescent_inner(kp, gap, material, TE_EVANESCENT.polarization, unit, inner)
        return PREFACTOR * kp * r.value

    grid, values = _tabulate_refining(density, grid, refine)
    norm = integrate_semi_infinite(lambda ks: np.array([density(k) for k in ks]),
                                   0.0, spec, 0.5 / l).value
    meta = {"separation_m": l, "temperature_K": gap.temperature}
    return _make_table("k_perp", grid, values, norm, meta,
                       {"wavelength": 2 * math.pi / grid})


def quantile(table: SpectrumTable, p) -> np.ndarray:
    """Inverse of the cumulative fraction, linear in ``ln x`` within each grid cell."""
    p = np.asarray(p, dtype=float)
    cum = table.cumulative
    lx = np.log(table.x)
    idx = np.clip(np.searchsorted(cum, p, side="left"), 1, len(cum) - 1)
    c0, c1 = cum[idx - 1], cum[idx]
    span = np.where(c1 > c0, c1 - c0, 1.0)
    t = np.clip((p - c0) / span, 0.0, 1.0)
    return np.exp(lx[idx - 1] + t * (lx[idx] - lx[idx - 1]))[()]


def cumulative_at(table: SpectrumTable, x) -> np.ndarray:
    return np.interp(np.log(x), np.log(table.x), table.cumulative)[()]


def _check_fraction(fraction):
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")


def contribution_range(table: SpectrumTable, fraction: float) -> ContributionRange:
    """Equal-tail interval holding ``fraction`` of the integral."""
    _check_fraction(fraction)
    lo, hi = quantile(table, [(1 - fraction) / 2, (1 + fraction) / 2])
    return ContributionRange(float(lo), float(hi), fraction, "equal-tail")


def minimal_width_range(table: SpectrumTable, fraction: float,
                        samples: int = 20001) -> ContributionRange:
    """Narrowest interval (in ``x``) holding ``fraction`` of the integral."""
    _check_fraction(fraction)
    p = np.linspace(0.0, 1.0 - fraction, samples)
    lo = quantile(table, p)
    hi = quantile(table, p + fraction)
    i = int(np.argmin(hi - lo))
    return ContributionRange(float(lo[i]), float(hi[i]), fraction, "minimal-width")


def wavelength_of(k_perp: float) -> float:
    """Wavelength ``2 pi / k_perp`` of a mode with transverse wave number ``k_perp``."""
    if not k_perp > 0:
        raise ValueError(f"k_perp must be positive, got {k_perp}")
    return 2 * math.pi / k_perp


class SpotSize(NamedTuple):
    exact: float
    approx: float


def effective_spot_size(radius: float, separation: float) -> SpotSize:
    """Chord ``2 sqrt(R^2 - (R - l)^2)`` of the sphere cap within ``l`` of the plate,
    and its small-``l`` form ``2 sqrt(2 R l)``."""
    if not 0 < separation < radius:
        raise ValueError(f"need 0 < l < R, got l={separation}, R={radius}")
    exact = 2 * math.sqrt(separation * (2 * radius - separation))
    return SpotSize(exact, 2 * math.sqrt(2 * radius * separation))


def characteristic_frequency(separation: float) -> float:
    """``omega_c = c / (2 l)``."""
    if not separation > 0:
        raise ValueError("separation must be positive")
    return C / (2 * separation)


@dataclass(frozen=True)
class ApplicabilityReport:
    l: float
    R: float
    lambda_max: float
    spot_size: float
    spot_size_approx: float
    criterion_comment: bool
    threshold_separation: float
    ref2_wavelength_estimate: float
    criterion_ref2: bool

    def as_dict(self) -> Dict[str, float]:
        return {
            "l": self.l,
            "R": self.R,
            "lambda_max": self.lambda_max,
            "spot_size": self.spot_size,
            "spot_size_approx": self.spot_size_approx,
            "criterion_comment": self.criterion_comment,
            "threshold_separation": self.threshold_separation,
            "ref2_wavelength_estimate": self.ref2_wavelength_estimate,
            "criterion_ref2": self.criterion_ref2,
        }


def applicability_report(gap: Gap, material: Material, radius: float) -> ApplicabilityReport:
    """Compare the evanescent-wave wavelength bound ``2 pi l`` with the interaction spot.

    Alongside, the estimate ``2 pi c / nu`` obtained by treating the
    contributing fluctuations as free propagating waves of frequency ``nu``;
    it exceeds the spot size and so appears to forbid the calculation.
    """
    l = gap.separation
    spot = effective_spot_size(radius, l)
    lam = 2 * math.pi * l
    nu = material.damping
    ref2 = 2 * math.pi * C / nu if nu > 0 else math.inf
    return ApplicabilityReport(
        l=l, R=radius, lambda_max=lam, spot_size=spot.exact, spot_size_approx=spot.approx,
        criterion_comment=lam < spot.exact,
        threshold_separation=2 * radius / math.pi ** 2,
        ref2_wavelength_estimate=ref2,
        criterion_ref2=ref2 < spot.exact,
    )
