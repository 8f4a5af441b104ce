"""Command-line front end: ``casimir-spectra {force,spectrum,applicability}``.

Exit status: 0 on success, 1 on bad input, 2 when a quadrature or series
did not reach its tolerance (results are still printed).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ._parallel import ordered_map
from .config import ConfigError, RunConfig, read_config_file
from .lifshitz import CHANNELS, TE_EVANESCENT, Gap, thermal_pressure_total
from .materials import Model
from .matsubara import thermal_correction_oracle
from .output import csv_metadata, csv_rows, fmt, to_json
from .spectra import (
    SpectrumSignError,
    applicability_report,
    contribution_range,
    default_u_grid,
    default_v_grid,
    frequency_spectrum,
    minimal_width_range,
    transverse_wavevector_spectrum,
    wavevector_spectrum,
)

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2


def _material_dict(config: RunConfig) -> Dict[str, object]:
    m = config.material
    return {"label": config.material_label, "model": m.model.value,
            "omega_p_rad_s": m.plasma_frequency, "nu_rad_s": m.damping}


def _safe_ratio(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return a / b


def run_force(config: RunConfig, verify: bool):
    def one(l):
        gap = Gap(l, config.temperature)
        bd = thermal_pressure_total(gap, config.material, config.quadrature)
        row = {"gap": l, "breakdown": bd}
        if verify:
            row["oracle"] = thermal_correction_oracle(gap, config.material)
        return row

    results = ordered_map(one, config.gaps)
    ok = all(r["breakdown"].converged and ("oracle" not in r or r["oracle"].converged)
             for r in results)
    records = []
    for r in results:
        bd = r["breakdown"]
        total = bd.total
        rec = {
            "gap_m": r["gap"],
            "temperature_K": config.temperature,
            "channels": {str(ch): {"pressure_Pa": bd.channels[ch].value,
                                   "error_Pa": bd.channels[ch].error_estimate,
                                   "evaluations": bd.channels[ch].evaluations,
                                   "converged": bd.channels[ch].converged}
                         for ch in CHANNELS},
            "total_Pa": total,
            "error_Pa": bd.error_estimate,
            "te_evanescent_share_signed": _safe_ratio(bd.channels[TE_EVANESCENT].value, total),
            "te_evanescent_share_magnitude": _safe_ratio(
                abs(bd.channels[TE_EVANESCENT].value),
                math.fsum(abs(c.value) for c in bd.channels.values())),
            "converged": bd.converged,
        }
        if "oracle" in r:
            o = r["oracle"]
            rec["oracle_Pa"] = o.value
            rec["oracle_error_Pa"] = o.error_estimate
            rec["oracle_relative_difference"] = abs(_safe_ratio(total - o.value, o.value))
            rec["oracle_converged"] = o.converged
        records.append(rec)
    return records, ok


def render_force(config: RunConfig, records: List[dict]) -> str:
    if config.output_format == "json":
        return to_json({"command": "force", "config": config.raw,
                        "material": _material_dict(config), "results": records}) + "\n"
    if config.output_format == "csv":
        header = ["gap_m", "temperature_K"] + [str(ch) for ch in CHANNELS] + [
            "total_Pa", "error_Pa", "te_evanescent_share_signed",
            "te_evanescent_share_magnitude", "converged"]
        verify = bool(records) and "oracle_Pa" in records[0]
        if verify:
            header += ["oracle_Pa", "oracle_relative_difference", "oracle_converged"]
        rows = []
        for rec in records:
            row = [rec["gap_m"], rec["temperature_K"]]
            row += [rec["channels"][str(ch)]["pressure_Pa"] for ch in CHANNELS]
            row += [rec["total_Pa"], rec["error_Pa"], rec["te_evanescent_share_signed"],
                    rec["te_evanescent_share_magnitude"], rec["converged"]]
            if verify:
                row += [rec["oracle_Pa"], rec["oracle_relative_difference"], rec["oracle_converged"]]
            rows.append(row)
        meta = {"command": "force", **{f"config.{k}": v for k, v in config.raw.items()},
                **{f"material.{k}": v for k, v in _material_dict(config).items()}}
        return "\n".join(csv_metadata(meta) + csv_rows(header, rows)) + "\n"

    lines = [f"material: {config.material_label} ({config.material.model.value}, "
             f"omega_p = {fmt(config.material.plasma_frequency)} rad/s, "
             f"nu = {fmt(config.material.damping)} rad/s)",
             f"temperature: {config.temperature:g} K"]
    for rec in records:
        lines.append(f"gap {rec['gap_m'] * 1e9:.6g} nm: thermal correction to the pressure")
        for name, c in rec["channels"].items():
            flag = "" if c["converged"] else "  [NOT CONVERGED]"
            lines.append(f"  {name:<16} {fmt(c['pressure_Pa'])} Pa  +- {c['error_Pa']:.2e}{flag}")
        lines.append(f"  {'total':<16} {fmt(rec['total_Pa'])} Pa  +- {rec['error_Pa']:.2e}")
        lines.append(f"  TE-evanescent share: {100 * rec['te_evanescent_share_signed']:.3f} % signed, "
                     f"{100 * rec['te_evanescent_share_magnitude']:.3f} % of summed magnitudes")
        if "oracle_Pa" in rec:
            lines.append(f"  Matsubara oracle: {fmt(rec['oracle_Pa'])} Pa, relative difference "
                         f"{rec['oracle_relative_difference']:.2e}")
    return "\n".join(lines) + "\n"


def run_spectrum(config: RunConfig):
    if len(config.gaps) != 1:
        raise ConfigError("gap", "spectrum takes a single separation")
    gap = Gap(config.gaps[0], config.temperature)
    n = config.grid
    var = config.variable
    if var == "v":
        table = wavevector_spectrum(gap, config.material, default_v_grid(n), config.quadrature)
    elif var in ("u", "omega"):
        table = frequency_spectrum(gap, config.material, default_u_grid(gap, config.material, n),
                                   config.quadrature, variable=var)
    else:
        grid = np.geomspace(1e-3, 20.0, n) / gap.separation
        table = transverse_wavevector_spectrum(gap, config.material, grid, config.quadrature)
    return table


def render_spectrum(config: RunConfig, table) -> str:
    eq = contribution_range(table, config.fraction)
    mw = minimal_width_range(table, config.fraction)
    meta = {
        "command": "spectrum",
        "variable": table.variable,
        "fraction": config.fraction,
        "range_equal_tail_lo": eq.x_lo,
        "range_equal_tail_hi": eq.x_hi,
        "range_minimal_width_lo": mw.x_lo,
        "range_minimal_width_hi": mw.x_hi,
        "normalization": table.normalization,
        **{k: float(v) for k, v in table.metadata.items()},
        **{f"config.{k}": v for k, v in config.raw.items()},
        **{f"material.{k}": v for k, v in _material_dict(config).items()},
    }
    if config.output_format == "json":
        doc = {"command": "spectrum", "config": config.raw, "metadata": meta,
               "x": table.x.tolist(), "density": table.density.tolist(),
               "cumulative": table.cumulative.tolist()}
        for name, col in table.extra_columns.items():
            doc[name] = np.asarray(col).tolist()
        return to_json(doc) + "\n"
    if config.output_format == "csv":
        rows = [[float(x), float(d), float(c)]
                for x, d, c in zip(table.x, table.density, table.cumulative)]
        return "\n".join(csv_metadata(meta) + csv_rows(["x", "density", "cumulative"], rows)) + "\n"
    return (f"{table.variable}-spectrum at l = {config.gaps[0] * 1e9:.6g} nm, T = {config.temperature:g} K\n"
            f"  {100 * config.fraction:g} % equal-tail range: [{eq.x_lo:.4g}, {eq.x_hi:.4g}]\n"
            f"  {100 * config.fraction:g} % minimal-width range: [{mw.x_lo:.4g}, {mw.x_hi:.4g}]\n"
            f"  grid points: {len(table.x)}, integral: {fmt(table.normalization)}\n")


def run_applicability(config: RunConfig):
    if config.radius is None:
        raise ConfigError("radius", "required for applicability")
    reports = []
    for l in config.gaps:
        if not l < config.radius:
            raise ConfigError("gap", f"separation {l:g} m is not smaller than the radius {config.radius:g} m")
        reports.append(applicability_report(Gap(l, config.temperature), config.material, config.radius))
    return reports


def render_applicability(config: RunConfig, reports) -> str:
    if config.output_format == "json":
        return to_json({"command": "applicability", "config": config.raw,
                        "material": _material_dict(config),
                        "reports": [r.as_dict() for r in reports]}) + "\n"
    if config.output_format == "csv":
        header = list(reports[0].as_dict())
        rows = [list(r.as_dict().values()) for r in reports]
        meta = {"command": "applicability", **{f"config.{k}": v for k, v in config.raw.items()}}
        return "\n".join(csv_metadata(meta) + csv_rows(header, rows)) + "\n"
    r0 = reports[0]
    lines = [f"sphere radius R = {r0.R * 1e6:.6g} um; threshold 2R/pi^2 = {r0.threshold_separation * 1e6:.4g} um",
             f"propagating-wave estimate 2 pi c / nu = {r0.ref2_wavelength_estimate * 1e6:.4g} um"]
    for r in reports:
        verdict = "applicable" if r.criterion_comment else "NOT applicable"
        ref2 = "would also pass" if r.criterion_ref2 else "would (wrongly) fail"
        lines.append(f"l = {r.l * 1e9:.6g} nm: lambda_max = 2 pi l = {r.lambda_max * 1e6:.4g} um, "
                     f"L = {r.spot_size * 1e6:.4g} um -> {verdict}; propagating-wave criterion {ref2}")
    return "\n".join(lines) + "\n"


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key = value file, or JSON output of a previous run")
    p.add_argument("--preset", help="material preset (see presets.cfg)")
    p.add_argument("--epsilon", help="'vacuum' for eps = 1")
    p.add_argument("--model", choices=["drude", "plasma"], help="inline material model")
    p.add_argument("--omega-p", dest="omega_p", help="plasma frequency, e.g. '9eV' or '1.37e16rad/s'")
    p.add_argument("--nu", help="relaxation rate, e.g. '5.32e13rad/s'")
    p.add_argument("--gap", help="separation: '162nm', '162nm,400nm' or '162nm..750nm'")
    p.add_argument("--gap-points", dest="gap_points", help="points in a gap range (default 5)")
    p.add_argument("--temp", help="temperature, e.g. '300K'")
    p.add_argument("--format", choices=["csv", "json", "pretty"])
    p.add_argument("--rel-tol", dest="rel_tol", help="outer quadrature relative tolerance")
    p.add_argument("-o", "--output", type=Path, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casimir-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    force = sub.add_parser("force", help="thermal correction and its channel breakdown")
    _add_common(force)
    force.add_argument("--verify", action="store_true", help="cross-check against the Matsubara sum")
    spectrum = sub.add_parser("spectrum", help="TE-evanescent spectral density")
    _add_common(spectrum)
    spectrum.add_argument("--var", help="v, u, omega or k_perp")
    spectrum.add_argument("--fraction", help="contribution fraction (default 0.9)")
    spectrum.add_argument("--grid", help="initial number of log-spaced samples (default 200)")
    appl = sub.add_parser("applicability", help="wavelength vs. body-size criteria")
    _add_common(appl)
    appl.add_argument("--radius", help="sphere radius, e.g. '150um'")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    raw: Dict[str, str] = {}
    try:
        if args.config is not None:
            raw.update(read_config_file(args.config))
        for key in ("preset", "epsilon", "model", "omega_p", "nu", "gap", "gap_points", "temp",
                    "format", "rel_tol", "var", "fraction", "grid", "radius"):
            value = getattr(args, key, None)
            if value is not None:
                raw[key] = value
        config = RunConfig.from_raw(raw)
        if args.command == "force":
            if config.material.model is Model.PLASMA:
                print("warning: a lossless material has real-axis mode poles that the real-frequency "
                      "channels do not capture; use --verify for the Matsubara value", file=sys.stderr)
            records, ok = run_force(config, args.verify)
            text = render_force(config, records)
        elif args.command == "spectrum":
            table = run_spectrum(config)
            text = render_spectrum(config, table)
            ok = True
        else:
            text = render_applicability(config, run_applicability(config))
            ok = True
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpectrumSignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    if args.output is not None:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
