"""Experiment drivers: classify / sweep / certify / fit / report.

Each driver reads its inputs from the run directory, writes CSV artifacts
with stable headers (documented in the README), and is deterministic given
an identical config and seed.
"""

import csv
import glob
import os

import numpy as np

from ..classical import TrappingClass, TrappingReport, PhasePoint, sample_trapped_set
from ..ehrenfest import EhrenfestCertificate, certify
from ..errors import ConfigurationError
from ..quantum import BumpSpec, CapSpec, ChiSpec, GridSpec, build_operator
from ..resolvent import SweepResult, ZSweep, sweep
from ..scaling import (CONVERGED, LOWER_BOUND, ClassificationResult, Model,
                       ScalingSeries, classify)
from .config import ExperimentConfig
from .svgplot import line_plot

_H_FMT = "%.17g"
_V_FMT = "%.12g"


def _h_tag(h: float) -> str:
    return ("%.10g" % h).replace(".", "p").replace("-", "m")

def _fmt_bool(b) -> str:
    return "true" if b else "false"

def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def chi_spec_for(config: ExperimentConfig, report: TrappingReport | None) -> ChiSpec:
    """Cutoff placement: plateau covers the trapped-set projection plus a pad."""
    if config.chi_plateau_radius is not None:
        plateau = config.chi_plateau_radius
    elif report is not None and report.classification is TrappingClass.TRAPPING:
        hull = max(abs(report.spatial_hull[0]), abs(report.spatial_hull[1]))
        plateau = hull + config.chi_plateau_pad
    else:
        plateau = config.chi_nontrapping_radius
    support = (config.chi_support_radius if config.chi_support_radius is not None
               else plateau + config.chi_support_pad)
    return ChiSpec(plateau, support)


def phi_bump_for(config: ExperimentConfig, eps: float) -> BumpSpec:
    pw = config.phi_plateau_halfwidth if config.phi_plateau_halfwidth is not None else eps / 2
    sw = config.phi_support_halfwidth if config.phi_support_halfwidth is not None else eps
    return BumpSpec((config.E0 - pw, config.E0 + pw), (config.E0 - sw, config.E0 + sw))


def operator_for(config: ExperimentConfig, h: float, report: TrappingReport | None):
    eps = config.eps_for(h)
    grid = GridSpec.with_resolution(config.L, h, config.E0 + eps, config.ppw)
    op = build_operator(grid, config.potential, CapSpec(config.R_a, config.eta),
                        chi_spec_for(config, report))
    if config.chi_force_zero:
        op.chi = np.zeros_like(op.chi)
    return op


# ---------------------------------------------------------------- classify

def run_classify(config: ExperimentConfig, out_dir) -> TrappingReport:
    os.makedirs(out_dir, exist_ok=True)
    report = sample_trapped_set(
        config.potential, config.E0, search_box=config.search_box,
        grid=config.grid_points, R_escape=config.R_escape, T_max=config.T_max,
        T_lyap=config.T_lyap, gamma_floor=config.gamma_floor, tol=config.flow_tol)
    rows = [["sample", _V_FMT % rho.x[0], _V_FMT % rho.xi[0],
             "", "", "", "", "", "", ""] for rho in report.trapped_samples]
    hull_lo = _V_FMT % report.spatial_hull[0] if report.spatial_hull else ""
    hull_hi = _V_FMT % report.spatial_hull[1] if report.spatial_hull else ""
    gamma = _V_FMT % report.gamma if report.gamma is not None else ""
    rows.append(["summary", "", "", _V_FMT % report.energy,
                 report.classification.value, hull_lo, hull_hi, gamma,
                 str(report.semi_trapped_forward), str(report.semi_trapped_backward)])
    _write_csv(os.path.join(out_dir, "classify.csv"),
               ["kind", "x", "xi", "energy", "classification", "hull_lo",
                "hull_hi", "gamma", "semi_forward", "semi_backward"], rows)
    return report


def load_report(out_dir) -> TrappingReport:
    path = os.path.join(out_dir, "classify.csv")
    if not os.path.exists(path):
        raise ConfigurationError(f"missing classify.csv in {out_dir}; run classify first")
    samples = []
    summary = None
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["kind"] == "sample":
                samples.append(PhasePoint(float(row["x"]), float(row["xi"])))
            else:
                summary = row
    if summary is None:
        raise ConfigurationError(f"classify.csv in {out_dir} has no summary row")
    hull = None
    if summary["hull_lo"]:
        hull = (float(summary["hull_lo"]), float(summary["hull_hi"]))
    gamma = float(summary["gamma"]) if summary["gamma"] else None
    return TrappingReport(float(summary["energy"]),
                          TrappingClass(summary["classification"]),
                          samples, hull, gamma,
                          int(summary["semi_forward"]), int(summary["semi_backward"]))


# ------------------------------------------------------------------- sweep

def run_sweep(config: ExperimentConfig, out_dir) -> list:
    os.makedirs(out_dir, exist_ok=True)
    report = load_report(out_dir)
    results: list[SweepResult] = []
    sweep_rows, kofh_rows, series_rows = [], [], []
    for i, h in enumerate(config.h_list):
        op = operator_for(config, h, report)
        zsweep = ZSweep(config.E0, config.eps_for(h), config.sweep_count)
        rng = np.random.default_rng([config.seed, i])
        res = sweep(op, zsweep, tol=config.sweep_tol, max_iter=config.sweep_max_iter,
                    refine_factor=config.refine_factor,
                    refine_max_passes=config.refine_max_passes,
                    refine_tol=config.refine_tol, refine_seeds=config.refine_seeds,
                    rng=rng)
        results.append(res)
        for s in res.samples:
            sweep_rows.append([_H_FMT % h, _V_FMT % s.z, _V_FMT % s.norm,
                               str(s.iterations), _fmt_bool(s.converged),
                               str(s.refined_pass)])
        k = res.kofh
        kofh_rows.append([_H_FMT % h, _V_FMT % k.sup_norm, _V_FMT % k.K,
                          _V_FMT % k.argmax_z, _fmt_bool(res.lower_bound_only)])
        series_rows.append([_H_FMT % h, _V_FMT % k.sup_norm,
                            LOWER_BOUND if res.lower_bound_only else CONVERGED])
    _write_csv(os.path.join(out_dir, "sweep.csv"),
               ["h", "z", "norm", "iterations", "converged", "refined_pass"],
               sweep_rows)
    _write_csv(os.path.join(out_dir, "kofh.csv"),
               ["h", "sup_norm", "K", "argmax_z", "lower_bound_only"], kofh_rows)
    _write_csv(os.path.join(out_dir, "series.csv"),
               ["h", "value", "provenance"], series_rows)
    return results


def load_series(out_dir) -> ScalingSeries:
    path = os.path.join(out_dir, "series.csv")
    if not os.path.exists(path):
        raise ConfigurationError(f"missing series.csv in {out_dir}; run sweep first")
    hs, values, prov = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            hs.append(float(row["h"]))
            values.append(float(row["value"]))
            prov.append(row["provenance"])
    return ScalingSeries(tuple(hs), tuple(values), tuple(prov))


def load_kofh_row(out_dir, h: float) -> dict:
    path = os.path.join(out_dir, "kofh.csv")
    if not os.path.exists(path):
        raise ConfigurationError(f"missing kofh.csv in {out_dir}; run sweep first")
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if abs(float(row["h"]) - h) <= 1e-12 * max(h, 1e-300):
                return row
    raise ConfigurationError(f"no sweep row for h = {h} in {path}")


# ----------------------------------------------------------------- certify

def run_certificate(config: ExperimentConfig, out_dir, h: float) -> EhrenfestCertificate:
    report = load_report(out_dir)
    if report.classification is not TrappingClass.TRAPPING:
        raise ConfigurationError(
            "certificate requires a Trapping classification; this run is NonTrapping")
    row = load_kofh_row(out_dir, h)
    from ..resolvent import KOfH
    kofh = KOfH(float(row["h"]), float(row["sup_norm"]), float(row["K"]),
                float(row["argmax_z"]))
    op = operator_for(config, h, report)
    bump_phi = phi_bump_for(config, config.eps_for(h))
    cert = certify(op, report, kofh, bump_phi, eps_cert=config.eps_cert,
                   dt=h / config.dt_factor, slack=config.slack,
                   sample_stride=config.sample_stride,
                   wall_threshold=config.wall_threshold)

    tag = _h_tag(h)
    fields = [
        ("h", _H_FMT % cert.h), ("gamma", _V_FMT % cert.gamma),
        ("eps_cert", _V_FMT % cert.eps_cert), ("T_E", _V_FMT % cert.T_E),
        ("min_observable", _V_FMT % cert.min_observable),
        ("kato_integral", _V_FMT % cert.kato_integral),
        ("K_measured", _V_FMT % cert.K_measured),
        ("paper_lower_bound", _V_FMT % cert.paper_lower_bound),
        ("kato_ok", _fmt_bool(cert.kato_ok)), ("bound_ok", _fmt_bool(cert.bound_ok)),
        ("slack", _V_FMT % cert.slack), ("eps_achieved", _V_FMT % cert.eps_achieved),
        ("valid", _fmt_bool(cert.valid)),
        ("center_x", _V_FMT % cert.center_x), ("center_xi", _V_FMT % cert.center_xi),
        ("hint", cert.hint),
    ]
    with open(os.path.join(out_dir, f"certificate_{tag}.txt"), "w",
              encoding="utf-8") as fh:
        for key, val in fields:
            fh.write(f"{key} = {val}\n")
    _write_csv(os.path.join(out_dir, f"certificate_{tag}.csv"),
               [key for key, _ in fields], [[val for _, val in fields]])

    # observable series dump regenerates the measured curve for plotting
    from ..ehrenfest import observable_series
    from ..quantum import coherent_state
    u0 = coherent_state(op.grid, PhasePoint(cert.center_x, cert.center_xi))
    series = observable_series(op, bump_phi, u0, cert.T_E, h / config.dt_factor,
                               sample_stride=config.sample_stride,
                               wall_threshold=config.wall_threshold)
    _write_csv(os.path.join(out_dir, f"observable_{tag}.csv"), ["t", "value"],
               [[_V_FMT % t, _V_FMT % v] for t, v in zip(series.times, series.values)])
    return cert


# --------------------------------------------------------------------- fit

def run_fit(config: ExperimentConfig, out_dir) -> ClassificationResult:
    series = load_series(out_dir)
    result = classify(series)
    _write_fits_csv(os.path.join(out_dir, "fits.csv"), result)
    return result


def _p_or_nu(fit) -> float:
    if fit.model is Model.POWER_LAW:
        return fit.params["p"]
    if fit.model is Model.LOG_ENHANCED:
        return fit.params["b"]
    return fit.params["nu"]


def _write_fits_csv(path, result: ClassificationResult):
    rows = [[f.model.value, _V_FMT % f.params["C"], _V_FMT % _p_or_nu(f),
             _V_FMT % f.residual, _fmt_bool(f.selected), _fmt_bool(f.ambiguous)]
            for f in result.fits]
    _write_csv(path, ["model", "C", "p_or_nu", "residual", "selected", "ambiguous"],
               rows)


# ------------------------------------------------------------------ report

def emit_report(out_dir) -> None:
    """Summary text plus deterministic SVG plots from the run artifacts."""
    series = load_series(out_dir)
    result = classify(series)
    _write_fits_csv(os.path.join(out_dir, "fits.csv"), result)

    h = np.array(series.h)
    v = np.array(series.values)
    ln_h = np.log(h)
    curves = [(ln_h, np.log(v))]
    labels = ["measured"]
    for f in result.fits:
        curves.append((ln_h, np.log(f.predict(h))))
        marker = "*" if f.selected else ""
        labels.append(f.model.value + marker)
    line_plot(os.path.join(out_dir, "plot_norm_scaling.svg"), curves, labels,
              "truncated-resolvent sup norm vs h (log-log)", "ln h", "ln ||chi R chi||")

    logfit = next(f for f in result.fits if f.model is Model.LOG_ENHANCED)
    line_plot(os.path.join(out_dir, "plot_k_vs_logh.svg"),
              [(np.abs(ln_h), v * h), (np.abs(ln_h), logfit.predict(h) * h)],
              ["measured", "log-enhanced fit"],
              "K(h) = h * sup norm vs |ln h|", "|ln h|", "value * h")

    obs_files = sorted(glob.glob(os.path.join(out_dir, "observable_*.csv")))
    if obs_files:
        ts, vals = [], []
        with open(obs_files[0], newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                ts.append(float(row["t"]))
                vals.append(float(row["value"]))
        line_plot(os.path.join(out_dir, "plot_observable.svg"), [(ts, vals)],
                  ["observable"], "coherent-state observable over the stability window",
                  "t", "||chi phi(P) u(t)||^2")

    lines = ["scaling fit summary", "===================", ""]
    lines.append(f"{'model':<14} {'C':>12} {'p_or_nu':>12} {'residual':>12} "
                 f"{'normalized':>12}  selected")
    for f in result.fits:
        mark = "  <-- selected" if f.selected else ""
        lines.append(f"{f.model.value:<14} {f.params['C']:>12.5g} "
                     f"{_p_or_nu(f):>12.5g} {f.residual:>12.5g} "
                     f"{f.normalized_residual:>12.5g}{mark}")
    lines.append("")
    lines.append(f"ambiguous: {_fmt_bool(result.ambiguous)}")
    if result.note:
        lines.append(f"note: {result.note}")
    lines.append("")
    lines.append(f"{'h':>14} {'value':>16} {'provenance':>12}")
    for hh, vv, pp in zip(series.h, series.values, series.provenance):
        lines.append(f"{hh:>14.8g} {vv:>16.8g} {pp:>12}")
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
