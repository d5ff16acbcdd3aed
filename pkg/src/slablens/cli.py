"""Command-line front end: figure data, resolution tables and field maps."""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import config as cfgmod
from . import kernels, resolution
from .core import ConstantLossyDNG, wavenumber
from .errors import (CalibrationError, ConfigError, ConvergenceError, NonFiniteError,
                     RegionError)
from .field import QuadratureSpec, evaluate_field, incident_field_exact, region_map
from .spectrum import Region, h_delta
from .timedomain import GridOptions, OuterSpec, SineWindow, h_t, spectrum_W_many, time_domain_field

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 2, 3


def _fmt(v):
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    return format(float(v), ".16e")


def write_csv(path, command, chash, header, rows):
    """CSV with a ``# slablens`` comment line, a header row, then '.16e' values."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# slablens {command} config_hash={chash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _grid_options(cfg):
    g = cfg["omega_grid"]
    return GridOptions(band_split=g["band_split_h_over_k00"],
                       core_halfwidths=tuple(g["core_halfwidths_rel"]),
                       outer_halfwidth=g["outer_halfwidth_rel"], exponent=g["exponent"],
                       max_h_over_k00=g["max_h_over_k00"], cluster_poles=g["cluster_poles"])


def _setup(cfg):
    f0 = cfg["f0_hz"]
    omega0 = 2 * np.pi * f0
    geom = cfgmod.geometry(cfg)
    lam = cfgmod.lambda0(cfg)
    z = 2 * geom.L + cfg["z_offset_over_lambda0"] * lam
    return f0, omega0, geom, lam, z


def cmd_fig2(cfg, out, threads):
    f0, omega0, geom, lam, _ = _setup(cfg)
    k00 = wavenumber(omega0)
    hs = cfgmod.linspace(cfg["fig2"]["h_over_k00"])
    rows, markers = [], []
    for dpp in cfg["fig2"]["delta_pp"]:
        m = ConstantLossyDNG(dpp).response(omega0)
        # T_TE e^{2 i gamma0 L}: slab at [0, L], observation at z = 2L
        vals = np.abs(kernels.slab_spectrum(k00, hs * k00, m.eps_r, m.mu_r, 0.0, geom.L, 2 * geom.L))
        rows += [(h, v, dpp) for h, v in zip(hs, vals)]
        markers.append((dpp, resolution.enhancement_lossy(dpp, geom.L, lam),
                        resolution.enhancement_lossy_smith(dpp, geom.L, lam),
                        resolution.half_amplitude_point(hs, vals, ref=1.0)))
    chash = cfgmod.config_hash(cfg)
    return [
        write_csv(os.path.join(out, "fig2.csv"), "fig2", chash,
                  ["h_over_k00", "abs_value", "delta_pp"], rows),
        write_csv(os.path.join(out, "fig2_markers.csv"), "fig2", chash,
                  ["delta_pp", "R_e", "R_e_large_loss_form", "half_amplitude_h_over_k00"], markers),
    ]


def _window(cfg, omega0):
    return SineWindow(cfgmod.window_Te(cfg), omega0)


def cmd_fig3(cfg, out, threads):
    f0, omega0, geom, lam, z = _setup(cfg)
    k00 = wavenumber(omega0)
    model = cfgmod.material_from_config(cfg["material"], omega0)
    hs = cfgmod.linspace(cfg["fig3"]["h_over_k00"])
    ts = np.array(cfg["fig3"]["times_s"], dtype=float)
    W = spectrum_W_many(hs * k00, z, ts, geom, model, _window(cfg, omega0), E0=cfg["E0"],
                        n_points=cfg["omega_grid"]["n_points"], options=_grid_options(cfg),
                        threads=threads)
    A = np.abs(W)
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("non-finite time-domain spectrum")
    rows, markers = [], []
    for j, t in enumerate(ts):
        col = A[:, j]
        rows += [(h, v, t) for h, v in zip(hs, col / col.max())]
        try:
            R = float(h_t(t, omega0, geom, Region.BEYOND_2L)) / k00
        except ValueError:
            R = None
        markers.append((t, R, resolution.half_amplitude_point(hs, col)))
    chash = cfgmod.config_hash(cfg)
    return [
        write_csv(os.path.join(out, "fig3.csv"), "fig3", chash,
                  ["h_over_k00", "normalized_abs_W", "t_s"], rows),
        write_csv(os.path.join(out, "fig3_markers.csv"), "fig3", chash,
                  ["t_s", "R_e", "half_amplitude_h_over_k00"], markers),
    ]


def cmd_fig4(cfg, out, threads):
    f0, omega0, geom, lam, z = _setup(cfg)
    model = cfgmod.material_from_config(cfg["material"], omega0)
    c4 = cfg["fig4"]
    xs = cfgmod.linspace(c4["x_over_lambda0"])
    ts = np.array(c4["times_s"], dtype=float)
    spec = OuterSpec(c4["h_max_over_k00"], c4["n_prop_panels"], c4["n_ev_panels"])
    sources = [s * lam for s in c4["sources_x_over_lambda0"]]
    sample = time_domain_field(xs * lam, z, ts, geom, model, _window(cfg, omega0), spec,
                               sources=sources, E0=cfg["E0"],
                               n_points=cfg["omega_grid"]["n_points"],
                               options=_grid_options(cfg), threads=threads)
    A = np.abs(sample.value)
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("non-finite time-domain field")
    rows, markers = [], []
    for j, t in enumerate(ts):
        col = A[j] / A[j].max()
        rows += [(x, v, t) for x, v in zip(xs, col)]
        pk = resolution.profile_peaks(xs, col)
        try:
            rep = resolution.enhancement_time(t, f0, geom.L, lam)
            R, dx = rep.enhancement, rep.delta_x / lam
        except ValueError:
            R, dx = None, None
        markers.append((t, R, dx, float(len(pk.positions)), pk.central_dip_db))
    chash = cfgmod.config_hash(cfg)
    return [
        write_csv(os.path.join(out, "fig4.csv"), "fig4", chash,
                  ["x_over_lambda0", "normalized_abs_E", "t_s"], rows),
        write_csv(os.path.join(out, "fig4_markers.csv"), "fig4", chash,
                  ["t_s", "R_e", "predicted_delta_x_over_lambda0", "n_local_maxima",
                   "central_dip_db"], markers),
    ]


def resolution_table(cfg):
    f0, omega0, geom, lam, _ = _setup(cfg)
    L = geom.L
    rt = cfg["resolution_table"]
    loss = []
    for dpp in rt["delta_pp"]:
        rep = resolution.resolution_lossy(dpp, L, lam)
        loss.append({"delta_pp": dpp, "R_e": rep.enhancement,
                     "R_e_large_loss_form": resolution.enhancement_lossy_smith(dpp, L, lam),
                     "delta_x_over_lambda0": rep.delta_x / lam})
    time = []
    for t in rt["times_s"]:
        rep = resolution.enhancement_time(t, f0, L, lam)
        dual = 1.0 / (f0 * t)
        time.append({"t_s": t, "f0_t": f0 * t, "R_e": rep.enhancement,
                     "delta_x_over_lambda0": rep.delta_x / lam, "dual_delta_pp": dual,
                     "R_e_of_dual_delta_pp": resolution.enhancement_lossy(dual, L, lam)})
    inverse = []
    for R in rt["R_e"]:
        inverse.append({"R_e": R, "required_loss": resolution.required_loss(R, L, lam),
                        "required_time_s": resolution.required_time(R, f0, L, lam)})
    return {"config_hash": cfgmod.config_hash(cfg), "columns": {
        "loss": ["delta_pp", "R_e", "R_e_large_loss_form", "delta_x_over_lambda0"],
        "time": ["t_s", "f0_t", "R_e", "delta_x_over_lambda0", "dual_delta_pp",
                 "R_e_of_dual_delta_pp"],
        "inverse": ["R_e", "required_loss", "required_time_s"]},
        "loss": loss, "time": time, "inverse": inverse}


def cmd_resolution_table(cfg, out, threads):
    return [write_json(os.path.join(out, "resolution_table.json"), resolution_table(cfg))]


def _divergence_hmax(dpp, geom, omega0, z):
    region = Region.BEYOND_2L if z >= 2 * geom.L else Region.BETWEEN_FACE_AND_2L
    return float(h_delta(dpp, geom, omega0, region))


def cmd_field_map(cfg, out, threads):
    f0, omega0, geom, lam, _ = _setup(cfg)
    k00 = wavenumber(omega0)
    fm = cfg["field_map"]
    model = cfgmod.material_from_config(fm["material"], omega0)
    spec = QuadratureSpec(h_max=fm["h_max_over_k00"] * k00, rel_tol=fm["rel_tol"])
    xs = cfgmod.linspace(fm["x_over_lambda0"])
    zs = cfgmod.linspace(fm["z_over_lambda0"])
    if np.any(zs <= 0):
        raise ConfigError("field_map.z_over_lambda0 must be positive")
    deltas = fm["divergence_delta_pp"]
    header = ["x_over_lambda0", "z_over_lambda0", "region", "re_E", "im_E", "abs_E",
              "reference_abs_E"] + [f"abs_E_delta_pp_{d:.3e}" for d in deltas]
    vacuum = fm["material"]["type"] == "vacuum"
    rows = []
    for zr in zs:
        z = zr * lam
        E = evaluate_field(omega0, xs * lam, z, geom, model, spec, cfg["E0"])
        if vacuum:
            kind, zeq = "vacuum", z
        else:
            try:
                tag = region_map(geom, z, fm["limit"])
                kind, zeq = tag.kind.value, tag.equivalent_z
            except RegionError:
                kind, zeq = "unmapped", None
        ref = (np.abs(incident_field_exact(omega0, xs * lam, zeq, cfg["E0"]))
               if zeq is not None and zeq > 0 else [None] * xs.size)
        extra = []
        for dpp in deltas:
            sp = QuadratureSpec(h_max=_divergence_hmax(dpp, geom, omega0, z), rel_tol=fm["rel_tol"])
            extra.append(np.abs(evaluate_field(omega0, xs * lam, z, geom, ConstantLossyDNG(dpp),
                                               sp, cfg["E0"])))
        for i, x in enumerate(xs):
            rows.append([x, zr, kind, E[i].real, E[i].imag, abs(E[i]), ref[i]]
                        + [col[i] for col in extra])
    return [write_csv(os.path.join(out, "field_map.csv"), "field-map",
                      cfgmod.config_hash(cfg), header, rows)]


def cmd_validate_config(cfg, out, threads):
    print(json.dumps({"config_hash": cfgmod.config_hash(cfg), "config": cfg},
                     indent=2, sort_keys=True))
    return []


COMMANDS = {
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
    "resolution-table": cmd_resolution_table,
    "field-map": cmd_field_map,
    "validate-config": cmd_validate_config,
}


def build_parser():
    p = argparse.ArgumentParser(prog="slablens", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--threads", type=int, help="worker threads (fallback: SLABLENS_THREADS)")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="dotted config key, value parsed as JSON when possible")
    return p


def resolve_threads(arg, cfg):
    if arg is not None:
        n = arg
    elif os.environ.get("SLABLENS_THREADS"):
        try:
            n = int(os.environ["SLABLENS_THREADS"])
        except ValueError as exc:
            raise ConfigError("SLABLENS_THREADS must be an integer") from exc
    else:
        n = cfg["threads"]
    if n < 1:
        raise ConfigError("threads must be >= 1")
    return n


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config, args.override)
        threads = resolve_threads(args.threads, cfg)
        if args.command != "validate-config":
            os.makedirs(args.out, exist_ok=True)
        paths = COMMANDS[args.command](cfg, args.out, threads)
    except (ConfigError, CalibrationError) as exc:
        print(f"slablens: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NonFiniteError) as exc:
        print(f"slablens: numerical failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
