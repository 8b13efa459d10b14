"""Command-line interface.

Subcommands: ``setup1``, ``setup2``, ``sweep``, ``classical`` and ``bmv``.
All physical flags are SI; phases are radians. Every subcommand accepts
``--config FILE`` (a JSON object keyed by option name, e.g. ``"delta_phi"``)
whose values are overridden by explicit flags, and ``--json`` to print the
full report instead of CSV.

Exit codes: 0 success, 2 usage or range error, 3 numerical-validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import experiments, gridsim
from .errors import NumericalValidationError
from .physics import InterferometerParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

REPORT_FIELDS = ["label", "p", "delta_phi_raw", "delta_phi_mod",
                 "c_l1", "c_rel_ent", "c_l1_closed", "c_rel_closed"]
SWEEP_FIELDS = ["var", "value", "delta_phi_raw", "delta_phi_mod",
                "c_l1", "c_rel_ent", "c_l1_closed", "c_rel_closed"]
SWEEP_VARS = ("p", "delta_phi", "tau", "d", "D", "M", "m")
PHYSICAL = ("M", "m", "D", "d", "tau")

DEFAULTS = {
    "setup1": {"p": 1.0, "M": 1.0, "D": 1.0, "tau": 1.0},
    "setup2": {"p": 1.0, "field_labels": "orthogonal"},
    "sweep": {"p": 1.0, "out": "-", "jobs": 1},
    "classical": {"mode": "identity", "E": 1.0, "EL": 1.0, "ER": 0.0, "tau": 1.0, "hbar": None,
                  "runs": 1000, "seed": 0, "record_std": None,
                  "sigma": gridsim.DEFAULT_SIGMA, "separation": None, "points": gridsim.DEFAULT_POINTS},
    "bmv": {"t": math.pi / 2, "energies": list(experiments.BMV_DEFAULT_ENERGIES), "hbar": 1.0},
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _physical_flags(p):
    p.add_argument("--M", type=float, help="split mass [kg]")
    p.add_argument("--m", type=float, help="probe mass [kg]")
    p.add_argument("--D", type=float, help="arm separation [m]")
    p.add_argument("--d", type=float, help="probe to L-arm distance [m]")
    p.add_argument("--tau", type=float, help="transit time [s]")


def _common(p):
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--json", action="store_true", help="print the full JSON report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gravcoherence", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s1 = sub.add_parser("setup1", help="split mass without probe")
    _common(s1)
    s1.add_argument("--p", type=float, help="depolarising parameter in [0, 1] (default 1)")
    s1.add_argument("--M", type=float, help="split mass [kg] (default 1)")
    s1.add_argument("--D", type=float, help="arm separation [m] (default 1)")
    s1.add_argument("--tau", type=float, help="transit time [s] (default 1)")

    s2 = sub.add_parser("setup2", help="split mass with a probe mass")
    _common(s2)
    _physical_flags(s2)
    s2.add_argument("--p", type=float, help="depolarising parameter in [0, 1] (default 1)")
    s2.add_argument("--delta-phi", dest="delta_phi", type=float, help="relative phase override [rad]")
    s2.add_argument("--field-labels", dest="field_labels", choices=sorted(experiments.FIELD_LABELS))

    sw = sub.add_parser("sweep", help="sweep one parameter of setup2 and write CSV")
    _common(sw)
    _physical_flags(sw)
    sw.add_argument("--p", type=float)
    sw.add_argument("--delta-phi", dest="delta_phi", type=float)
    sw.add_argument("--var", choices=SWEEP_VARS)
    sw.add_argument("--from", dest="start", type=float)
    sw.add_argument("--to", dest="stop", type=float)
    sw.add_argument("--steps", type=int)
    sw.add_argument("--out", help="output CSV path, '-' for stdout (default)")
    sw.add_argument("--jobs", type=int, help="worker processes (default 1)")

    cl = sub.add_parser("classical", help="classical-channel checks")
    _common(cl)
    cl.add_argument("--mode", choices=("identity", "diagonal", "eq37", "grid"),
                    help="eq37 is a synonym for diagonal")
    cl.add_argument("--E", type=float, help="identity mode: energy multiplying I")
    cl.add_argument("--EL", type=float, help="diagonal mode: energy of |L>")
    cl.add_argument("--ER", type=float, help="diagonal mode: energy of |R>")
    cl.add_argument("--tau", type=float)
    cl.add_argument("--hbar", type=float, help="default 1 (dimensionless) or SI in grid mode")
    cl.add_argument("--runs", type=int)
    cl.add_argument("--seed", type=int)
    cl.add_argument("--record-std", dest="record_std", type=float,
                    help="std of the split-mass record K [kg m/s] (default hbar/separation)")
    cl.add_argument("--sigma", type=float, help="Gaussian width [m]")
    cl.add_argument("--separation", type=float, help="branch separation [m] (default 20 sigma)")
    cl.add_argument("--points", type=int, help="grid points")

    bm = sub.add_parser("bmv", help="entanglement from two split masses")
    _common(bm)
    bm.add_argument("--t", type=float, help="dimensionless time (default pi/2)")
    bm.add_argument("--energies", type=float, nargs=4, metavar=("E1", "E2", "E1p", "E2p"))
    bm.add_argument("--hbar", type=float)
    return parser


def resolve(args) -> dict:
    """Merge built-in defaults, the optional config file and explicit flags."""
    opts = dict(DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        known = set(vars(args))
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        opts.update(cfg)
    for key, value in vars(args).items():
        if value is not None and key not in ("config",):
            opts[key] = value
    for key in vars(args):
        opts.setdefault(key, None)
    return opts


def _check_p(p):
    if p is None or not 0.0 <= p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {p}")


def _setup2_report(o):
    _check_p(o["p"])
    missing = [k for k in PHYSICAL if o.get(k) is None]
    if o.get("delta_phi") is not None:
        return experiments.run_probe_mass(delta_phi=o["delta_phi"], p=o["p"],
                                          field_labels=o.get("field_labels") or "orthogonal")
    if missing:
        raise UsageError("setup2 needs --delta-phi or all of --M --m --D --d --tau "
                         f"(missing: {' '.join('--' + k for k in missing)})")
    try:
        params = InterferometerParams(o["M"], o["m"], o["D"], o["d"], o["tau"], o["p"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return experiments.run_probe_mass(params, field_labels=o.get("field_labels") or "orthogonal")


def _report_row(r):
    dphi = r.delta_phi
    closed = r.closed or {}
    return [r.label, r.params.get("p"), dphi.raw if dphi else None, dphi.mod if dphi else None,
            r.simulated["c_l1"], r.simulated["c_rel_ent"], closed.get("c_l1"), closed.get("c_rel_ent")]


def _emit_report(o, report, out):
    if o["json"]:
        json.dump(report.to_dict(), out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        write_csv(out, REPORT_FIELDS, [_report_row(report)])


def cmd_setup1(o, out):
    _check_p(o["p"])
    try:
        report = experiments.run_single_mass(o["p"], o["M"], o["D"], o["tau"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit_report(o, report, out)


def cmd_setup2(o, out):
    _emit_report(o, _setup2_report(o), out)


def _sweep_point(args):
    var, value, base = args
    o = dict(base)
    o[var] = float(value)
    r = _setup2_report(o)
    closed = r.closed or {}
    return [var, float(value), r.delta_phi.raw, r.delta_phi.mod, r.simulated["c_l1"],
            r.simulated["c_rel_ent"], closed.get("c_l1"), closed.get("c_rel_ent")]


def sweep_rows(o) -> list:
    var = o.get("var")
    if var is None or o.get("start") is None or o.get("stop") is None or o.get("steps") is None:
        raise UsageError("sweep needs --var, --from, --to and --steps")
    if o["steps"] < 2:
        raise UsageError(f"--steps must be at least 2, got {o['steps']}")
    if var != "delta_phi" and o.get("delta_phi") is None:
        missing = [k for k in PHYSICAL if k != var and o.get(k) is None]
        if missing:
            raise UsageError(f"sweeping {var} needs --delta-phi or fixed {' '.join('--' + k for k in missing)}")
    if var in PHYSICAL and o.get("delta_phi") is not None:
        raise UsageError(f"sweeping {var} conflicts with a fixed --delta-phi")
    if var != "p":
        _check_p(o["p"])
    base = {k: o.get(k) for k in PHYSICAL + ("p", "delta_phi", "field_labels")}
    values = np.linspace(o["start"], o["stop"], o["steps"])
    tasks = [(var, v, base) for v in values]
    jobs = int(o.get("jobs") or 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def cmd_sweep(o, out):
    rows = sweep_rows(o)
    buf = io.StringIO()
    write_csv(buf, SWEEP_FIELDS, rows)
    if o["out"] in (None, "-"):
        out.write(buf.getvalue())
        return
    try:
        with open(o["out"], "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise UsageError(f"cannot write {o['out']}: {exc}") from exc


def cmd_classical(o, out):
    mode = o["mode"]
    hbar = o["hbar"]
    if mode == "identity":
        res = experiments.classical_identity_check(E=o["E"], tau=o["tau"], hbar=hbar or 1.0)
        rows = [["classical-identity", b, res["coherence_before"][b]["c_l1"], res["coherence_after"][b]["c_l1"],
                 res["coherence_before"][b]["c_rel_ent"], res["coherence_after"][b]["c_rel_ent"],
                 res["max_coherence_delta"], res["max_entry_delta"], "coherence unchanged"]
                for b in res["coherence_before"]]
        header = ["label", "basis", "c_l1_before", "c_l1_after", "c_rel_before", "c_rel_after",
                  "coherence_delta", "max_entry_delta", "verdict"]
    elif mode in ("diagonal", "eq37"):
        res = experiments.diagonal_phase_check(o["EL"], o["ER"], o["tau"], hbar or 1.0)
        header = ["label", "relative_phase", "c_l1", "c_l1_expected", "c_rel_ent", "verdict"]
        verdict = "coherence introduced" if res["introduces_coherence"] else "no coherence"
        rows = [[res["label"], res["relative_phase"], res["c_l1"], res["c_l1_expected"], res["c_rel_ent"], verdict]]
    else:
        res, header, rows = _classical_grid(o, hbar or gridsim.HBAR)
    if o["json"]:
        json.dump(res, out, indent=2, sort_keys=True, default=_json_default)
        out.write("\n")
    else:
        write_csv(out, header, rows)
    if mode == "grid" and not res["no_coherence_created"]:
        raise NumericalValidationError("classical ensemble increased the off-diagonal magnitude")


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    raise TypeError(type(x))


def _classical_grid(o, hbar):
    sigma = o["sigma"]
    sep = o["separation"] or gridsim.DEFAULT_SEPARATION_SIGMAS * sigma
    runs = o["runs"]
    if runs is None or runs < 1:
        raise UsageError("--runs must be at least 1")
    std = hbar / sep if o["record_std"] is None else o["record_std"]
    if std < 0:
        raise UsageError("--record-std must be non-negative")
    try:
        grid = gridsim.GridSpec.around(0.0, sigma, half_window_sigmas=sep / (2 * sigma) + 50, n=o["points"])
        psi = gridsim.make_two_branch_state(-sep / 2, sep / 2, sigma, grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ens = gridsim.classical_channel_ensemble(psi, std, runs, o["seed"], hbar)
    init = abs(ens.initial.matrix[0, 1])
    mean = abs(ens.mean.matrix[0, 1])
    ok = bool(mean <= init + 3 * ens.offdiag_mc_sigma + 1e-12)
    res = {
        "label": "classical-grid",
        "seed": ens.seed,
        "n_runs": ens.n_runs,
        "record_std": std,
        "hbar": hbar,
        "sigma": sigma,
        "separation": sep,
        "initial_qubit": {"re": ens.initial.matrix.real.tolist(), "im": ens.initial.matrix.imag.tolist()},
        "mean_qubit": {"re": ens.mean.matrix.real.tolist(), "im": ens.mean.matrix.imag.tolist()},
        "initial_offdiag_abs": init,
        "mean_offdiag_abs": mean,
        "expected_offdiag_abs": init * gridsim.expected_offdiag_decay(std, sep, hbar),
        "mc_sigma": ens.offdiag_mc_sigma,
        "first_run_relative_phase": ens.first_run_relative_phase,
        "no_coherence_created": ok,
    }
    header = ["label", "n_runs", "seed", "record_std", "initial_offdiag_abs", "mean_offdiag_abs",
              "expected_offdiag_abs", "mc_sigma", "first_run_relative_phase", "verdict"]
    verdict = "no coherence created" if ok else "coherence increased"
    rows = [[res[k] for k in header[:-1]] + [verdict]]
    return res, header, rows


def cmd_bmv(o, out):
    report = experiments.bmv_run(o["t"], o["energies"], o["hbar"])
    if o["json"]:
        json.dump(report.to_dict(), out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        write_csv(out, ["label", "t", "entanglement", "entanglement_initial"],
                  [["bmv", o["t"], report.entanglement, report.extras["entanglement_initial"]]])


COMMANDS = {
    "setup1": cmd_setup1,
    "setup2": cmd_setup2,
    "sweep": cmd_sweep,
    "classical": cmd_classical,
    "bmv": cmd_bmv,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](resolve(args), out)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalValidationError as exc:
        print(f"{parser.prog} {args.command}: numerical validation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
