"""Command-line interface.

Exit codes: 0 pass, 1 error, 2 inconclusive, 3 instability detected.
"""
from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

import numpy as np

from . import mathieu as mt
from .core import NormConvention, mathieu_potential, read_csv
from .criteria import KatoForm, Verdict, evaluate
from .errors import BlowUpError, RDBlochError
from .parallel import default_jobs
from .plot import stability_chart
from .sim import (Mode, allen_cahn_problem, default_dt, gaussian_perturbation, history_to_csv, integrate,
                  measure_decay_rate, snapshot_to_csv, sup_drift)
from .spectrum import band_structure, bands_to_csv, lambda00

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_UNSTABLE = 0, 1, 2, 3

DEFAULTS = {
    "check": dict(convention="MEAN", kato_form="OVER_L", n=256),
    "spectrum": dict(n_bands=4, n_p=21, M=64, n=256),
    "scan": dict(kappa=1.0, alpha_max=2.0, beta_max=4.0, n_alpha=81, n_beta=81,
                 convention="MEAN", kato_form="OVER_L"),
    "boundaries": dict(kappa=1.0, alpha_max=2.0, beta_max=4.0, n_points=81,
                       q_convention="Q_STANDARD", kato_form="OVER_L"),
    "simulate": dict(n_periods=8, dt=None, T=None, mode="LINEARIZED", seed=None,
                     epsilon=1e-6, richardson=True),
}
POSITIVE = {"n", "n_bands", "n_p", "M", "kappa", "alpha_max", "beta_max", "n_alpha", "n_beta",
            "n_points", "n_periods", "dt", "T", "epsilon", "jobs"}
INTS = {"n", "n_bands", "n_p", "M", "n_alpha", "n_beta", "n_points", "n_periods", "seed", "jobs"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string("[run]\n" + Path(path).read_text())
    return dict(cp["run"])


def _coerce(key, value):
    if value is None or isinstance(value, (bool, int, float)) and not isinstance(value, str):
        return value
    v = str(value).strip()
    if key == "richardson":
        return v.lower() in ("1", "true", "yes", "on")
    if key in INTS:
        return int(v)
    try:
        return float(v)
    except ValueError:
        return v


def effective_config(cmd: str, args: argparse.Namespace, keys) -> dict:
    """defaults < config file < flags, then validated."""
    cfg = dict(DEFAULTS.get(cmd, {}))
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg = {k: _coerce(k, v) for k, v in cfg.items()}
    for k, v in cfg.items():
        if k in POSITIVE and v is not None and not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise UsageError(f"{k} must be positive and finite, got {v!r}")
        if k in ("alpha", "beta") and v is not None and not (math.isfinite(v) and v >= 0):
            raise UsageError(f"{k} must be nonnegative and finite, got {v!r}")
    return cfg


def _header(cfg: dict) -> dict:
    return {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None}


def _echo(cfg: dict) -> None:
    for k, v in _header(cfg).items():
        print(f"# {k} = {v}")


def _potential_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--mathieu", nargs=3, type=float, metavar=("ALPHA", "BETA", "KAPPA"))
    g.add_argument("--csv", metavar="FILE", help="x,value samples of s over one period")


def _load_s(cfg: dict):
    if cfg.get("csv"):
        return read_csv(cfg["csv"])
    if all(cfg.get(k) is not None for k in ("alpha", "beta", "kappa")):
        if cfg["kappa"] <= 0:
            raise UsageError("kappa must be positive")
        return mathieu_potential(cfg["alpha"], cfg["beta"], cfg["kappa"], int(cfg.get("n", 256)))
    raise UsageError("give --mathieu ALPHA BETA KAPPA or --csv FILE (or alpha/beta/kappa in --config)")


def _split_mathieu(args, flag="mathieu"):
    vals = getattr(args, flag, None)
    if vals is not None:
        args.alpha, args.beta, args.kappa = vals


# --- commands --------------------------------------------------------------

def cmd_check(args) -> int:
    _split_mathieu(args)
    cfg = effective_config("check", args, ["alpha", "beta", "kappa", "csv", "convention", "kato_form", "n"])
    s = _load_s(cfg)
    _echo(cfg)
    rep = evaluate(s, cfg["convention"], KatoForm(str(cfg["kato_form"]).upper()))
    print(rep.table())
    print(rep.to_json(sort_keys=True))
    if args.output:
        Path(args.output).write_text(rep.to_json(indent=2, sort_keys=True) + "\n")
    return EXIT_INCONCLUSIVE if rep.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def cmd_spectrum(args) -> int:
    _split_mathieu(args)
    cfg = effective_config("spectrum", args, ["alpha", "beta", "kappa", "csv", "n_bands", "n_p", "M", "n", "jobs"])
    if cfg["n_p"] % 2 == 0:
        raise UsageError("n_p must be odd so that p = 0 is on the grid")
    s = _load_s(cfg)
    jobs = cfg.get("jobs") or default_jobs()
    bs = band_structure(s, n_bands=cfg["n_bands"], n_p=cfg["n_p"], M=cfg["M"], jobs=jobs)
    text = bands_to_csv(bs, header_comments=_header({k: v for k, v in cfg.items() if k != "jobs"}))
    _write_or_print(text, args.output)
    val, p, n = bs.minimum()
    g = lambda00(s, M=cfg["M"])
    print(f"minimum lambda = {val:.12g} at p = {p:g}, band {n}; lambda00 = {g.value:.12g}", file=sys.stderr)
    return EXIT_OK


def _write_or_print(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_scan(args) -> int:
    cfg = effective_config("scan", args, ["kappa", "alpha_max", "beta_max", "n_alpha", "n_beta",
                                          "convention", "kato_form", "jobs"])
    kappa = cfg["kappa"]
    alphas, betas = mt.default_grids(kappa, cfg["n_alpha"], cfg["n_beta"], cfg["alpha_max"], cfg["beta_max"])
    kform = KatoForm(str(cfg["kato_form"]).upper())
    compare = [a * kappa ** 2 for a in (0.25, 0.5, 1.0) if a <= cfg["alpha_max"]]
    scan = mt.region_scan(alphas, betas, kappa, cfg["convention"], jobs=cfg.get("jobs") or default_jobs(),
                          kato_form=kform, compare_alphas=compare)
    text = mt.scan_to_csv(scan, header_comments=_header({k: v for k, v in cfg.items() if k != "jobs"}))
    _write_or_print(text, args.output)
    out = sys.stderr if not args.output else sys.stdout
    for c in scan.comparison:
        print(f"alpha/kappa^2 = {c.alpha / kappa ** 2:g}: beta_KATO = {c.beta_kato:.6g}, "
              f"beta_THEOREM1 = {c.beta_theorem1:.6g}, beta_NUMERIC = {c.beta_numeric:.6g} "
              f"({c.ordering})", file=out)
    bad = scan.violations()
    print(f"cells = {len(scan.cells)}, errors = {len(scan.errors())}, soundness violations = {len(bad)}", file=out)
    if args.svg:
        Path(args.svg).write_text(_chart(cfg, kform))
    return EXIT_OK


def _chart(cfg, kform, q_conv=mt.QConvention.Q_STANDARD, n_points=41) -> str:
    kappa = cfg["kappa"]
    k2 = kappa ** 2
    a_max, b_max = cfg["alpha_max"] * k2, cfg["beta_max"] * k2
    curves = [mt.boundary_curve(mt.BoundaryKind.THEOREM1, kappa, a_max, b_max, n_points),
              mt.boundary_curve(mt.BoundaryKind.KATO, kappa, a_max, b_max, n_points, kato_form=kform),
              mt.boundary_curve(mt.BoundaryKind.SERIES, kappa, a_max, b_max, n_points, q_convention=q_conv)]
    region = mt.boundary_curve(mt.BoundaryKind.NUMERIC, kappa, a_max, b_max, n_points)
    return stability_chart(curves, region, kappa, cfg["alpha_max"], cfg["beta_max"])


def cmd_boundaries(args) -> int:
    cfg = effective_config("boundaries", args, ["kappa", "alpha_max", "beta_max", "n_points",
                                                "q_convention", "kato_form"])
    kappa, k2 = cfg["kappa"], cfg["kappa"] ** 2
    kform = KatoForm(str(cfg["kato_form"]).upper())
    qconv = mt.QConvention(str(cfg["q_convention"]).upper())
    a_max, b_max = cfg["alpha_max"] * k2, cfg["beta_max"] * k2
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hdr = _header(cfg)
    for kind in mt.BoundaryKind:
        curve = mt.boundary_curve(kind, kappa, a_max, b_max, cfg["n_points"], q_convention=qconv, kato_form=kform)
        mt.boundaries_to_csv([curve], out_dir / f"boundary_{kind.value.lower()}.csv", hdr)
    (out_dir / "stability.svg").write_text(_chart(cfg, kform, qconv))
    _echo(cfg)
    print(f"wrote boundary CSVs and stability.svg to {out_dir}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    src = None
    if args.mathieu is not None:
        args.alpha, args.beta, args.kappa = args.mathieu
        src = "mathieu"
    elif args.allen_cahn is not None:
        args.alpha, args.beta, args.kappa = args.allen_cahn
        src = "allen-cahn"
    cfg = effective_config("simulate", args, ["alpha", "beta", "kappa", "n_periods", "dt", "T", "mode", "seed",
                                              "epsilon", "richardson"])
    if any(cfg.get(k) is None for k in ("alpha", "beta", "kappa")):
        raise UsageError("give --mathieu/--allen-cahn ALPHA BETA KAPPA or alpha/beta/kappa in --config")
    mode = Mode.parse(cfg["mode"])
    if args.from_steady_state:
        mode = Mode.NONLINEAR
    cfg["mode"] = mode.value
    if src:
        cfg["source"] = src
    # the manufactured problem's linearization potential is the Mathieu potential
    prob = allen_cahn_problem(cfg["alpha"], cfg["beta"], cfg["kappa"], cfg["n_periods"])
    dt = cfg["dt"] if cfg["dt"] is not None else default_dt(prob.s)
    cfg["dt"] = dt
    lam = lambda00(mathieu_potential(cfg["alpha"], cfg["beta"], cfg["kappa"])).value
    if cfg["T"] is None:
        cfg["T"] = 10.0 if mode is Mode.NONLINEAR else float(min(2000.0, max(200.0, 12.0 / max(abs(lam), 1e-12))))
    _echo(cfg)
    hdr = _header(cfg)
    if mode is Mode.NONLINEAR:
        try:
            if args.from_steady_state:
                drift, state = sup_drift(prob, cfg["T"], dt)
            else:
                c0 = prob.on_grid(prob.base_state)
                pert = gaussian_perturbation(prob, cfg["epsilon"], cfg["seed"])
                state, _ = integrate(prob, cfg["T"], Mode.NONLINEAR, dt, c0 + pert)
                drift = float(np.abs(state.field - c0).max())
        except BlowUpError as exc:
            print(f"blow-up: {exc}")
            return EXIT_UNSTABLE
        _write_ts(state, args, hdr, prob)
        if state.validity:
            print(f"max linearization ratio |N'' dC^2/2| / |N' dC| = {max(state.validity):.3e}")
        print(f"max sup-norm drift from C0 over T = {cfg['T']:g}: {drift:.3e}")
        return EXIT_OK
    pert = None
    if cfg["seed"] is not None:
        pert = gaussian_perturbation(prob, 1.0, cfg["seed"])
    try:
        m = measure_decay_rate(prob, pert, cfg["T"], dt, richardson=bool(cfg["richardson"]))
    except BlowUpError as exc:
        print(f"blow-up: {exc}")
        return EXIT_UNSTABLE
    _write_ts(m.state, args, hdr, prob)
    agree = 100.0 * abs(m.rate - lam) / abs(lam) if lam != 0 else math.inf
    tag = "growth" if m.growth else "decay"
    print(f"measured {tag} rate {m.rate:.8g} vs lambda00 {lam:.8g}: relative difference {agree:.3f}%")
    return EXIT_UNSTABLE if m.growth else EXIT_OK


def _write_ts(state, args, hdr, prob):
    if args.output:
        history_to_csv(state, args.output, hdr)
    if args.snapshot:
        snapshot_to_csv(prob.x, state.true_field(), args.snapshot, {**hdr, "t": state.t})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rdbloch", description="Bloch-spectrum stability analysis of periodic steady states")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", metavar="FILE", help="flat key = value file; flags override it")

    c = sub.add_parser("check", help="evaluate the a priori stability criteria")
    _potential_args(c)
    c.add_argument("--convention", choices=[e.value for e in NormConvention], type=str.upper)
    c.add_argument("--kato-form", dest="kato_form", choices=[e.value for e in KatoForm], type=str.upper)
    c.add_argument("--n", type=int, help="samples per period for --mathieu")
    c.add_argument("--output", help="write the JSON report here")
    common(c)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("spectrum", help="band structure CSV")
    _potential_args(s)
    s.add_argument("--n-bands", dest="n_bands", type=int)
    s.add_argument("--n-p", dest="n_p", type=int)
    s.add_argument("--M", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--jobs", type=int)
    s.add_argument("--output")
    common(s)
    s.set_defaults(func=cmd_spectrum)

    sc = sub.add_parser("scan", help="region scan of the Mathieu potential")
    for name in ("kappa", "alpha-max", "beta-max"):
        sc.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    sc.add_argument("--n-alpha", dest="n_alpha", type=int)
    sc.add_argument("--n-beta", dest="n_beta", type=int)
    sc.add_argument("--convention", choices=[e.value for e in NormConvention], type=str.upper)
    sc.add_argument("--kato-form", dest="kato_form", choices=[e.value for e in KatoForm], type=str.upper)
    sc.add_argument("--jobs", type=int)
    sc.add_argument("--output")
    sc.add_argument("--svg")
    common(sc)
    sc.set_defaults(func=cmd_scan)

    b = sub.add_parser("boundaries", help="boundary CSVs and the SVG chart")
    for name in ("kappa", "alpha-max", "beta-max"):
        b.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    b.add_argument("--n-points", dest="n_points", type=int)
    b.add_argument("--q-convention", dest="q_convention", choices=[e.value for e in mt.QConvention], type=str.upper)
    b.add_argument("--kato-form", dest="kato_form", choices=[e.value for e in KatoForm], type=str.upper)
    b.add_argument("--out-dir", dest="out_dir", default=".")
    common(b)
    b.set_defaults(func=cmd_boundaries)

    m = sub.add_parser("simulate", help="time integration and decay-rate measurement")
    g = m.add_mutually_exclusive_group()
    g.add_argument("--mathieu", nargs=3, type=float, metavar=("ALPHA", "BETA", "KAPPA"))
    g.add_argument("--allen-cahn", dest="allen_cahn", nargs=3, type=float, metavar=("ALPHA", "BETA", "KAPPA"))
    m.add_argument("--mode", choices=[e.value for e in Mode], type=str.upper)
    m.add_argument("--from-steady-state", dest="from_steady_state", action="store_true")
    m.add_argument("--n-periods", dest="n_periods", type=int)
    m.add_argument("--dt", type=float)
    m.add_argument("--T", type=float)
    m.add_argument("--seed", type=int)
    m.add_argument("--epsilon", type=float)
    m.add_argument("--no-richardson", dest="richardson", action="store_false", default=None)
    m.add_argument("--output", help="time-series CSV")
    m.add_argument("--snapshot", help="final-field CSV")
    common(m)
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (RDBlochError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
