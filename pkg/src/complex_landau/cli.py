"""Command-line entry point.

Exit codes: 0 success, 1 assertion failure, 2 numerical/domain failure,
3 I/O failure.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import figures
from .landau_modes import eigen_residual
from .operator_core import gaussian_test_function, landau_levels, symmetry_residual
from .quasimode_complex import make_config, weyl_rate
from .quasimode_imaginary import decay_fit, make_imag_config
from .spectral_discrete import (fiber_matrix_fd, filling_scan, pseudospectrum_map,
                                rotated_oscillator_hermite)

EXIT_OK, EXIT_ASSERT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

SUBCOMMANDS = ("landau-verify", "quasimode-complex", "quasimode-imaginary", "pseudospectrum",
               "filling-scan", "symmetry-check", "figure1")


class CheckFailed(Exception):
    """A computed property did not hold (exit code 1)."""


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "%.16e" % float(v)


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path: str):
    """Header and rows; numeric fields come back as float."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for row in reader:
            out = []
            for v in row:
                try:
                    out.append(float(v))
                except ValueError:
                    out.append(v)
            rows.append(out)
    return header, rows


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    subcommand: str
    b: complex
    lam: complex
    out_dir: str
    csv: bool = True
    svg: bool = True
    tol: float | None = None
    threads: int | None = None
    extra: dict = field(default_factory=dict)


def read_config_file(path: str) -> dict:
    """key = value lines; '#' starts a comment. Keys use flag names without dashes."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _float_list(s: str) -> list[float]:
    return [float(eval_angle(t)) for t in s.split(",") if t.strip()]


def _int_list(s: str) -> list[int]:
    return [int(t) for t in s.split(",") if t.strip()]


def eval_angle(s) -> float:
    """Float, or a multiple of pi written like 'pi/4', '-pi/3' or '0.5pi'."""
    if isinstance(s, (int, float)):
        return float(s)
    t = s.strip().replace(" ", "").lower()
    if "pi" not in t:
        return float(t)
    sign = -1.0 if t.startswith("-") else 1.0
    t = t.lstrip("+-")
    num, _, den = t.partition("/")
    coef = num.replace("*", "").replace("pi", "")
    value = (float(coef) if coef else 1.0) * math.pi
    return sign * value / (float(den) if den else 1.0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; explicit flags win")
    common.add_argument("--b-mod", type=float, default=1.0, help="|b|")
    common.add_argument("--b-arg", type=eval_angle, default=None, help="arg b in radians (pi/4 accepted)")
    common.add_argument("--b-re", type=float, default=None, help="Re b (Cartesian form)")
    common.add_argument("--b-im", type=float, default=None, help="Im b (Cartesian form)")
    common.add_argument("--lambda-re", type=float, default=None)
    common.add_argument("--lambda-im", type=float, default=None)
    common.add_argument("--out", default=None, help="output directory (default $OUT_DIR or ./out)")
    common.add_argument("--csv", action=argparse.BooleanOptionalAction, default=True)
    common.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--threads", type=int, default=None)

    p = argparse.ArgumentParser(prog="complex-landau",
                                description="Laplacian with a constant complex magnetic field")
    sub = p.add_subparsers(dest="subcommand", required=True)
    subs = {}

    s = sub.add_parser("landau-verify", parents=[common], help="eigen-residuals of h_kl")
    s.add_argument("--thetas", type=_float_list, default=[math.pi / 6, math.pi / 4, math.pi / 3])
    s.add_argument("--kmax", type=int, default=4)
    s.add_argument("--lmax", type=int, default=4)
    subs["landau-verify"] = s

    s = sub.add_parser("quasimode-complex", parents=[common], help="Weyl sequence for complex b")
    s.add_argument("--d", type=float, default=None, help="plateau half-width (default 0.4 tan theta)")
    s.add_argument("--n-min", type=int, default=4)
    s.add_argument("--n-max", type=int, default=12)
    subs["quasimode-complex"] = s

    s = sub.add_parser("quasimode-imaginary", parents=[common], help="Weyl sequence for b = i")
    s.add_argument("--alpha", type=float, default=1.5)
    s.add_argument("--n-min", type=int, default=10)
    s.add_argument("--n-max", type=int, default=50)
    subs["quasimode-imaginary"] = s

    s = sub.add_parser("pseudospectrum", parents=[common], help="sigma_min map")
    s.add_argument("--matrix", choices=("hermite", "fiber"), default="hermite")
    s.add_argument("--N", type=int, default=200)
    s.add_argument("--xi2", type=float, default=0.0)
    s.add_argument("--L", type=float, default=12.0)
    s.add_argument("--re-range", type=_float_list, default=[0.0, 12.0])
    s.add_argument("--im-range", type=_float_list, default=[0.0, 12.0])
    s.add_argument("--res", type=_int_list, default=[40])
    subs["pseudospectrum"] = s

    s = sub.add_parser("filling-scan", parents=[common], help="sigma_min across fibers")
    s.add_argument("--ns", type=_int_list, default=[4, 6, 8, 10])
    s.add_argument("--points-per-unit", type=float, default=40.0)
    subs["filling-scan"] = s

    s = sub.add_parser("symmetry-check", parents=[common], help="intertwining relations")
    s.add_argument("--count", type=int, default=3, help="number of random b")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    subs["symmetry-check"] = s

    s = sub.add_parser("figure1", parents=[common], help="five spectrum panels")
    s.add_argument("--kmax", type=int, default=4)
    subs["figure1"] = s

    p._subs = subs  # used to apply config-file defaults
    return p


DEFAULTS = {
    "landau-verify": (None, None),
    "quasimode-complex": (cmath.exp(1j * math.pi / 4), 2 + 0.5j),
    "quasimode-imaginary": (1j, 1j),
    "pseudospectrum": (cmath.exp(1j * math.pi / 4), None),
    "filling-scan": (cmath.exp(1j * math.pi / 4), -2 + 0.5j),
    "symmetry-check": (None, None),
    "figure1": (None, None),
}


def parse_args(argv) -> tuple[RunConfig, argparse.Namespace]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        conf = read_config_file(args.config)
        sp_ = parser._subs[args.subcommand]
        known = {a.dest: a for a in sp_._actions}
        typed = {}
        for k, v in conf.items():
            if k not in known or k in ("config", "help"):
                raise ValueError(f"unknown config key {k!r}")
            act = known[k]
            if isinstance(act, argparse.BooleanOptionalAction):
                typed[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                typed[k] = act.type(v) if act.type else v
        sp_.set_defaults(**typed)
        args = parser.parse_args(argv)

    if (args.b_re is not None or args.b_im is not None) and args.b_arg is not None:
        parser.error("give b either as --b-mod/--b-arg or as --b-re/--b-im, not both")
    b0, lam0 = DEFAULTS[args.subcommand]
    if args.b_re is not None or args.b_im is not None:
        b = complex(args.b_re or 0.0, args.b_im or 0.0)
    elif args.b_arg is not None:
        b = args.b_mod * cmath.exp(1j * args.b_arg)
    else:
        b = args.b_mod * b0 if b0 is not None else None
    if args.lambda_re is not None or args.lambda_im is not None:
        lam = complex(args.lambda_re or 0.0, args.lambda_im or 0.0)
    else:
        lam = lam0
    out = args.out or os.environ.get("OUT_DIR") or "out"
    rc = RunConfig(args.subcommand, b, lam, out, args.csv, args.svg, args.tol, args.threads)
    return rc, args


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _path(rc: RunConfig, name: str) -> str:
    return os.path.join(rc.out_dir, name)


def _say(msg: str) -> None:
    print(msg, flush=True)


def cmd_landau_verify(rc: RunConfig, args) -> int:
    tol = rc.tol if rc.tol is not None else 1e-6
    thetas = args.thetas if args.b_arg is None else [args.b_arg]
    for th in thetas:
        if not 0 < th < math.pi / 2:
            raise ValueError(f"theta = {th:.6g} outside (0, pi/2): Landau modes need Re b, Im b > 0")
    jobs = [(th, k, l) for th in thetas for k in range(args.kmax + 1) for l in range(args.lmax + 1)]

    def one(job):
        th, k, l = job
        b = args.b_mod * cmath.exp(1j * th)
        return eigen_residual(k, l, b)

    with ThreadPoolExecutor(max_workers=rc.threads) as ex:
        res = list(ex.map(one, jobs))
    rows = []
    for (th, k, l), r in zip(jobs, res):
        ev = args.b_mod * cmath.exp(1j * th) * (2 * k + 1)
        rows.append((th, k, l, ev.real, ev.imag, r))
    if rc.csv:
        write_csv(_path(rc, "landau_verify.csv"),
                  ["theta", "k", "l", "eigen_re", "eigen_im", "residual"], rows)
    worst = max(res)
    _say(f"landau-verify: {len(rows)} modes, max residual {worst:.3e} (threshold {tol:.1e})")
    if not worst < tol:
        raise CheckFailed(f"max residual {worst:.3e} >= {tol:.1e}")
    return EXIT_OK


def _ns(args):
    if args.n_max <= args.n_min:
        raise ValueError("n-range must contain at least two values to fit a rate")
    return list(range(args.n_min, args.n_max + 1))


def cmd_quasimode(rc: RunConfig, args, variant: str) -> int:
    ns = _ns(args)
    with ThreadPoolExecutor(max_workers=rc.threads) as ex:
        if variant == "complex":
            b = rc.b
            if abs(abs(b) - 1) > 1e-12:
                raise ValueError("quasimode-complex works with |b| = 1 (reduce by the scaling relation)")
            theta = cmath.phase(b)
            d = args.d if args.d is not None else 0.4 * math.tan(theta)
            config = make_config(theta, d, rc.lam, n_range=(ns[0], ns[-1]))
            rate = weyl_rate(config, executor=ex)
            reps = rate.reports
            bound = [(config.kappa - config.p_max) * r.n**2 for r in reps]
            annotation = (f"n^2-coefficient {rate.coefficient:.4f}, bound kappa - p(t) = {rate.bound:.4f}")
            ok = rate.strictly_decreasing and rate.within_bound
            x, xlabel = [r.n**2 for r in reps], "n^2"
            logs = [(r.log_norm_sq, r.log_residual_sq, r.log_ratio) for r in reps]
        else:
            config = make_imag_config(rc.lam, args.alpha, (ns[0], ns[-1]))
            if config.note:
                _say(config.note)
            fit = decay_fit(config, ns=ns, executor=ex)
            reps = fit.reports
            bound = [math.log(r.law) for r in reps]
            target = -config.lam.imag - 1 - 2 * config.alpha
            annotation = (f"residual^2 slope {fit.residual_slope:.3f} (law {target:.3f}), "
                          f"norm^2 slope {fit.norm_slope:.3f}")
            ok = fit.strictly_decreasing and abs(fit.residual_slope - target) <= 0.5
            x, xlabel = [math.log(r.n) for r in reps], "log n"
            logs = [(r.log_norm_sq, r.log_residual_sq, r.log_ratio) for r in reps]
    rows = [(r.n, a, b_, c, m) for r, (a, b_, c), m in zip(reps, logs, bound)]
    name = f"quasimode_{variant}"
    if rc.csv:
        write_csv(_path(rc, name + ".csv"),
                  ["n", "norm_sq_log", "residual_sq_log", "ratio_log", "bound_model"], rows)
    if rc.svg:
        svg = figures.line_plot_svg(x, {"log ratio": [l[2] for l in logs]}, xlabel=xlabel,
                                    ylabel="log(residual^2 / norm^2)",
                                    title=f"quasimode-{variant}", annotation=annotation)
        _atomic_write(_path(rc, name + ".svg"), svg)
    _say(f"quasimode-{variant}: {annotation}")
    if not ok:
        raise CheckFailed(f"quasimode-{variant}: decay law not met ({annotation})")
    return EXIT_OK


def cmd_pseudospectrum(rc: RunConfig, args) -> int:
    b = rc.b
    if args.matrix == "hermite":
        M = rotated_oscillator_hermite(b, args.N)
    else:
        M = fiber_matrix_fd(b, args.xi2, args.L, args.N)
    res = args.res if len(args.res) == 2 else (args.res[0], args.res[0])
    if len(args.re_range) != 2 or len(args.im_range) != 2:
        raise ValueError("ranges are given as lo,hi")
    smap = pseudospectrum_map(M, args.re_range, args.im_range, tuple(res), threads=rc.threads)
    rows = [(z.real, z.imag, v) for z, v in zip(smap.lambdas.ravel(), smap.values.ravel())]
    if rc.csv:
        write_csv(_path(rc, "pseudospectrum.csv"), ["re", "im", "sigma_min"], rows)
    if rc.svg:
        with np.errstate(divide="ignore"):
            lv = np.log10(smap.values)
        levels, _ = landau_levels(b, 30)
        _atomic_write(_path(rc, "pseudospectrum.svg"),
                      figures.heatmap_svg(smap.re, smap.im, lv, "log10 sigma_min", levels))
    _say(f"pseudospectrum: {smap.values.size} points, minimum {np.nanmin(smap.values):.3e} "
         f"at {smap.argmin():.4g}")
    return EXIT_OK


def cmd_filling_scan(rc: RunConfig, args) -> int:
    rows = filling_scan(rc.b, rc.lam, args.ns, points_per_unit=args.points_per_unit,
                        check_decrease=False)
    table = [(r.n, r.L, r.N, r.sigma, r.sigma_refined, r.floor, r.at_floor) for r in rows]
    if rc.csv:
        write_csv(_path(rc, "filling_scan.csv"),
                  ["n", "L", "N", "sigma_min", "sigma_min_refined", "roundoff_floor", "at_floor"], table)
    if rc.svg:
        _atomic_write(_path(rc, "filling_scan.svg"),
                      figures.line_plot_svg([r.n for r in rows],
                                            {"log10 sigma_min (bound)": [math.log10(r.bound) for r in rows]},
                                            xlabel="xi2 = n", ylabel="log10 sigma_min",
                                            title=f"filling scan, lambda = {rc.lam:.4g}"))
    drop = rows[0].bound / rows[-1].bound
    _say(f"filling-scan: sigma_min drop {drop:.3e} over n = {rows[0].n}..{rows[-1].n}")
    if rc.b.imag != 0:
        for a, c in zip(rows, rows[1:]):
            if a.at_floor:
                break
            if not c.bound < a.bound:
                raise CheckFailed(f"sigma_min did not decrease from n={a.n} to n={c.n}")
    return EXIT_OK


def cmd_symmetry_check(rc: RunConfig, args) -> int:
    tol = rc.tol if rc.tol is not None else 1e-6
    rng = np.random.default_rng(args.seed)
    bs = [complex(rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(-math.pi, math.pi)))
          for _ in range(args.count)]
    psi = gaussian_test_function(center=(0.3, -0.2), width=1.1, wavevector=(0.4, -0.7))
    pts = rng.uniform(-2, 2, size=(args.samples, 2))
    rows = []
    for b in bs:
        for rel in ("scaling", "reflection", "C-conjugation"):
            rows.append((rel, b.real, b.imag, symmetry_residual(rel, b, psi, pts)))
    rows.append(("T-conjugation", 0.0, 1.0, symmetry_residual("T-conjugation", 1j, psi, pts)))
    for rel, br, bi, e in rows:
        _say(f"  {rel:14s} b = {complex(br, bi):.4f}: max error {e:.3e}")
    if rc.csv:
        write_csv(_path(rc, "symmetry_check.csv"), ["relation", "b_re", "b_im", "max_error"], rows)
    worst = max(r[3] for r in rows)
    _say(f"symmetry-check: max error {worst:.3e} (threshold {tol:.1e})")
    if not worst < tol:
        raise CheckFailed(f"symmetry error {worst:.3e} >= {tol:.1e}")
    return EXIT_OK


def cmd_spectrum_figure(rc: RunConfig, args) -> int:
    for panel in figures.figure1_panels(args.kmax):
        _atomic_write(_path(rc, f"figure1_{panel.panel_id}.svg"), figures.panel_svg(panel))
        _say(f"panel ({panel.panel_id}): b = {panel.b:.4g}, continuous {panel.continuous.value}, "
             f"{len(panel.points)} point markers")
    return EXIT_OK


def run(rc: RunConfig, args) -> int:
    sc = rc.subcommand
    if sc == "landau-verify":
        return cmd_landau_verify(rc, args)
    if sc == "quasimode-complex":
        return cmd_quasimode(rc, args, "complex")
    if sc == "quasimode-imaginary":
        return cmd_quasimode(rc, args, "imaginary")
    if sc == "pseudospectrum":
        return cmd_pseudospectrum(rc, args)
    if sc == "filling-scan":
        return cmd_filling_scan(rc, args)
    if sc == "symmetry-check":
        return cmd_symmetry_check(rc, args)
    return cmd_spectrum_figure(rc, args)


def main(argv=None) -> int:
    try:
        rc, args = parse_args(sys.argv[1:] if argv is None else argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        return run(rc, args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
