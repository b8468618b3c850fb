"""Command-line interface: sweeps, verification, feasibility, plots, presets.

Commands
--------
sweep        cross section vs k*sigma at fixed scattering angle(s)
angular      cross section vs scattering angle at fixed k*sigma
verify       closed forms vs quadrature oracle; nonzero exit on mismatch
feasibility  SI-unit validity estimates for the delta-line idealization
plot         render sweep/angular CSV file(s) to a deterministic SVG
preset       canned parameter sets reproducing the standard figure family

Conventions: angles cross the CLI boundary in degrees and are converted to
radians immediately; all lengths are in units of the bump width sigma; all
couplings are the dimensionless sigma-scaled strengths.  CSV output starts
with '# key=value' header lines followed by rows

    ksigma,theta_deg,theta0_deg,re_f1,im_f1,xsec

with every float printed to 17 significant digits, so reruns are
byte-identical (no timestamps).  Exit codes: 0 success, 1 usage error,
2 numerical failure (non-convergence, singular matrix, overflow),
3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .defects import DefectSet, Kinematics, SingularMatrixError
from .feasibility import assess, parse_energy, parse_length
from .geoamp import (
    KMMNN_VARIANTS,
    SingularAngleError,
    cross_section,
    f1_geometric,
)
from .oracle import (
    QuadratureConvergenceError,
    default_verification_grid,
    reduced_verification_grid,
    verify_all,
)
from .svgplot import render_svg

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

# Grid angles within this of a delta-supported direction get nudged ...
SINGULAR_TOL_DEG = 1e-6
# ... by this much (degrees).
NUDGE_DEG = 1e-5

COLUMNS = "ksigma,theta_deg,theta0_deg,re_f1,im_f1,xsec"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that signals usage problems as exit code 1, not 2."""

    def error(self, message):
        raise _UsageError(message)


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _parse_grid(text: str, what: str):
    parts = str(text).split(":")
    if len(parts) != 3:
        raise _UsageError(f"{what} must be lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise _UsageError(f"bad {what} {text!r}: {exc}") from exc
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise _UsageError(f"bad {what} {text!r}")
    if n == 1:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def _parse_floats(text: str, what: str):
    if text is None or str(text).strip() == "":
        return []
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise _UsageError(f"bad {what} {text!r}: {exc}") from exc


def _parse_couplings(text: str, count: int):
    if text is None or str(text).strip() == "":
        return [1.0 + 0.0j] * count
    out = []
    for tok in str(text).split(","):
        try:
            out.append(complex(tok.strip().replace("i", "j")))
        except ValueError as exc:
            raise _UsageError(f"bad coupling {tok!r}: {exc}") from exc
    if len(out) != count:
        raise _UsageError(
            f"{count} defect position(s) but {len(out)} coupling(s)"
        )
    return out


def _circular_dist_deg(a: float, b: float) -> float:
    return abs(math.remainder(a - b, 360.0))


def _singular_dirs_deg(theta0_deg: float):
    return (theta0_deg, 180.0 - theta0_deg)


def _nudge_theta_deg(theta_deg: float, theta0_deg: float):
    """Push a grid angle off the delta-supported directions (<= 1e-5 deg)."""
    for special in _singular_dirs_deg(theta0_deg):
        d = math.remainder(theta_deg - special, 360.0)
        if abs(d) < SINGULAR_TOL_DEG:
            shift = NUDGE_DEG if d >= 0.0 else -NUDGE_DEG
            return theta_deg + shift - d, True
    return theta_deg, False


@dataclass(frozen=True)
class _RowTask:
    bigK: float
    theta_deg: float
    theta0_deg: float
    positions: tuple
    couplings: tuple
    eta: float
    lambda1: float
    lambda2: float
    variant: str


def _compute_row(task: _RowTask):
    kin = Kinematics(
        bigK=task.bigK,
        theta0=math.radians(task.theta0_deg),
        theta=math.radians(task.theta_deg),
    )
    defects = DefectSet(task.positions, task.couplings)
    f1 = f1_geometric(
        kin, defects, task.eta, task.lambda1, task.lambda2, task.variant
    )
    return (
        task.bigK,
        task.theta_deg,
        task.theta0_deg,
        f1.real,
        f1.imag,
        abs(f1) ** 2,
    )


def _run_rows(tasks, workers: int):
    if workers <= 1:
        return [_compute_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_compute_row, tasks, chunksize=8))


def _format_complex(z: complex) -> str:
    return f"{z.real:g}{z.imag:+g}i"


def _csv_text(headers: dict, rows) -> str:
    lines = [f"# {k}={v}" for k, v in headers.items()]
    lines.append(f"# columns={COLUMNS}")
    for row in rows:
        lines.append(",".join(_f17(v) for v in row))
    return "\n".join(lines) + "\n"


def _common_headers(args_mode, theta0_deg, defects, couplings, eta, l1, l2, variant):
    headers = {
        "tool": "bumpscatter",
        "version": __version__,
        "mode": args_mode,
        "theta0_deg": _f17(theta0_deg),
        "defects": ",".join(_f17(p) for p in defects) or "none",
        "couplings": ",".join(_format_complex(z) for z in couplings) or "none",
        "eta": _f17(eta),
        "lambda1": _f17(l1),
        "lambda2": _f17(l2),
        "kmmnn_variant": variant,
    }
    if theta0_deg != 0.0:
        headers["note"] = (
            "nonzero theta0: first-order coefficients validated on the "
            "theta0=0 family; treat as extrapolation"
        )
    return headers


def _write_out(path: str, text: str):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# sweep / angular
# ---------------------------------------------------------------------------


def _cmd_sweep(args) -> int:
    positions = _parse_floats(args.defects, "--defects")
    couplings = _parse_couplings(args.couplings, len(positions))
    thetas = _parse_floats(args.theta_deg, "--theta-deg")
    if not thetas:
        raise _UsageError("sweep needs --theta-deg (one or more, comma separated)")
    for th in thetas:
        for special in _singular_dirs_deg(args.theta0_deg):
            if _circular_dist_deg(th, special) < SINGULAR_TOL_DEG:
                raise _UsageError(
                    f"theta = {th} deg lies on a delta-supported direction "
                    f"(theta0 = {args.theta0_deg}, mirror = "
                    f"{180 - args.theta0_deg}); the first-order cross section "
                    "is not defined there"
                )
    kgrid = _parse_grid(args.kgrid, "--kgrid")
    if np.any(kgrid <= 0.0):
        raise _UsageError("--kgrid must be strictly positive")
    tasks = [
        _RowTask(
            bigK=float(k), theta_deg=float(th), theta0_deg=args.theta0_deg,
            positions=tuple(positions), couplings=tuple(couplings),
            eta=args.eta, lambda1=args.lambda1, lambda2=args.lambda2,
            variant=args.kmmnn_variant,
        )
        for th in thetas
        for k in kgrid
    ]
    rows = _run_rows(tasks, args.workers)
    headers = _common_headers(
        "kscan", args.theta0_deg, positions, couplings,
        args.eta, args.lambda1, args.lambda2, args.kmmnn_variant,
    )
    headers["kgrid"] = args.kgrid
    headers["thetas_deg"] = ",".join(_f17(t) for t in thetas)
    _write_out(args.out, _csv_text(headers, rows))
    if args.svg:
        _write_out(args.svg, _svg_from_rows("kscan", headers, rows))
    return EXIT_OK


def _cmd_angular(args) -> int:
    positions = _parse_floats(args.defects, "--defects")
    couplings = _parse_couplings(args.couplings, len(positions))
    if args.ksigma <= 0.0:
        raise _UsageError("--ksigma must be positive")
    tgrid = _parse_grid(args.thetagrid, "--thetagrid")
    thetas = []
    for th in tgrid:
        nudged, warned = _nudge_theta_deg(float(th), args.theta0_deg)
        if warned:
            print(
                f"warning: theta = {th:g} deg sits on a delta-supported "
                f"direction; nudged to {nudged:.10g} deg",
                file=sys.stderr,
            )
        thetas.append(nudged)
    tasks = [
        _RowTask(
            bigK=args.ksigma, theta_deg=th, theta0_deg=args.theta0_deg,
            positions=tuple(positions), couplings=tuple(couplings),
            eta=args.eta, lambda1=args.lambda1, lambda2=args.lambda2,
            variant=args.kmmnn_variant,
        )
        for th in thetas
    ]
    rows = _run_rows(tasks, args.workers)
    headers = _common_headers(
        "anglescan", args.theta0_deg, positions, couplings,
        args.eta, args.lambda1, args.lambda2, args.kmmnn_variant,
    )
    headers["ksigma"] = _f17(args.ksigma)
    headers["thetagrid"] = args.thetagrid
    _write_out(args.out, _csv_text(headers, rows))
    if args.svg:
        _write_out(args.svg, _svg_from_rows("anglescan", headers, rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# plotting (from rows or from CSV files)
# ---------------------------------------------------------------------------


def _svg_from_rows(mode: str, headers: dict, rows) -> str:
    if mode == "kscan":
        curves = {}
        for (k, th, _, _, _, xs) in rows:
            curves.setdefault(th, ([], []))
            curves[th][0].append(k)
            curves[th][1].append(xs)
        curve_list = [
            (f"theta = {th:g} deg", xs, ys) for th, (xs, ys) in curves.items()
        ]
        return render_svg(curve_list, "k sigma", "|f1|^2 / sigma")
    curves = {}
    label = (
        f"l1 = {headers.get('lambda1')}, l2 = {headers.get('lambda2')}"
        if "lambda1" in headers
        else "sweep"
    )
    xs = [r[1] for r in rows]
    ys = [r[5] for r in rows]
    return render_svg([(label, xs, ys)], "theta (deg)", "|f1|^2 / sigma")


def _read_csv(path: str):
    headers = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    headers[k.strip()] = v.strip()
                continue
            rows.append(tuple(float(v) for v in line.split(",")))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return headers, rows


def _cmd_plot(args) -> int:
    curve_list = []
    mode = None
    for path in args.inputs:
        headers, rows = _read_csv(path)
        m = headers.get("mode", "kscan")
        if mode is None:
            mode = m
        elif m != mode:
            raise _UsageError(
                f"cannot mix modes in one plot: {mode} vs {m} ({path})"
            )
        if m == "kscan":
            groups = {}
            for (k, th, _, _, _, xs) in rows:
                groups.setdefault(th, ([], []))
                groups[th][0].append(k)
                groups[th][1].append(xs)
            for th, (xs, ys) in groups.items():
                curve_list.append((f"theta = {th:g} deg", xs, ys))
        else:
            label = (
                f"l1 = {headers.get('lambda1', '?')}, "
                f"l2 = {headers.get('lambda2', '?')}"
            )
            curve_list.append(
                (label, [r[1] for r in rows], [r[5] for r in rows])
            )
    xlabel = "k sigma" if mode == "kscan" else "theta (deg)"
    _write_out(args.out, render_svg(curve_list, xlabel, "|f1|^2 / sigma"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _mirror_asymmetry_lines():
    """Measured (not asserted) xsec change under alpha -> -alpha.

    Reports both plausible readings of mirror symmetry for a single offset
    defect at theta0 = 0: the same-angle comparison and the reflected-angle
    (180 deg - theta) comparison.  Neither is an exact invariance of the
    first-order amplitude; these lines quantify by how much.
    """
    out = ["mirror asymmetry (alpha -> -alpha), measured, theta=30deg:"]
    for bigK in (0.5, 1.0, 2.0):
        th = math.radians(30.0)
        x_plus = cross_section(
            Kinematics(bigK, 0.0, th), DefectSet([3.0], [1.0]), 0.1, 0.5, -0.5
        )
        x_minus = cross_section(
            Kinematics(bigK, 0.0, th), DefectSet([-3.0], [1.0]), 0.1, 0.5, -0.5
        )
        x_minus_refl = cross_section(
            Kinematics(bigK, 0.0, math.pi - th),
            DefectSet([-3.0], [1.0]), 0.1, 0.5, -0.5,
        )
        rel_same = abs(x_plus - x_minus) / max(x_plus, x_minus)
        rel_refl = abs(x_plus - x_minus_refl) / max(x_plus, x_minus_refl)
        out.append(
            f"  K={bigK:g}: xsec(+3,theta)={x_plus:.9e} "
            f"xsec(-3,theta)={x_minus:.9e} rel_same={rel_same:.3e} "
            f"xsec(-3,180-theta)={x_minus_refl:.9e} rel_reflected={rel_refl:.3e}"
        )
    return out


def _cmd_verify(args) -> int:
    grid = default_verification_grid() if args.full else reduced_verification_grid()
    n_done = [0]

    def progress(_rec):
        n_done[0] += 1
        if args.progress and n_done[0] % 500 == 0:
            print(f"  ... {n_done[0]} records", file=sys.stderr)

    report = verify_all(grid, rtol=args.rtol, atol=args.atol, progress=progress)
    text = report.to_text()
    extra = "\n".join(_mirror_asymmetry_lines())
    full_text = text + "\n" + extra + "\n"
    if args.out:
        _write_out(args.out, full_text)
        print(f"report written to {args.out}")
    summary = [ln for ln in text.splitlines() if ln.startswith(("summary", "worst"))]
    print("\n".join(summary))
    print(extra)
    if not report.all_passed:
        print("VERIFICATION FAILED", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------


def _cmd_feasibility(args) -> int:
    try:
        rep = assess(
            v0_joule=parse_energy(args.v0),
            rho_m=parse_length(args.rho),
            energy_joule=parse_energy(args.energy),
            mass_ratio=float(args.mass_ratio),
            sigma_m=parse_length(args.sigma),
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    for line in rep.lines():
        print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_SIX_THETAS = "5,30,45,60,90,175"
_LAMBDA_COMBOS = ((0.5, -0.5), (0.0, -0.5), (0.5, 0.0), (0.5, 0.5))
_KGRID = "0.025:5:200"
_THETAGRID = "1:179:179"

_PRESET_DEFECTS = {
    "fig1-left": "-3", "fig1-mid": "0", "fig1-right": "3",
    "fig2-left": "-3,0", "fig2-mid": "0,3", "fig2-right": "-3,3",
    "fig3-left": "-3", "fig3-mid": "0", "fig3-right": "3",
    "fig4-left": "-3,0", "fig4-mid": "0,3", "fig4-right": "-3,3",
    "fig5-left": "", "fig5-right": "",
}

PRESET_NAMES = tuple(sorted(_PRESET_DEFECTS))


def _preset_is_kscan(name: str) -> bool:
    return name.startswith(("fig1", "fig2")) or name == "fig5-left"


def _cmd_preset(args) -> int:
    name = args.name
    if name not in _PRESET_DEFECTS:
        raise _UsageError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    defects = _PRESET_DEFECTS[name]
    ns = argparse.Namespace(
        defects=defects, couplings=None, theta0_deg=0.0, eta=0.1,
        kmmnn_variant="kappa2", workers=args.workers, svg=None,
    )
    written = []
    if _preset_is_kscan(name):
        ns.lambda1, ns.lambda2 = 0.5, -0.5
        ns.theta_deg = _SIX_THETAS
        ns.kgrid = _KGRID
        ns.out = os.path.join(outdir, f"{name}.csv")
        ns.svg = os.path.join(outdir, f"{name}.svg")
        _cmd_sweep(ns)
        written += [ns.out, ns.svg]
    else:
        csvs = []
        for (l1, l2) in _LAMBDA_COMBOS:
            ns.lambda1, ns.lambda2 = l1, l2
            ns.ksigma = 1.0
            ns.thetagrid = _THETAGRID
            ns.out = os.path.join(outdir, f"{name}.lam_{l1:g}_{l2:g}.csv")
            ns.svg = None
            _cmd_angular(ns)
            csvs.append(ns.out)
        svg_path = os.path.join(outdir, f"{name}.svg")
        _cmd_plot(argparse.Namespace(inputs=csvs, out=svg_path))
        written += csvs + [svg_path]
    for path in written:
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def _add_engine_flags(p):
    p.add_argument("--theta0-deg", type=float, default=0.0,
                   help="incidence angle in degrees (default 0)")
    p.add_argument("--defects", default="",
                   help="comma-separated defect positions in units of sigma")
    p.add_argument("--couplings", default=None,
                   help="comma-separated couplings (complex a+bi); default 1 each")
    p.add_argument("--eta", type=float, default=0.1,
                   help="(delta/sigma)^2 of the bump (default 0.1)")
    p.add_argument("--lambda1", type=float, default=0.5,
                   help="Gaussian-curvature weight (default 0.5)")
    p.add_argument("--lambda2", type=float, default=-0.5,
                   help="squared-mean-curvature weight (default -0.5)")
    p.add_argument("--kmmnn-variant", choices=KMMNN_VARIANTS, default="kappa2",
                   help="transcription variant of the four-index step term")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes for sweep rows (default 1)")


def _build_parser() -> _Parser:
    p = _Parser(prog="bumpscatter",
                description="Geometric scattering from a Gaussian bump with "
                            "parallel line defects")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sweep", help="cross section vs k*sigma")
    _add_engine_flags(ps)
    ps.add_argument("--theta-deg", required=True,
                    help="observation angle(s) in degrees, comma separated")
    ps.add_argument("--kgrid", required=True, help="lo:hi:n in k*sigma")
    ps.add_argument("--out", required=True, help="output CSV path")
    ps.add_argument("--svg", default=None, help="also write an SVG plot here")
    ps.set_defaults(func=_cmd_sweep)

    pa = sub.add_parser("angular", help="cross section vs angle")
    _add_engine_flags(pa)
    pa.add_argument("--ksigma", type=float, required=True, help="fixed k*sigma")
    pa.add_argument("--thetagrid", required=True, help="lo:hi:n in degrees")
    pa.add_argument("--out", required=True, help="output CSV path")
    pa.add_argument("--svg", default=None, help="also write an SVG plot here")
    pa.set_defaults(func=_cmd_angular)

    pv = sub.add_parser("verify", help="closed forms vs quadrature oracle")
    pv.add_argument("--full", action="store_true",
                    help="full acceptance grid (default: reduced grid)")
    pv.add_argument("--rtol", type=float, default=1e-6)
    pv.add_argument("--atol", type=float, default=1e-10)
    pv.add_argument("--out", default=None, help="write the full record report here")
    pv.add_argument("--progress", action="store_true",
                    help="print a progress line every 500 records")
    pv.set_defaults(func=_cmd_verify)

    pf = sub.add_parser("feasibility", help="delta-line validity estimates (SI)")
    pf.add_argument("--v0", required=True, help="defect depth, e.g. 1eV")
    pf.add_argument("--rho", required=True, help="defect width, e.g. 1nm")
    pf.add_argument("--energy", required=True, help="particle energy, e.g. 1e-3eV")
    pf.add_argument("--mass-ratio", required=True,
                    help="effective mass / electron mass, e.g. 0.01")
    pf.add_argument("--sigma", default="50nm",
                    help="bump width (default 50nm)")
    pf.set_defaults(func=_cmd_feasibility)

    pp = sub.add_parser("plot", help="CSV file(s) -> SVG")
    pp.add_argument("inputs", nargs="+", help="CSV files from sweep/angular")
    pp.add_argument("--out", required=True, help="output SVG path")
    pp.set_defaults(func=_cmd_plot)

    pr = sub.add_parser("preset", help="canned figure-family parameter sets")
    pr.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    pr.add_argument("--out", required=True, help="output directory")
    pr.add_argument("--workers", type=int, default=1)
    pr.set_defaults(func=_cmd_preset)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        QuadratureConvergenceError,
        SingularMatrixError,
        SingularAngleError,
        OverflowError,
        FloatingPointError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
