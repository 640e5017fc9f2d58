"""Command line front end.

Emits CSV or JSON curve, locus, residual, and fit data for plotting and
inspection; with ``--plot`` a rendered PNG lands next to the delimited
output. Angles cross this boundary in degrees and are converted to radians
exactly once at parse time. Output is assembled fully in memory before
anything is written, so an invalid configuration never leaves partial files,
and identical configuration plus seed reproduces byte-identical data files.

Exit status: 0 on success, 2 for usage or validation errors, 1 for runtime
failures such as a phi grid too coarse for branch tracking.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .curves import (
    StepSizeError,
    build_curve,
    is_equatorial,
    measured_difference_curve,
    singularity_locus,
)
from .interferometry import CHI_COUNT_DEFAULT, experiment_curve
from .mixed import scaling_law_report
from .spinor import ORTH_TOL_DEFAULT

PROG = "spinphase"

SIGN_CONVENTION = (
    "z_precession(phi) = diag(exp(+i phi/2), exp(-i phi/2)); "
    "upper-hemisphere (theta < 90 deg) secular slope is +1/2"
)

# sentinel for --plot given without a path: derive it from the output file
_PLOT_AUTO = "__auto__"


@dataclass
class RunConfig:
    """Validated invocation: everything a run needs, angles in degrees."""

    command: str
    theta_deg: list[float] = field(default_factory=list)
    phi_min_deg: float = 0.0
    phi_max_deg: float = 720.0
    steps: int = 2000
    p: float = 0.5
    mean_count: float = 1e4
    seed: int | None = None
    law: str = "linear"
    observable: str = "direct"
    mode: str = "direct"
    chi_count: int = CHI_COUNT_DEFAULT
    tol_orth: float = ORTH_TOL_DEFAULT
    format: str = "csv"
    output_path: str | None = None
    plot_path: str | None = None

    def config_echo(self) -> dict:
        # delivery destinations are not part of the computation: identical
        # configuration and seed must give byte-identical data wherever written
        echo = asdict(self)
        del echo["output_path"]
        del echo["plot_path"]
        return echo


def _theta_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of angles: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("need at least one angle")
    return values


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument(
        "--output", default=None, metavar="PATH", help="output file (default: stdout)"
    )
    p.add_argument(
        "--plot",
        nargs="?",
        const=_PLOT_AUTO,
        default=None,
        metavar="PNG",
        help="also render a figure (default path: output file with .png suffix)",
    )


def _add_grid_options(p: argparse.ArgumentParser, phi_max: float, steps: int) -> None:
    p.add_argument("--phi-min-deg", type=float, default=0.0, help="start of the precession grid")
    p.add_argument("--phi-max-deg", type=float, default=phi_max, help="end of the precession grid")
    p.add_argument("--steps", type=int, default=steps, help="uniform grid intervals (samples = steps + 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Noncyclic phase of a precessing spin-1/2 state: curves, "
        "singularities, partial polarization checks, simulated fringe fits.",
    )
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="branch-continued phase curves vs precession angle")
    p.add_argument("--theta-deg", type=_theta_list, default=[70.5, 109.5, 90.0],
                   help="comma-separated polar angles in degrees")
    _add_grid_options(p, 720.0, 2000)
    p.add_argument("--tol-orth", type=float, default=ORTH_TOL_DEFAULT,
                   help="visibility below which the phase is undefined")
    _add_output_options(p)

    p = sub.add_parser("critique", help="the measured difference observable, its mirror, and their sum")
    p.add_argument("--theta-deg", type=float, default=70.5, help="polar angle in degrees")
    _add_grid_options(p, 720.0, 2000)
    _add_output_options(p)

    p = sub.add_parser("singularities", help="phase singularity locus in the phi range")
    p.add_argument("--theta-deg", type=_theta_list, default=[70.5, 90.0, 109.5],
                   help="comma-separated polar angles in degrees")
    p.add_argument("--phi-min-deg", type=float, default=0.0)
    p.add_argument("--phi-max-deg", type=float, default=720.0)
    _add_output_options(p)

    p = sub.add_parser("mixed-check", help="residuals of candidate partial-to-full polarization laws")
    p.add_argument("--theta-deg", type=_theta_list, default=[0.0],
                   help="comma-separated polar angles in degrees")
    p.add_argument("--p", type=float, default=0.5, help="degree of polarization in (0, 1]")
    p.add_argument("--law", choices=("linear", "tangent"), default="linear")
    p.add_argument("--observable", choices=("direct", "difference"), default="direct")
    _add_grid_options(p, 180.0, 180)
    _add_output_options(p)

    p = sub.add_parser("interfere", help="fitted phase curve from simulated fringe scans")
    p.add_argument("--theta-deg", type=float, default=70.5, help="polar angle in degrees")
    _add_grid_options(p, 360.0, 72)
    p.add_argument("--mean-count", type=float, default=1e4, help="mean counts per fringe scan")
    p.add_argument("--chi-count", type=int, default=CHI_COUNT_DEFAULT,
                   help="phase-shifter settings per scan (>= 8)")
    p.add_argument("--seed", type=int, default=None,
                   help="counting-noise seed (omit for a noiseless run)")
    p.add_argument("--mode", choices=("direct", "difference"), default="direct")
    _add_output_options(p)

    return parser


def parse_config(argv: list[str] | None = None) -> RunConfig:
    """Parse and validate; exits with status 2 on any invalid combination."""
    parser = build_parser()
    args = parser.parse_args(argv)

    thetas = args.theta_deg if isinstance(args.theta_deg, list) else [args.theta_deg]
    cfg = RunConfig(command=args.command, theta_deg=[float(t) for t in thetas])
    for name in (
        "phi_min_deg", "phi_max_deg", "steps", "p", "mean_count", "seed",
        "law", "observable", "mode", "chi_count", "tol_orth",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    cfg.format = args.format
    cfg.output_path = args.output
    cfg.plot_path = args.plot

    for t in cfg.theta_deg:
        if not math.isfinite(t) or not 0.0 <= t <= 180.0:
            parser.error(f"--theta-deg values must lie in [0, 180], got {t!r}")
    if cfg.command in ("curve", "critique", "mixed-check", "interfere"):
        if not (math.isfinite(cfg.phi_min_deg) and math.isfinite(cfg.phi_max_deg)):
            parser.error("phi range must be finite")
        if cfg.phi_max_deg <= cfg.phi_min_deg:
            parser.error("--phi-max-deg must exceed --phi-min-deg")
        if cfg.steps < 1:
            parser.error("--steps must be a positive integer")
    if cfg.command == "singularities" and cfg.phi_max_deg < cfg.phi_min_deg:
        parser.error("--phi-max-deg must not be below --phi-min-deg")
    if cfg.command in ("critique", "mixed-check") or (
        cfg.command == "interfere" and cfg.mode == "difference"
    ):
        for t in cfg.theta_deg:
            if is_equatorial(math.radians(t)):
                parser.error(
                    f"theta = {t} deg is equatorial: this observable is undefined there"
                )
    if cfg.command == "mixed-check" and not 0.0 < cfg.p <= 1.0:
        parser.error(f"--p must lie in (0, 1], got {cfg.p!r}")
    if cfg.command == "interfere":
        if cfg.mean_count <= 0 or not math.isfinite(cfg.mean_count):
            parser.error("--mean-count must be positive")
        if cfg.chi_count < 8:
            parser.error("--chi-count must be at least 8")
    if cfg.command == "curve" and not 0.0 < cfg.tol_orth < 1.0:
        parser.error("--tol-orth must lie in (0, 1)")
    if cfg.plot_path == _PLOT_AUTO:
        if cfg.output_path is None:
            parser.error("--plot without a path needs --output to derive the figure name")
        cfg.plot_path = os.path.splitext(cfg.output_path)[0] + ".png"
    return cfg


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value == 0.0:
        return "0"
    return format(value, ".12g")


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _sign_label(sign: int | None) -> str:
    if sign is None:
        return "unresolved"
    return f"{sign:+d}"


def _jump_meta(theta_deg: float, jumps) -> list[dict]:
    return [
        {
            "theta_deg": theta_deg,
            "phi_deg": math.degrees(j.phi_location),
            "magnitude_deg": math.degrees(j.magnitude),
            "sign": _sign_label(j.sign),
            "resolvable": j.resolvable,
        }
        for j in jumps
    ]


def _jump_comment(j: dict) -> str:
    return (
        f"jump: theta_deg={_fmt(j['theta_deg'])} phi_deg={_fmt(j['phi_deg'])} "
        f"magnitude_deg={_fmt(j['magnitude_deg'])} sign={j['sign']} "
        f"resolvable={_fmt(j['resolvable'])}"
    )


def _serialize(cfg: RunConfig, meta_extra: dict, header: list[str],
               blocks: list[tuple[list[str], list[list]]]) -> str:
    """Render the output text: CSV with a commented preamble, or JSON."""
    meta = {
        "tool": PROG,
        "version": __version__,
        "command": cfg.command,
        "config": cfg.config_echo(),
        "sign_convention": SIGN_CONVENTION,
    }
    meta.update(meta_extra)
    if cfg.format == "json":
        samples = []
        for block_comments, rows in blocks:
            for row in rows:
                samples.append({k: v for k, v in zip(header, row)})
        return json.dumps({"meta": meta, "samples": samples}, sort_keys=True, indent=2) + "\n"

    lines = [
        f"# tool: {PROG} {__version__}",
        f"# command: {cfg.command}",
        f"# config: {json.dumps(meta['config'], sort_keys=True)}",
        f"# sign_convention: {SIGN_CONVENTION}",
    ]
    lines.append(",".join(header))
    for block_comments, rows in blocks:
        lines.extend(f"# {comment}" for comment in block_comments)
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _run_curve(cfg: RunConfig):
    header = ["phi_deg", "phase_deg", "visibility", "defined"]
    blocks = []
    jump_meta: list[dict] = []
    plot_blocks = []
    for theta_deg in cfg.theta_deg:
        curve = build_curve(
            math.radians(theta_deg),
            math.radians(cfg.phi_min_deg),
            math.radians(cfg.phi_max_deg),
            cfg.steps,
            cfg.tol_orth,
        )
        comments = [f"theta_deg: {_fmt(theta_deg)}"]
        these_jumps = _jump_meta(theta_deg, curve.jumps)
        comments.extend(_jump_comment(j) for j in these_jumps)
        jump_meta.extend(these_jumps)
        rows = []
        for s in curve.samples:
            defined = s.phase is not None
            rows.append([
                math.degrees(s.phi),
                math.degrees(s.phase) if defined else None,
                s.visibility,
                defined,
            ])
        blocks.append((comments, rows))
        phi, phase, vis = curve.as_arrays()
        plot_blocks.append((f"theta={theta_deg:g} deg", np.degrees(phi), np.degrees(phase), vis))

    def plot(path: str) -> None:
        from . import plots

        plots.render_curves(path, plot_blocks)

    return {"jumps": jump_meta}, header, blocks, plot


def _run_curve_json_header() -> list[str]:
    return ["theta_deg", "phi_deg", "phase_deg", "visibility", "defined"]


def _run_critique(cfg: RunConfig):
    theta_deg = cfg.theta_deg[0]
    args = (
        math.radians(cfg.phi_min_deg),
        math.radians(cfg.phi_max_deg),
        cfg.steps,
    )
    direct = measured_difference_curve(math.radians(theta_deg), *args)
    mirror = measured_difference_curve(math.radians(180.0 - theta_deg), *args)
    header = ["phi_deg", "difference_deg", "mirror_difference_deg", "sum_deg"]
    rows = []
    for a, b in zip(direct.samples, mirror.samples):
        rows.append([
            math.degrees(a.phi),
            math.degrees(a.phase),
            math.degrees(b.phase),
            math.degrees(a.phase + b.phase),
        ])
    table = np.array(rows, dtype=float)

    def plot(path: str) -> None:
        from . import plots

        plots.render_critique(path, theta_deg, table[:, 0], table[:, 1], table[:, 2], table[:, 3])

    meta = {"mirror_theta_deg": 180.0 - theta_deg}
    return meta, header, [([], rows)], plot


def _run_singularities(cfg: RunConfig):
    header = ["theta_deg", "phi_deg"]
    rows = []
    items = []
    for theta_deg in cfg.theta_deg:
        locus = singularity_locus(
            math.radians(theta_deg),
            math.radians(cfg.phi_min_deg),
            math.radians(cfg.phi_max_deg),
        )
        locus_deg = [math.degrees(phi) for phi in locus]
        items.append((theta_deg, locus_deg))
        rows.extend([theta_deg, phi_deg] for phi_deg in locus_deg)

    def plot(path: str) -> None:
        from . import plots

        plots.render_locus(path, items, (cfg.phi_min_deg, cfg.phi_max_deg))

    return {"count": len(rows)}, header, [([], rows)], plot


def _run_mixed_check(cfg: RunConfig):
    header = [
        "theta_deg", "p", "law", "observable", "phi_deg",
        "mixed_phase_deg", "pure_phase_deg", "predicted_pure_deg", "residual_rad",
    ]
    phis = np.linspace(
        math.radians(cfg.phi_min_deg), math.radians(cfg.phi_max_deg), cfg.steps + 1
    )
    rows = []
    groups = []
    for theta_deg in cfg.theta_deg:
        residuals = []
        for phi in phis:
            report = scaling_law_report(
                math.radians(theta_deg), cfg.p, float(phi), cfg.law, cfg.observable
            )
            residuals.append(report.residual)
            rows.append([
                theta_deg,
                cfg.p,
                cfg.law,
                cfg.observable,
                math.degrees(float(phi)),
                math.degrees(report.mixed_phase),
                math.degrees(report.pure_phase),
                math.degrees(report.predicted_pure),
                report.residual,
            ])
        groups.append(
            (f"theta={theta_deg:g} deg, p={cfg.p:g}", np.degrees(phis), np.array(residuals))
        )

    def plot(path: str) -> None:
        from . import plots

        plots.render_residuals(path, groups)

    return {}, header, [([], rows)], plot


def _run_interfere(cfg: RunConfig):
    theta_deg = cfg.theta_deg[0]
    curve = experiment_curve(
        math.radians(theta_deg),
        math.radians(cfg.phi_min_deg),
        math.radians(cfg.phi_max_deg),
        cfg.steps,
        mean_count=cfg.mean_count,
        chi_count=cfg.chi_count,
        seed=cfg.seed,
        mode=cfg.mode,
    )
    header = [
        "phi_deg", "phase_deg", "phase_stderr_deg", "visibility",
        "visibility_stderr", "singular", "defined",
    ]
    rows = []
    for pt in curve.points:
        defined = pt.phase is not None
        rows.append([
            math.degrees(pt.phi),
            math.degrees(pt.phase) if defined else None,
            _finite_or_none(math.degrees(pt.fit.phase_stderr)),
            pt.fit.visibility_hat,
            _finite_or_none(pt.fit.visibility_stderr),
            pt.fit.singular,
            defined,
        ])
    jump_meta = _jump_meta(theta_deg, curve.jumps)
    comments = [_jump_comment(j) for j in jump_meta]

    def plot(path: str) -> None:
        from . import plots

        phi = np.array([math.degrees(pt.phi) for pt in curve.points])
        phase = np.array([
            math.degrees(pt.phase) if pt.phase is not None else math.nan for pt in curve.points
        ])
        err = np.array([
            math.degrees(pt.fit.phase_stderr) if math.isfinite(pt.fit.phase_stderr) else 0.0
            for pt in curve.points
        ])
        singular_phi = np.array([
            math.degrees(pt.phi) for pt in curve.points if pt.fit.singular
        ])
        plots.render_experiment(path, theta_deg, phi, phase, err, singular_phi)

    return {"jumps": jump_meta}, header, [(comments, rows)], plot


_RUNNERS = {
    "curve": _run_curve,
    "critique": _run_critique,
    "singularities": _run_singularities,
    "mixed-check": _run_mixed_check,
    "interfere": _run_interfere,
}


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration; returns the process exit status."""
    meta_extra, header, blocks, plot = _RUNNERS[cfg.command](cfg)

    if cfg.command == "curve" and cfg.format == "json":
        # JSON samples are a flat array, so each row carries its theta
        json_header = _run_curve_json_header()
        json_blocks = []
        for (comments, rows), theta_deg in zip(blocks, cfg.theta_deg):
            json_blocks.append((comments, [[theta_deg, *row] for row in rows]))
        text = _serialize(cfg, meta_extra, json_header, json_blocks)
    else:
        text = _serialize(cfg, meta_extra, header, blocks)

    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if cfg.plot_path is not None:
        plot(cfg.plot_path)
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return run(cfg)
    except StepSizeError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
