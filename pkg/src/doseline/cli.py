"""Command-line front end.

Usage::

    doseline forward     [--config run.toml] [--seed N] [--quiet]
    doseline reconstruct [--config run.toml] [--seed N] [--quiet]
    doseline probe       [--config run.toml] [--seed N] [--quiet]

Outputs (``<prefix>`` is ``output.prefix`` from the config):

=================================  ==============================================
``<prefix>_forward.csv``           ``x3,f_true``
``<prefix>_recon.csv``             ``x3,f_true,f_recon,rel_err``
``<prefix>_recon_summary.csv``     ``alpha,residual_norm,penalty_norm,stationarity,noise_level,seed,method``
``<prefix>_probe.csv``             ``u,v``
``<prefix>_probe_summary.csv``     ``theta,C,seed,count,tightness,envelope_valid,M,distance_delta,refinement_change``
=================================  ==============================================

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    DegenerateSegmentError,
    EmptyQuadratureError,
    InvalidDataError,
    NumericalFailure,
    PreconditionError,
    SingularEvaluationError,
)
from .forward import SourceField, assemble_kernel, eval_field, paper_source
from .geometry import Box, HalfBall, build_grid, sample_segment
from .inverse import add_noise, choose_alpha, measure, solve_least_norm, solve_tikhonov
from .probe import generate_ensemble, run_probe

__all__ = [
    "FORWARD_HEADER",
    "RECON_HEADER",
    "RECON_SUMMARY_HEADER",
    "PROBE_HEADER",
    "PROBE_SUMMARY_HEADER",
    "build_problem",
    "cmd_forward",
    "cmd_reconstruct",
    "cmd_probe",
    "main",
]

log = logging.getLogger("doseline")

FORWARD_HEADER = ("x3", "f_true")
RECON_HEADER = ("x3", "f_true", "f_recon", "rel_err")
RECON_SUMMARY_HEADER = (
    "alpha", "residual_norm", "penalty_norm", "stationarity", "noise_level", "seed", "method",
)
PROBE_HEADER = ("u", "v")
PROBE_SUMMARY_HEADER = (
    "theta", "C", "seed", "count", "tightness", "envelope_valid", "M", "distance_delta",
    "refinement_change",
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
    return path


def build_problem(config: RunConfig):
    """Grid and true source described by ``config``."""
    d = config.domain
    domain = HalfBall(d.radius) if d.shape == "half-ball" else Box(d.lower, d.upper)
    grid = build_grid(domain, np.array(config.grid.bounding_box), config.grid.resolution)

    s = config.source
    if s.preset == "paper-sec4":
        source = paper_source(grid, s.amplitude)
    elif s.preset == "constant":
        source = SourceField(np.full(grid.size, s.amplitude * s.value), grid)
    else:
        try:
            values = np.load(s.path) if s.path.endswith(".npy") else np.loadtxt(s.path)
            source = SourceField(s.amplitude * np.ravel(values), grid)
        except ValueError as exc:
            raise ConfigError(f"cannot use source file {s.path!r}: {exc}", "source.path") from None
    return grid, source


def _evaluation_points(config):
    return config.gamma1.segment().linspace(config.gamma1.count)


def cmd_forward(config: RunConfig):
    """Write the true field along the evaluation range; returns the path."""
    _, source = build_problem(config)
    pts = _evaluation_points(config)
    f = eval_field(source, pts)
    return _write_csv(f"{config.output_prefix}_forward.csv", FORWARD_HEADER, zip(pts[:, 2], f))


def cmd_reconstruct(config: RunConfig):
    """Noisy measurement on gamma, regularized solve, field on the
    evaluation range.  Returns ``(rows_path, summary_path)``."""
    grid, source = build_problem(config)
    sampling = sample_segment(config.gamma.segment(), config.gamma.count)
    kernel = assemble_kernel(grid, sampling)
    meas = add_noise(measure(source, sampling), config.noise.level, config.noise.seed)

    a = config.alpha
    if a.method == "least-norm":
        recon = solve_least_norm(kernel, meas)
    else:
        alpha = a.value if a.value is not None else choose_alpha(config.noise.level, a.c, a.floor)
        recon = solve_tikhonov(kernel, meas, alpha)

    pts = _evaluation_points(config)
    f_true = eval_field(source, pts)
    f_rec = eval_field(recon.source(grid), pts)
    diff = np.abs(f_rec - f_true)
    scale = np.abs(f_true)
    rel = np.divide(diff, scale, out=diff.copy(), where=scale > 0)

    rows = _write_csv(
        f"{config.output_prefix}_recon.csv", RECON_HEADER, zip(pts[:, 2], f_true, f_rec, rel)
    )
    summary = _write_csv(
        f"{config.output_prefix}_recon_summary.csv",
        RECON_SUMMARY_HEADER,
        [(recon.alpha, recon.residual_norm, recon.penalty_norm, recon.stationarity,
          config.noise.level, config.noise.seed, a.method)],
    )
    log.info(
        "alpha=%.3g residual=%.3g penalty=%.3g rel_err[0]=%.4g",
        recon.alpha, recon.residual_norm, recon.penalty_norm, rel[0],
    )
    return rows, summary


def cmd_probe(config: RunConfig):
    """Stability probe between gamma and the probe segment.  Returns
    ``(rows_path, summary_path)``."""
    grid, _ = build_problem(config)
    p = config.probe
    ensemble = generate_ensemble(grid, p.M, p.count, p.seed)
    report = run_probe(
        ensemble,
        sample_segment(config.gamma.segment(), p.samples),
        sample_segment(p.segment(), p.samples),
        config.distance_delta,
        ensemble_spec={"generator": "mixed", "seed": p.seed, "count": p.count},
        M=p.M,
    )
    rows = _write_csv(f"{config.output_prefix}_probe.csv", PROBE_HEADER, zip(report.u, report.v))
    summary = _write_csv(
        f"{config.output_prefix}_probe_summary.csv",
        PROBE_SUMMARY_HEADER,
        [(report.fitted_theta, report.fitted_C, p.seed, report.count, report.tightness,
          report.envelope_valid, p.M, config.distance_delta, report.refinement_change)],
    )
    log.info(
        "theta=%.3f C=%.4g envelope_valid=%s", report.fitted_theta, report.fitted_C,
        report.envelope_valid,
    )
    return rows, summary


COMMANDS = {"forward": cmd_forward, "reconstruct": cmd_reconstruct, "probe": cmd_probe}


def _parser():
    parser = argparse.ArgumentParser(
        prog="doseline", description="Dose-rate continuation along a line."
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="TOML run configuration (defaults if omitted)")
    parser.add_argument("--seed", type=int, help="override noise and probe seeds")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            config = config.with_seed(args.seed)
        written = COMMANDS[args.command](config)
    except (ConfigError, PreconditionError, DegenerateSegmentError, EmptyQuadratureError) as exc:
        print(f"doseline: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, SingularEvaluationError, InvalidDataError) as exc:
        print(f"doseline: numerical failure: {exc}", file=sys.stderr)
        if getattr(exc, "diagnostics", None):
            print(f"doseline: diagnostics: {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"doseline: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet:
        paths = written if isinstance(written, tuple) else (written,)
        for path in paths:
            print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
