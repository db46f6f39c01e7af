"""Command-line front end: ``cmaf background | evolve | spectrum | bondi | verify``.

All output is deterministic: floats are written with ``%.17g``, rows are
ordered by ``l`` then ``u``, and nothing time- or host-dependent is printed.
Lengths are in the units of ``--r0``; each exported column has a fixed
length dimension listed in the ``*_POWERS`` tables, so rescaling ``r0`` (and
every length-valued input with it) rescales column ``c`` by
``factor ** POWERS[c]``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import __version__
from .asymptotics import SPECTRUM_COLUMNS, spectrum_rows
from .background import background_fields
from .bondi import KernelPerturbation, energy_momentum
from .cmaf_flow import TRAJECTORY_COLUMNS, evolve_mode, trajectory_rows
from .errors import CmafError
from .verify import run_all

__all__ = [
    "RunConfig",
    "UsageError",
    "main",
    "BACKGROUND_POWERS",
    "TRAJECTORY_POWERS",
    "SPECTRUM_POWERS",
    "BONDI_POWERS",
    "format_float",
    "to_json",
]

BACKGROUND_POWERS = {
    "s": 1, "sbar": 1, "r": 1, "omega_sq": 0, "dr_dsbar": 0, "dr_ds": 0,
    "tr_chi_prime": -1, "tr_chibar": -1, "omega": -1, "omegabar": -1,
    "rho": -2, "mu": -2, "hawking_mass": 1,
}

# unit-amplitude data carry one power of r0, hence one more than the background
TRAJECTORY_POWERS = {
    "u": 1, "delta_f": 1, "delta_a": 0, "metric": 2, "area_radius": 1,
    "tr_chibar": -1, "chibar_hat": 1, "tr_chi_prime": -1, "chi_prime_hat": 1,
    "eta": 0, "omegabar": -1, "gauss_curvature": -2, "mu": -2, "betabar": -1,
    "rho": -2, "beta": -1, "lapse_derivative": -1,
    "closed_form_f": 1, "closed_form_a": 0, "max_residual": 0,
}

# eigendata are reported in units of r0 and so do not change with it
SPECTRUM_POWERS = {
    "l": 0, "lambda": 0, "g_caseI": 0, "k_caseI_r0": 0, "g_caseII": 0, "k_caseII_r0": 0,
    "k_over_lambda": 0,
}

BONDI_POWERS = {"c0": 1, "c": 0, "dE": 1, "dP": 1, "dMB": 1}


class UsageError(Exception):
    """Bad configuration or flags; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Run parameters; ``u_max`` defaults to ``10 r0`` once ``r0`` is known."""

    r0: float = 1.0
    l_max: int = 16
    u_max: float | None = None
    n_steps: int = 4096
    tol: float = 1e-10
    output_format: str = "csv"
    output_path: str | None = None

    def resolved(self) -> RunConfig:
        cfg = self if self.u_max is not None else replace(self, u_max=10.0 * self.r0)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for name in ("r0", "tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise UsageError(f"{name} must be a positive number")
        if self.u_max is not None and not (math.isfinite(self.u_max) and self.u_max > 0):
            raise UsageError("u_max must be a positive number")
        for name in ("l_max", "n_steps"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                raise UsageError(f"{name} must be a positive integer")
        if self.output_format not in ("csv", "json"):
            raise UsageError("output_format must be 'csv' or 'json'")

    @classmethod
    def from_json(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        if isinstance(data.get("l_max"), float) or isinstance(data.get("n_steps"), float):
            raise UsageError("l_max and n_steps must be integers")
        return cls(**data)


# formatting

def format_float(x) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not numeric output")
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite value in output")
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return "%.17g" % x


def to_json(obj) -> str:
    """JSON text with every float in ``%.17g`` form and keys in insertion order."""
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, str) or obj is None:
        return json.dumps(obj)
    return format_float(obj)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_float(v) for v in row])
    return buf.getvalue()


def _table_text(cfg: RunConfig, columns, rows, meta: dict) -> str:
    if cfg.output_format == "csv":
        return _csv_text(columns, rows)
    return to_json({**meta, "columns": list(columns), "rows": [list(r) for r in rows]}) + "\n"


def _emit(cfg: RunConfig, text: str, out) -> None:
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        out.write(text)


# commands

def cmd_background(cfg: RunConfig, s: float, sbar: float, out=sys.stdout) -> int:
    rec = background_fields(s, sbar, cfg.r0).as_dict()
    if cfg.output_format == "csv":
        text = _csv_text(list(rec), [list(rec.values())])
    else:
        text = to_json(rec) + "\n"
    _emit(cfg, text, out)
    return 0


def cmd_evolve(cfg: RunConfig, case: str, l: int, every: int = 1, figures: str | None = None,
               out=sys.stdout) -> int:
    if l < 0:
        raise UsageError("--l must be nonnegative")
    if every < 1:
        raise UsageError("--every must be positive")
    states = evolve_mode(case, l, cfg.u_max, cfg.n_steps, cfg.r0)
    keep = states[::every]
    if keep[-1] is not states[-1]:
        keep.append(states[-1])
    rows = trajectory_rows(case, l, keep, cfg.r0)
    meta = {"case": case, "l": l, "r0": cfg.r0, "u_max": cfg.u_max, "n_steps": cfg.n_steps}
    _emit(cfg, _table_text(cfg, TRAJECTORY_COLUMNS, rows, meta), out)
    if figures:
        from .plots import plot_trajectory
        plot_trajectory(rows, TRAJECTORY_COLUMNS, Path(figures) / f"evolve_case{case}_l{l}.png",
                        title=f"case {case}, l = {l}")
    return 0


def cmd_spectrum(cfg: RunConfig, l_max: int, figures: str | None = None, out=sys.stdout) -> int:
    if l_max < 1:
        raise UsageError("--l-max must be at least 1")
    rows = spectrum_rows(l_max)
    _emit(cfg, _table_text(cfg, SPECTRUM_COLUMNS, rows, {"r0": cfg.r0, "l_max": l_max}), out)
    if figures:
        from .plots import plot_spectrum
        plot_spectrum(rows, SPECTRUM_COLUMNS, Path(figures) / "spectrum.png")
    return 0


def cmd_bondi(cfg: RunConfig, case: str, c0: float, c: tuple[float, float, float],
              out=sys.stdout) -> int:
    em = energy_momentum(KernelPerturbation(c0, c, case), r0=cfg.r0)
    report = {"case": case, "c0": c0, "c": list(c), "dE": em.dE, "dP": list(em.dP), "dMB": em.dMB}
    _emit(cfg, to_json(report) + "\n", out)
    return 0


def cmd_verify(cfg: RunConfig, out=sys.stdout) -> int:
    results = run_all(cfg.r0, cfg.u_max, cfg.n_steps, cfg.tol)
    lines = [r.line() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{'PASS' if n_pass == len(results) else 'FAIL'}: {n_pass}/{len(results)} suites passed")
    _emit(cfg, "\n".join(lines) + "\n", out)
    return 0 if n_pass == len(results) else 1


# argument handling

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON file with RunConfig fields")
    g.add_argument("--r0", type=float, help="length scale, twice the mass (default 1)")
    g.add_argument("--tol", type=float, help="residual threshold for verify (default 1e-10)")
    g.add_argument("--output-format", choices=("csv", "json"), help="table format (default csv)")
    g.add_argument("--output-path", "-o", help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="cmaf", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("background", parents=[common], help="background fields at one point")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--sbar", type=float, default=0.0)

    p = sub.add_parser("evolve", parents=[common], help="one mode along the foliation")
    p.add_argument("--case", choices=("i", "ii"), required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--u-max", type=float, help="final u (default 10 r0)")
    p.add_argument("--n-steps", type=int, help="RK4 steps (default 4096)")
    p.add_argument("--every", type=int, default=1, help="write every k-th step (the last is always written)")
    p.add_argument("--figures", help="directory for PNG figures")

    p = sub.add_parser("spectrum", parents=[common], help="limit eigenvalues by degree")
    p.add_argument("--l-max", type=int, help="largest degree (default 16)")
    p.add_argument("--figures", help="directory for PNG figures")

    p = sub.add_parser("bondi", parents=[common], help="linearised energy-momentum (JSON)")
    p.add_argument("--case", choices=("i", "ii"), default="i")
    p.add_argument("--c0", type=float, default=0.0, help="constant mode amplitude (length)")
    for i in (1, 2, 3):
        p.add_argument(f"--c{i}", type=float, default=0.0, help=f"amplitude of the x^{i} harmonic")

    sub.add_parser("verify", parents=[common], help="run every invariant suite")
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    overrides = {
        "r0": args.r0,
        "tol": args.tol,
        "output_format": args.output_format,
        "output_path": args.output_path,
        "u_max": getattr(args, "u_max", None),
        "n_steps": getattr(args, "n_steps", None),
        "l_max": getattr(args, "l_max", None),
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.resolved()


def run(argv: list[str] | None = None, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        if args.command == "background":
            return cmd_background(cfg, args.s, args.sbar, out)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.case, args.l, args.every, args.figures, out)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, cfg.l_max, args.figures, out)
        if args.command == "bondi":
            return cmd_bondi(cfg, args.case, args.c0, (args.c1, args.c2, args.c3), out)
        return cmd_verify(cfg, out)
    except (UsageError, CmafError, ValueError, OSError) as exc:
        err.write(f"cmaf {args.command}: error: {exc}\n")
        return 2


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))
