"""Command-line driver for single experiments and the benchmark suites.

Experiment files are INI documents with four sections::

    [obstacle]
    kind = kite2d
    M = 720

    [problem]
    k = 5.0
    alpha = 0.0 1.0          ; 3D problems may give theta/phi (radians) instead

    [solver]
    epsilon = 1e-4
    L = 5
    J = 1
    N_max = 20000
    seed = 1

    [outputs]
    coefficients = true
    residual_history = true
    field_grid = -3,3,-3,3
    field_resolution = 101
    farfield = 360

Exit codes: 0 converged, 1 configuration error, 2 solver failure,
3 not converged (artifacts are still written).
"""

import argparse
import configparser
import csv
import io
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import field as fieldmod
from . import geometry, mrc

__all__ = [
    "ExperimentSpec",
    "ConfigError",
    "parse_spec",
    "format_spec",
    "load_spec",
    "run",
    "suite",
    "suite_specs",
    "main",
]

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_UNCONVERGED = 0, 1, 2, 3

_OUTPUT_KEYS = {
    "report": bool,
    "coefficients": bool,
    "residual_history": bool,
    "field_grid": str,
    "field_resolution": int,
    "farfield": int,
}
_SOLVER_CASTS = {
    "epsilon": float, "L": int, "J": int, "N_max": int, "w_min": float, "seed": int,
    "mode": str, "sampler": str, "radial_fraction": float, "clearance": float, "scale": float, "relative_cutoff": bool,
    "stagnation_window": int, "stagnation_rtol": float,
}


class ConfigError(ValueError):
    """Invalid experiment description."""


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    M: int
    k: float
    params: dict = field(default_factory=dict)
    alpha: Optional[tuple] = None
    angles: Optional[tuple] = None
    solver: mrc.SolverConfig = field(default_factory=mrc.SolverConfig)
    outputs: dict = field(default_factory=lambda: {"report": True})
    name: str = "experiment"

    def problem(self):
        if self.angles is not None:
            return mrc.ScatterProblem.from_angles(self.k, *self.angles)
        return mrc.ScatterProblem(self.k, self.alpha)

    def surface(self):
        return geometry.make_obstacle(self.kind, self.params, self.M)


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _cast(kind, text):
    return _bool(text) if kind is bool else kind(text)


def _reject_unknown(section, keys, allowed):
    extra = set(keys) - set(allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(extra))}")


def parse_spec(text, name="experiment"):
    """Parse INI text into a validated :class:`ExperimentSpec`."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    _reject_unknown("file", cp.sections(), ("obstacle", "problem", "solver", "outputs"))
    for required in ("obstacle", "problem"):
        if required not in cp:
            raise ConfigError(f"missing section [{required}]")
    try:
        obs = dict(cp["obstacle"])
        kind = obs.pop("kind", None)
        if kind not in geometry.KINDS:
            raise ConfigError(f"obstacle.kind: unknown obstacle kind {kind!r}")
        M = int(obs.pop("M"))
        params = {key: float(val) for key, val in obs.items()}
        geometry.make_obstacle(kind, params, M)

        prob = dict(cp["problem"])
        _reject_unknown("problem", prob, ("k", "alpha", "theta", "phi"))
        k = float(prob["k"])
        alpha = angles = None
        if "alpha" in prob:
            alpha = tuple(float(v) for v in prob["alpha"].replace(",", " ").split())
        elif "theta" in prob and "phi" in prob:
            angles = (float(prob["theta"]), float(prob["phi"]))
        else:
            raise ConfigError("problem needs alpha or theta/phi")

        solver_kw = {}
        if "solver" in cp:
            sec = dict(cp["solver"])
            _reject_unknown("solver", sec, _SOLVER_CASTS)
            solver_kw = {key: _cast(_SOLVER_CASTS[key], val) for key, val in sec.items()}
        solver = mrc.SolverConfig(**solver_kw)

        outputs = {"report": True}
        if "outputs" in cp:
            sec = dict(cp["outputs"])
            _reject_unknown("outputs", sec, _OUTPUT_KEYS)
            outputs.update({key: _cast(_OUTPUT_KEYS[key], val) for key, val in sec.items()})
        spec = ExperimentSpec(kind, M, k, params, alpha, angles, solver, outputs, name)
        problem = spec.problem()
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    if problem.dimension != geometry.make_obstacle(kind, params, M).dimension:
        raise ConfigError("problem and obstacle dimensions differ")
    return spec


def format_spec(spec):
    """Serialize a spec to INI text accepted by :func:`parse_spec`."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp["obstacle"] = {"kind": spec.kind, "M": str(spec.M),
                      **{key: repr(val) for key, val in spec.params.items()}}
    prob = {"k": repr(spec.k)}
    if spec.angles is not None:
        prob.update(theta=repr(spec.angles[0]), phi=repr(spec.angles[1]))
    else:
        prob["alpha"] = " ".join(repr(a) for a in spec.alpha)
    cp["problem"] = prob
    defaults = mrc.SolverConfig()
    cp["solver"] = {key: (repr(val) if isinstance(val, float) else str(val))
                    for key, val in asdict(spec.solver).items()
                    if val is not None and val != getattr(defaults, key) or key in ("seed",)}
    cp["outputs"] = {key: str(val) for key, val in spec.outputs.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def load_spec(path):
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), name=path.stem)


def _alpha_label(spec):
    if spec.angles is not None:
        return f"({spec.angles[0]:.6g};{spec.angles[1]:.6g})"
    return "(" + ";".join(f"{a:.6g}" for a in spec.alpha) + ")"


def _write_outputs(spec, problem, surface, expansion, report, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / spec.name
    outs = spec.outputs
    if outs.get("coefficients"):
        mrc.write_coefficients(expansion, f"{stem}_coefficients.csv", report.iterations)
    if outs.get("residual_history"):
        with open(f"{stem}_residuals.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "residual"])
            for i, r in enumerate(report.residual_history, start=1):
                writer.writerow([i, repr(r)])
    if outs.get("field_grid"):
        bounds = [float(v) for v in outs["field_grid"].split(",")]
        pts = fieldmod.grid_points(bounds, outs.get("field_resolution", 51))
        outside = ~geometry.contains(surface, pts)
        vals = np.full(len(pts), np.nan + 1j * np.nan)
        vals[outside] = fieldmod.scattered_field(expansion, pts[outside])
        fieldmod.write_field_csv(f"{stem}_field.csv", pts, vals)
    if outs.get("farfield"):
        ff = fieldmod.farfield(expansion, direction_set(problem.dimension, outs["farfield"]))
        fieldmod.write_farfield_csv(f"{stem}_farfield.csv", ff)


def direction_set(dim, n):
    """n equispaced planar directions, or n spherical Fibonacci directions."""
    if dim == 2:
        t = 2 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(t), np.sin(t)])
    return geometry.fibonacci_sphere(n)


def run(spec, out_dir=".", stream=None):
    """Solve one experiment, write its artifacts and print a summary line.

    Returns ``(exit_code, report)``; report is None on solver failure.
    """
    stream = stream or sys.stdout
    problem = spec.problem()
    surface = spec.surface()
    try:
        expansion, report = mrc.solve(problem, surface, spec.solver)
    except mrc.SolverError as exc:
        print(f"{spec.name}: solver failure: {exc}", file=stream)
        return EXIT_SOLVER, None
    _write_outputs(spec, problem, surface, expansion, report, out_dir)
    if spec.outputs.get("report", True):
        print(f"{spec.kind} k={spec.k:g} alpha={_alpha_label(spec)} "
              f"r_min={report.final_residual:.3e} N_iter={report.iterations} "
              f"time={report.wall_time:.1f}s", file=stream)
    return (EXIT_OK if report.converged else EXIT_UNCONVERGED), report


TABLE1_OBSTACLES = [
    ("I", "ellipse2d", {"a": 2.0, "b": 1.0}),
    ("II", "kite2d", {}),
    ("III", "triangle2d", {}),
    ("IV", "ellipse2d", {"a": 0.1, "b": 1.0}),
]

# (experiment, kind, M, k, direction label, reference r_min, reference N_iter)
TABLE2_ROWS = [
    ("I", "sphere3d", 450, 1.0, 1, 0.0002, 1),
    ("I", "sphere3d", 450, 5.0, 1, 0.001, 700),
    ("II", "cube3d", 1350, 1.0, 1, 0.001, 800),
    ("II", "cube3d", 1350, 1.0, 2, 0.001, 200),
    ("II", "cube3d", 1350, 5.0, 1, 0.0035, 2000),
    ("II", "cube3d", 1350, 5.0, 2, 0.002, 2000),
    ("III", "ellipsoid3d", 450, 1.0, 1, 0.001, 3600),
    ("III", "ellipsoid3d", 450, 1.0, 2, 0.001, 3000),
    ("III", "ellipsoid3d", 450, 5.0, 1, 0.0026, 5000),
    ("III", "ellipsoid3d", 450, 5.0, 2, 0.001, 5000),
]
TABLE2_ANGLES = {1: (0.0, np.pi / 2), 2: (np.pi / 2, np.pi / 4)}


def suite_specs(name, seed=1):
    """Canonical experiment list of a suite as ``(row label, spec)`` pairs."""
    rows = []
    if name == "table1":
        for exp, kind, params in TABLE1_OBSTACLES:
            for k in (1.0, 5.0):
                for alpha in ((1.0, 0.0), (0.0, 1.0)):
                    idx = len(rows)
                    solver = mrc.SolverConfig(epsilon=1e-4, L=5, J=1, N_max=20000,
                                              w_min=1e-12, seed=seed ^ idx)
                    spec = ExperimentSpec(kind, 720, k, dict(params), alpha=alpha, solver=solver,
                                          outputs={"report": False}, name=f"table1_{idx:02d}")
                    rows.append(((exp, f"{k:.1f}", f"({alpha[0]:.1f},{alpha[1]:.1f})"), spec))
    elif name == "table2":
        for idx, (exp, kind, M, k, dlabel, r_ref, n_ref) in enumerate(TABLE2_ROWS):
            solver = mrc.SolverConfig(epsilon=r_ref, L=0, J=80, N_max=4 * n_ref,
                                      w_min=1e-12, seed=seed ^ idx)
            spec = ExperimentSpec(kind, M, k, angles=TABLE2_ANGLES[dlabel], solver=solver,
                                  outputs={"report": False}, name=f"table2_{idx:02d}")
            rows.append(((exp, f"{k:.1f}", f"({dlabel})"), spec))
    else:
        raise ConfigError(f"unknown suite {name!r}")
    return rows


def suite(name, seed=1, out_dir=".", stream=None):
    """Run a suite and write ``<name>.csv`` plus ``<name>_timing.csv``.

    The results file holds only seed-determined values, so reruns with the
    same seed reproduce it byte for byte; wall times live in the timing file.
    """
    stream = stream or sys.stdout
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = suite_specs(name, seed)
    header = (["experiment", "J", "k", "alpha", "r_min", "N_iter", "converged", "seed"]
              if name == "table1" else
              ["experiment", "k", "alpha_i", "r_min", "N_iter", "converged", "seed"])
    results = out_dir / f"{name}.csv"
    timing = out_dir / f"{name}_timing.csv"
    with open(results, "w", newline="", encoding="utf-8") as fh, \
            open(timing, "w", newline="", encoding="utf-8") as th:
        writer, twriter = csv.writer(fh), csv.writer(th)
        writer.writerow(header)
        twriter.writerow(["row", "wall_time_s"])
        for i, ((exp, k, alpha), spec) in enumerate(specs):
            code, report = run(spec, out_dir, stream)
            if report is None:
                cells = ["nan", "0", "false"]
                wall = float("nan")
            else:
                cells = [f"{report.final_residual:.6e}", str(report.iterations),
                         str(report.converged).lower()]
                wall = report.wall_time
            prefix = [exp, str(spec.solver.J), k, alpha] if name == "table1" else [exp, k, alpha]
            writer.writerow(prefix + cells + [str(spec.solver.seed)])
            fh.flush()
            twriter.writerow([i, f"{wall:.3f}"])
            print(f"{name} row {i}: {exp} k={k} alpha={alpha} " + " ".join(cells[:2])
                  + f" ({wall:.1f}s)", file=stream)
    return results


def _field_command(args):
    expansion = mrc.read_coefficients(args.coefficients)
    bounds = [float(v) for v in args.grid.split(",")]
    if len(bounds) != 2 * expansion.dimension:
        raise ConfigError("grid needs two bounds per dimension")
    pts = fieldmod.grid_points(bounds, args.res)
    fieldmod.write_field_csv(args.out, pts, fieldmod.scattered_field(expansion, pts))
    return EXIT_OK


def _farfield_command(args):
    expansion = mrc.read_coefficients(args.coefficients)
    ff = fieldmod.farfield(expansion, direction_set(expansion.dimension, args.ndir))
    fieldmod.write_farfield_csv(args.out, ff)
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(prog="mrcscatter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="solve one experiment file")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=".")
    p_suite = sub.add_parser("suite", help="run a benchmark suite")
    p_suite.add_argument("name", choices=["table1", "table2"])
    p_suite.add_argument("--seed", type=int, default=1)
    p_suite.add_argument("--out", default=".")
    p_field = sub.add_parser("field", help="evaluate the scattered field on a grid")
    p_field.add_argument("coefficients")
    p_field.add_argument("--grid", required=True)
    p_field.add_argument("--res", type=int, default=51)
    p_field.add_argument("--out", default="field.csv")
    p_ff = sub.add_parser("farfield", help="evaluate the scattering amplitude")
    p_ff.add_argument("coefficients")
    p_ff.add_argument("--ndir", type=int, default=360)
    p_ff.add_argument("--out", default="farfield.csv")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING)
    try:
        if args.command == "run":
            code, _ = run(load_spec(args.config), args.out)
            return code
        if args.command == "suite":
            suite(args.name, args.seed, args.out)
            return EXIT_OK
        if args.command == "field":
            return _field_command(args)
        return _farfield_command(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
