"""Command-line interface: solvers and sweeps with machine-readable output.

Every subcommand emits either JSON lines (one object per line) or CSV with a
fixed header, all floating-point values rendered with 17 significant digits
so output is byte-deterministic and round-trips exactly.  Exit codes: 0 for
success, 2 for invalid parameters (including config/flag parse problems),
3 for solver failures; oracle-compare exits 1 when all solvers ran but a
deviation exceeded its tolerance.

Boundary-condition input is either the four angles (--xi/--rho/--mu/--nu),
the eigenphase pair (--theta-plus/--theta-minus), or the raw matrix entries
(--matrix).  A key=value config file supplies defaults for any long flag;
flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import IO, Sequence

import numpy as np

from .anholonomy import PathSpec, trace_path, trajectory_shifts
from .boundary import (
    KIND_BOUND,
    KIND_POSITIVE,
    BoundaryCondition,
    boundary_residual,
    build_eigenfunction,
    current_mismatch,
    sample_eigenfunction,
)
from .errors import SolverError, ValidationError
from .isospectral import (
    SOLVER_CHANNEL,
    SOLVER_DETERMINANT,
    SOLVER_FD,
    SphereGrid,
    check_isospectral,
)
from .oracles import det_spectrum, fd_spectrum
from .spectrum import solve_spectrum
from .unitary import TWO_PI, UnitaryParams, matrix_to_params, params_to_matrix

__all__ = ["main"]

_SOLVER_ALIASES = {
    "channel": SOLVER_CHANNEL,
    "det": SOLVER_DETERMINANT,
    "determinant": SOLVER_DETERMINANT,
    "fd": SOLVER_FD,
}

_SPECTRUM_FIELDS = ("index", "channel", "kind", "k_or_kappa", "E", "degenerate")
_EIGENFUNCTION_FIELDS = ("x", "re", "im")
_ISO_FIELDS = (
    "xi", "rho", "n_levels_checked", "solver_used", "grid_points",
    "max_level_deviation", "worst_mu", "worst_nu",
)
_TRACE_FIELDS = (
    "record", "trajectory", "channel", "start_index", "end_index",
    "floored_out", "t", "E", "s_plus", "s_minus",
)
_COMPARE_FIELDS = ("level", "E_channel", "E_det", "E_fd", "delta_det", "delta_fd")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v)!r}")


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_records(out: IO[str], fmt: str, fields: Sequence[str], records) -> None:
    if fmt == "json":
        for rec in records:
            body = ", ".join(
                f"{json.dumps(k)}: {_json_value(rec[k])}" for k in fields if k in rec
            )
            out.write("{" + body + "}\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(fields)
        for rec in records:
            writer.writerow([_csv_value(rec.get(k)) for k in fields])


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    entries: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"config line is not key=value: {line!r}")
                key, _, value = line.partition("=")
                entries[key.strip().replace("_", "-")] = value.strip()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path!r}: {exc}") from exc
    return entries


class _Settings:
    """Flag values with config-file fallback and per-type coercion."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._config = _load_config(self._args.get("config"))

    def _raw(self, name: str):
        v = self._args.get(name)
        if v is not None:
            return v
        return self._config.get(name.replace("_", "-"))

    def get_float(self, name: str, default: float | None = None) -> float:
        v = self._raw(name)
        if v is None:
            if default is None:
                raise ValueError(f"missing required parameter --{name.replace('_', '-')}")
            return default
        try:
            return float(v)
        except ValueError as exc:
            raise ValueError(f"bad value for --{name.replace('_', '-')}: {v!r}") from exc

    def get_int(self, name: str, default: int | None = None) -> int:
        v = self._raw(name)
        if v is None:
            if default is None:
                raise ValueError(f"missing required parameter --{name.replace('_', '-')}")
            return default
        try:
            return int(str(v))
        except ValueError as exc:
            raise ValueError(f"bad value for --{name.replace('_', '-')}: {v!r}") from exc

    def get_str(self, name: str, default: str | None = None) -> str | None:
        v = self._raw(name)
        return default if v is None else str(v)

    def has(self, name: str) -> bool:
        return self._raw(name) is not None


def _parse_matrix(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 8:
        raise ValueError(
            "--matrix takes 8 comma-separated reals: "
            "u11re,u11im,u12re,u12im,u21re,u21im,u22re,u22im"
        )
    vals = [float(p) for p in parts]
    return np.array(
        [
            [vals[0] + 1j * vals[1], vals[2] + 1j * vals[3]],
            [vals[4] + 1j * vals[5], vals[6] + 1j * vals[7]],
        ]
    )


def _defect_input(s: _Settings) -> tuple[UnitaryParams, np.ndarray]:
    """Resolve the three mutually exclusive ways of naming the defect matrix."""
    angle_flags = s.has("xi") or s.has("rho")
    theta_flags = s.has("theta_plus") or s.has("theta_minus")
    if s.has("matrix"):
        if angle_flags or theta_flags:
            raise ValueError("--matrix conflicts with angle flags")
        u = _parse_matrix(s.get_str("matrix"))
        return matrix_to_params(u), u
    if theta_flags:
        if angle_flags:
            raise ValueError("--theta-plus/--theta-minus conflict with --xi/--rho")
        tp = s.get_float("theta_plus", 0.0)
        tm = s.get_float("theta_minus", 0.0)
        xi = (0.5 * (tp + tm)) % TWO_PI
        rho = (0.5 * (tp - tm)) % TWO_PI
    else:
        xi = s.get_float("xi", 0.0)
        rho = s.get_float("rho", 0.0)
    params = UnitaryParams(
        xi=xi, rho=rho, mu=s.get_float("mu", 0.0), nu=s.get_float("nu", 0.0)
    )
    return params, params_to_matrix(params)


def _boundary_condition(s: _Settings) -> BoundaryCondition:
    _, u = _defect_input(s)
    return BoundaryCondition(u, l=s.get_float("l", 1.0), L0=s.get_float("L0", 1.0))


def _solver_name(s: _Settings, default: str) -> str:
    raw = s.get_str("solver", default)
    if raw not in _SOLVER_ALIASES:
        raise ValueError(f"unknown solver {raw!r} (choices: channel, det, fd)")
    return _SOLVER_ALIASES[raw]


def _output_format(s: _Settings) -> str:
    fmt = s.get_str("format", "json")
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown format {fmt!r} (choices: json, csv)")
    return fmt


def _cmd_spectrum(s: _Settings, out: IO[str]) -> int:
    bc = _boundary_condition(s)
    n = s.get_int("levels", 8)
    solver = _solver_name(s, SOLVER_CHANNEL)
    records = []
    if solver == SOLVER_CHANNEL:
        levels = solve_spectrum(bc, n).levels
    elif solver == SOLVER_DETERMINANT:
        k_max = s.get_float("k_max", math.nan)
        levels = det_spectrum(bc, n, k_max=None if math.isnan(k_max) else k_max)
    else:
        fd = fd_spectrum(bc, n, n_interior=s.get_int("n_interior", 256))
        for i, e in enumerate(fd.levels):
            records.append(
                {
                    "index": i,
                    "channel": None,
                    "kind": KIND_BOUND if e < 0.0 else KIND_POSITIVE,
                    "k_or_kappa": math.sqrt(abs(e)),
                    "E": e,
                    "degenerate": False,
                }
            )
        levels = []
    for lev in levels:
        records.append(
            {
                "index": lev.index,
                "channel": lev.channel,
                "kind": lev.kind,
                "k_or_kappa": lev.k_or_kappa,
                "E": lev.E,
                "degenerate": lev.degenerate_with is not None,
            }
        )
    _write_records(out, _output_format(s), _SPECTRUM_FIELDS, records)
    return 0


def _cmd_eigenfunction(s: _Settings, out: IO[str]) -> int:
    bc = _boundary_condition(s)
    index = s.get_int("index", 0)
    if index < 0:
        raise ValueError("--index must be nonnegative")
    samples = s.get_int("samples", 200)
    if samples < 4:
        raise ValueError("--samples must be at least 4")
    level = solve_spectrum(bc, index + 1).levels[index]
    f = build_eigenfunction(bc, level)

    m = samples // 2
    left = np.linspace(-bc.l, 0.0, m, endpoint=False)
    right = np.linspace(bc.l, 0.0, m, endpoint=False)[::-1]
    grid = np.concatenate([left, right])
    values = sample_eigenfunction(f, grid)

    fmt = _output_format(s)
    if fmt == "json":
        v = f.boundary_vectors()
        meta = {
            "record": "level",
            "index": level.index,
            "channel": level.channel,
            "kind": level.kind,
            "k_or_kappa": level.k_or_kappa,
            "E": level.E,
            "degenerate": f.degenerate,
            "residual": boundary_residual(bc, v),
            "current_mismatch": current_mismatch(v),
        }
        body = ", ".join(f"{json.dumps(k)}: {_json_value(val)}" for k, val in meta.items())
        out.write("{" + body + "}\n")
    rows = [
        {"x": float(x), "re": float(val.real), "im": float(val.imag)}
        for x, val in zip(grid, values)
    ]
    _write_records(out, fmt, _EIGENFUNCTION_FIELDS, rows)
    return 0


def _cmd_isospectral(s: _Settings, out: IO[str]) -> int:
    xi = s.get_float("xi", 0.0)
    rho = s.get_float("rho", 0.0)
    grid = SphereGrid.default(
        n_mu_interior=s.get_int("grid_mu", 8), n_nu=s.get_int("grid_nu", 8)
    )
    report = check_isospectral(
        (xi, rho),
        grid,
        n_levels=s.get_int("levels", 8),
        solver=_solver_name(s, SOLVER_DETERMINANT),
        l=s.get_float("l", 1.0),
        L0=s.get_float("L0", 1.0),
        n_interior=s.get_int("n_interior", 256),
    )
    record = {
        "xi": report.base_params.xi,
        "rho": report.base_params.rho,
        "n_levels_checked": report.n_levels_checked,
        "solver_used": report.solver_used,
        "grid_points": len(grid),
        "max_level_deviation": report.max_level_deviation,
        "worst_mu": report.worst_point[0],
        "worst_nu": report.worst_point[1],
    }
    _write_records(out, _output_format(s), _ISO_FIELDS, [record])
    return 0


def _cmd_trace(s: _Settings, out: IO[str]) -> int:
    params, _ = _defect_input(s)
    winding = (s.get_int("w_plus", 0), s.get_int("w_minus", 0))
    path = PathSpec(
        winding=winding,
        base=params,
        n_steps=s.get_int("steps", 256),
        levels_tracked=s.get_int("tracked", 8),
        l=s.get_float("l", 1.0),
        L0=s.get_float("L0", 1.0),
    )
    trajectories = trace_path(path)
    s_plus, s_minus = trajectory_shifts(trajectories, winding)

    records = []
    for i, tr in enumerate(trajectories):
        records.append(
            {
                "record": "trajectory",
                "trajectory": i,
                "channel": tr.channel,
                "start_index": tr.start_index,
                "end_index": tr.end_index,
                "floored_out": tr.floored_out,
            }
        )
        for t, e in zip(tr.t_values, tr.E_values):
            records.append(
                {"record": "point", "trajectory": i, "t": float(t), "E": float(e)}
            )
    records.append({"record": "summary", "s_plus": s_plus, "s_minus": s_minus})
    _write_records(out, _output_format(s), _TRACE_FIELDS, records)
    return 0


def _cmd_oracle_compare(s: _Settings, out: IO[str]) -> int:
    bc = _boundary_condition(s)
    n = s.get_int("levels", 8)
    tol_det = s.get_float("tol_det", 1e-9)
    tol_fd = s.get_float("tol_fd", 5e-3)
    e_channel = [lev.E for lev in solve_spectrum(bc, n).levels]
    e_det = [lev.E for lev in det_spectrum(bc, n)]
    e_fd = fd_spectrum(bc, n, n_interior=s.get_int("n_interior", 256)).levels

    ok = True
    records = []
    for i in range(n):
        delta_det = abs(e_channel[i] - e_det[i])
        delta_fd = abs(e_channel[i] - e_fd[i]) / (1.0 + abs(e_channel[i]))
        ok = ok and delta_det <= tol_det and delta_fd <= tol_fd
        records.append(
            {
                "level": i,
                "E_channel": e_channel[i],
                "E_det": e_det[i],
                "E_fd": e_fd[i],
                "delta_det": delta_det,
                "delta_fd": delta_fd,
            }
        )
    _write_records(out, _output_format(s), _COMPARE_FIELDS, records)
    return 0 if ok else 1


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "eigenfunction": _cmd_eigenfunction,
    "isospectral": _cmd_isospectral,
    "trace": _cmd_trace,
    "oracle-compare": _cmd_oracle_compare,
}


def _add_common(sp: argparse.ArgumentParser, *, matrix: bool = True) -> None:
    sp.add_argument("--xi", type=float, help="overall phase angle (radians)")
    sp.add_argument("--rho", type=float, help="eigenphase half-difference (radians)")
    sp.add_argument("--mu", type=float, help="frame polar angle (radians)")
    sp.add_argument("--nu", type=float, help="frame azimuthal angle (radians)")
    sp.add_argument("--theta-plus", type=float, dest="theta_plus",
                    help="plus-channel eigenphase; sets xi/rho together with --theta-minus")
    sp.add_argument("--theta-minus", type=float, dest="theta_minus",
                    help="minus-channel eigenphase")
    if matrix:
        sp.add_argument("--matrix", type=str,
                        help="defect matrix as 8 comma-separated reals (row-major re,im)")
    sp.add_argument("--l", type=float, help="half-width of the box (default 1)")
    sp.add_argument("--L0", type=float, help="boundary length constant (default 1)")
    sp.add_argument("--format", type=str, choices=("json", "csv"),
                    help="output format (default json)")
    sp.add_argument("--output", type=str, help="write to this path instead of stdout")
    sp.add_argument("--config", type=str, help="key=value file supplying flag defaults")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="defectline",
        description="Spectra of a particle in a box with one point defect labeled by U(2).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="lowest levels of one boundary condition")
    _add_common(sp)
    sp.add_argument("-n", "--levels", type=int, dest="levels", help="level count (default 8)")
    sp.add_argument("--solver", type=str, help="channel | det | fd (default channel)")
    sp.add_argument("--n-interior", type=int, dest="n_interior",
                    help="fd grid cells per side (default 256)")
    sp.add_argument("--k-max", type=float, dest="k_max",
                    help="hard scan ceiling for the det solver")

    sp = sub.add_parser("eigenfunction", help="sample one eigenfunction on a grid")
    _add_common(sp)
    sp.add_argument("--index", type=int, help="level index in the merged spectrum (default 0)")
    sp.add_argument("--samples", type=int,
                    help="total sample count, split over the two sides (default 200)")

    sp = sub.add_parser("isospectral", help="sweep the conjugation-frame sphere")
    _add_common(sp, matrix=False)
    sp.add_argument("-n", "--levels", type=int, dest="levels", help="level count (default 8)")
    sp.add_argument("--solver", type=str, help="channel | det | fd (default det)")
    sp.add_argument("--n-interior", type=int, dest="n_interior",
                    help="fd grid cells per side (default 256)")
    sp.add_argument("--grid-mu", type=int, dest="grid_mu",
                    help="interior polar points between the poles (default 8)")
    sp.add_argument("--grid-nu", type=int, dest="grid_nu",
                    help="azimuthal points (default 8)")

    sp = sub.add_parser("trace", help="continue levels around a closed eigenphase loop")
    _add_common(sp)
    sp.add_argument("--w-plus", type=int, dest="w_plus",
                    help="winding of theta_plus (default 0)")
    sp.add_argument("--w-minus", type=int, dest="w_minus",
                    help="winding of theta_minus (default 0)")
    sp.add_argument("--steps", type=int, help="base step count, at least 64 (default 256)")
    sp.add_argument("--tracked", type=int, help="levels to track (default 8)")

    sp = sub.add_parser("oracle-compare", help="channel vs determinant vs fd on one system")
    _add_common(sp)
    sp.add_argument("-n", "--levels", type=int, dest="levels", help="level count (default 8)")
    sp.add_argument("--n-interior", type=int, dest="n_interior",
                    help="fd grid cells per side (default 256)")
    sp.add_argument("--tol-det", type=float, dest="tol_det",
                    help="absolute channel/det tolerance (default 1e-9)")
    sp.add_argument("--tol-fd", type=float, dest="tol_fd",
                    help="relative channel/fd tolerance (default 5e-3)")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        settings = _Settings(args)
        handler = _HANDLERS[args.command]
        path = settings.get_str("output")
        if path is None:
            return handler(settings, sys.stdout)
        with open(path, "w", encoding="utf-8", newline="") as out:
            return handler(settings, out)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
