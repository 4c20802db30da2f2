"""Command-line front end: one experiment spec in, a stream of JSON records out.

Examples::

    percolab analytic pstar --d 4 --k 2
    percolab exact success --graph box --n 2 --d 2 --k 2 --p 1/2
    percolab sweep corr --graph torus --d 2 --k 2 --n 16,32,64,128 --eps 0.15 \\
        --at-pc --trials 20000 --seed 11

Records go to stdout (or ``--output``) as JSON lines; logs go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from percolab import __version__, analytic, estimator, rng
from percolab.boolean_lab import (
    BootstrapOccupation,
    Majority,
    Tribes,
    as_number,
    exact_influences,
    exact_noise_correlation,
    exact_probability,
    tribes_revealment,
)
from percolab.topology import build_graph, edge_cheeger

log = logging.getLogger("percolab")

COMMANDS = ("analytic", "exact", "pc", "corr", "influence", "window", "majcov", "reveal", "sweep")
ANALYTIC = ("pstar", "yhat", "h", "R", "kk", "witness", "pcref")
EXACT = ("success", "influences", "corr")
SWEEPABLE = ("pc", "corr", "influence", "window", "majcov")
SWEEP_AXES = ("n", "p", "eps")
AT_PC_RELATIVE_PRECISION = 0.02
DEFAULT_TRIALS = {"pc": 2000, "window": 2000, "corr": 20000, "influence": 100_000,
                  "majcov": 100_000, "reveal": 100_000}
# fields that never change results and so stay out of the provenance echo
_NOT_ECHOED = ("output", "format", "workers")


class SpecError(ValueError):
    """A spec that fails validation; reported as a structured error record."""


@dataclass
class ExperimentSpec:
    command: str
    what: str | None = None
    graph: str | None = None
    n: int | None = None
    d: int | None = None
    graph_seed: int | None = None
    function: str = "bootstrap"
    m: int | None = None
    k: int | None = None
    p: str | float | None = None
    eps: str | float | None = None
    L: float | None = None
    x: int = 0
    y: str | float | None = None
    W: float | None = None
    lam: float | None = None
    h_e: str | float | None = None
    trials: int | None = None
    seed: int | None = None
    precision: float | None = None
    relative: bool = False
    target: float = 0.5
    levels: tuple = (0.25, 0.75)
    at_pc: bool = False
    pc_trials: int = 2000
    z: float = estimator.Z99
    sweep_axis: str | None = None
    sweep_values: list | None = None
    output: str | None = None
    format: str = "jsonl"
    workers: int | None = None

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key in _NOT_ECHOED:
            out.pop(key)
        out["levels"] = list(self.levels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        data = dict(data)
        if "levels" in data:
            data["levels"] = tuple(data["levels"])
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise SpecError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**data)


# -- helpers ------------------------------------------------------------------------


def jsonable(x):
    """Turn results into JSON-ready values; exact rationals become ``"num/den"``."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def _number(x):
    """Spec values may be ``"1/2"`` strings; keep rationals exact, else float."""
    return None if x is None else as_number(x)


def _real(x) -> float | None:
    return None if x is None else float(as_number(x))


def _require(spec: ExperimentSpec, *names: str):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(spec, n) is None]
    if missing:
        label = f"{spec.command} {spec.what}" if spec.what else spec.command
        raise SpecError(f"'{label}' needs {', '.join(missing)}")


def _unit_interval(name: str, value, open_ends: bool = False):
    v = float(value)
    if open_ends and not 0 < v < 1 or not 0 <= v <= 1:
        raise SpecError(f"{name} must lie in {'(0, 1)' if open_ends else '[0, 1]'}, got {value}")


def _graph(spec: ExperimentSpec):
    _require(spec, "graph", "n")
    if spec.graph == "rr":
        _require(spec, "d", "graph_seed")
    try:
        return build_graph(spec.graph, spec.n, spec.d if spec.d is not None else 2, spec.graph_seed)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def _resolve_seeds(spec: ExperimentSpec) -> ExperimentSpec:
    """Draw and announce seeds that were left out, so every record is replayable."""
    needs_seed = spec.command in ("pc", "corr", "influence", "window", "majcov", "reveal", "sweep")
    if needs_seed and spec.seed is None:
        spec = replace(spec, seed=rng.fresh_seed())
        log.warning("no --seed given; drew seed %d", spec.seed)
    if spec.graph == "rr" and spec.graph_seed is None:
        spec = replace(spec, graph_seed=rng.fresh_seed())
        log.warning("no --graph-seed given; drew graph seed %d", spec.graph_seed)
    return spec


# -- per-command runners ----------------------------------------------------------------


def _run_analytic(spec: ExperimentSpec) -> dict:
    what = spec.what
    if what == "pstar":
        _require(spec, "d", "k")
        tc = analytic.p_star(spec.d, spec.k)
        out = tc.to_dict()
        try:
            out["p_star_closed_form"] = analytic.p_star_closed_form(spec.d, spec.k)
        except ValueError:
            pass
        return out
    if what == "yhat":
        _require(spec, "p", "d", "k")
        return {"y_hat": analytic.y_hat(_real(spec.p), spec.d, spec.k)}
    if what == "h":
        _require(spec, "y", "p", "d", "k")
        return {"h": analytic.h(_number(spec.y), _number(spec.p), spec.d, spec.k)}
    if what == "R":
        _require(spec, "y", "d", "k")
        return {"R": analytic.R(_number(spec.y), spec.d, spec.k)}
    if what == "kk":
        _require(spec, "eps", "p")
        W = spec.W
        extra = {}
        if W is None:
            # weight of bootstrap occupation itself, by exact enumeration
            g = _graph(spec)
            _require(spec, "k")
            infl = exact_influences(BootstrapOccupation(g, spec.k), _real(spec.p))
            W = analytic.kk_weight(_real(spec.p), infl.influences)
            extra["influences"] = infl.influences
        return {**analytic.kk_bound(W, _real(spec.eps), _real(spec.p)).to_dict(), **extra}
    if what == "witness":
        _require(spec, "k")
        if spec.h_e is None:
            g = _graph(spec)
            h_e = edge_cheeger(g)
            d = int(g.degrees().max())
            if int(g.degrees().min()) != d:
                raise SpecError("witness bound needs a regular graph")
        else:
            _require(spec, "d")
            h_e, d = _number(spec.h_e), spec.d
        return {"h_e": h_e, "d": d, "c": analytic.witness_fraction(h_e, d, spec.k)}
    if what == "pcref":
        _require(spec, "n", "d", "k", "lam")
        return {"p_c_reference": analytic.pc_box_reference(spec.n, spec.d, spec.k, spec.lam)}
    raise SpecError(f"unknown analytic quantity {what!r}; choose from {', '.join(ANALYTIC)}")


def _function(spec: ExperimentSpec):
    if spec.function == "bootstrap":
        _require(spec, "k")
        return BootstrapOccupation(_graph(spec), spec.k)
    if spec.function == "majority":
        _require(spec, "m")
        return Majority(spec.m)
    if spec.function == "tribes":
        _require(spec, "k")
        return Tribes(spec.k)
    raise SpecError(f"unknown function {spec.function!r}")


def _with_float(value) -> dict:
    return {"value": value, "value_float": float(value)}


def _run_exact(spec: ExperimentSpec) -> dict:
    _require(spec, "p")
    f = _function(spec)
    p = _number(spec.p)
    _unit_interval("p", p)
    if spec.what == "success":
        res = exact_probability(f, p)
        return {"function": f.key(), **_with_float(res.value), "enumeration_size": res.enumeration_size}
    if spec.what == "influences":
        res = exact_influences(f, p)
        return {"function": f.key(), "influences": res.influences, "total": res.total,
                "sum_squares": res.sum_squares, "enumeration_size": res.enumeration_size}
    if spec.what == "corr":
        _require(spec, "eps")
        eps = _number(spec.eps)
        _unit_interval("eps", eps)
        res = exact_noise_correlation(f, p, eps)
        return {"function": f.key(), **_with_float(res.corr), "cov": res.cov,
                "variance": res.variance, "enumeration_size": res.enumeration_size}
    raise SpecError(f"unknown exact quantity {spec.what!r}; choose from {', '.join(EXACT)}")


def _density(spec: ExperimentSpec, g) -> tuple[float, dict]:
    """The density to run at: ``--p``, or a fresh critical-density estimate with ``--at-pc``."""
    if spec.at_pc:
        if spec.p is not None:
            raise SpecError("--at-pc and --p are mutually exclusive")
        pc = estimator.estimate_pc(g, spec.k, spec.target, AT_PC_RELATIVE_PRECISION, spec.pc_trials,
                                   spec.seed, relative=True, z=spec.z)
        return pc.p_c_hat, {"pc_search": pc}
    _require(spec, "p")
    p = _real(spec.p)
    _unit_interval("p", p)
    return p, {}


def _trials(spec: ExperimentSpec, minimum: int = 1) -> int:
    trials = spec.trials if spec.trials is not None else DEFAULT_TRIALS[spec.command]
    if trials < minimum:
        raise SpecError(f"--trials must be at least {minimum}, got {trials}")
    return trials


def _run_estimator(spec: ExperimentSpec) -> dict:
    _require(spec, "k")
    g = _graph(spec)
    cmd = spec.command
    if cmd == "pc":
        _unit_interval("target", spec.target, open_ends=True)
        precision = spec.precision if spec.precision is not None else 1e-3
        return {"pc_search": estimator.estimate_pc(g, spec.k, spec.target, precision, _trials(spec), spec.seed,
                                                    relative=spec.relative, z=spec.z)}
    if cmd == "window":
        precision = spec.precision if spec.precision is not None else 1e-3
        try:
            w = estimator.estimate_window(g, spec.k, spec.levels, precision, _trials(spec), spec.seed, spec.z)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
        return {"window": w}
    p, extra = _density(spec, g)
    if cmd == "corr":
        _require(spec, "eps")
        eps = _real(spec.eps)
        _unit_interval("eps", eps)
        est = estimator.estimate_noise_corr(g, spec.k, p, eps, _trials(spec, 2), spec.seed, spec.z)
    elif cmd == "influence":
        if not 0 <= spec.x < g.vertex_count:
            raise SpecError(f"--x must be a vertex in [0, {g.vertex_count}), got {spec.x}")
        est = estimator.estimate_influence(g, spec.k, p, spec.x, _trials(spec), spec.seed, spec.z)
    elif cmd == "majcov":
        _require(spec, "L")
        est = estimator.maj_covariance(g, spec.k, p, spec.L, _trials(spec, 2), spec.seed, spec.z)
    else:
        raise SpecError(f"unknown command {cmd!r}")
    return {**extra, "p": p, "estimate": est}


def _run_reveal(spec: ExperimentSpec) -> dict:
    _require(spec, "k")
    if spec.k < 1:
        raise SpecError("--k (tribe size) must be positive")
    m = spec.k * 2**spec.k
    exact = m <= 12 and spec.trials is None
    res = tribes_revealment(spec.k, exact=exact, trials=_trials(spec), seed=spec.seed)
    out = {"delta": res.delta, "expected_queries": res.expected_queries, "exact": res.exact, "trials": res.trials}
    if res.exact:
        out["delta_float"] = float(res.delta)
    return out


def _cells(spec: ExperimentSpec):
    if spec.what not in SWEEPABLE:
        raise SpecError(f"sweep runs one of {', '.join(SWEEPABLE)}, got {spec.what!r}")
    if spec.sweep_axis not in SWEEP_AXES:
        raise SpecError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}")
    if spec.sweep_axis == "p" and spec.at_pc:
        raise SpecError("cannot sweep p together with --at-pc")
    base = replace(spec, command=spec.what, what=None, sweep_axis=None, sweep_values=None)
    for value in spec.sweep_values:
        yield replace(base, **{spec.sweep_axis: value})


def _execute(spec: ExperimentSpec) -> dict:
    if spec.command == "analytic":
        return _run_analytic(spec)
    if spec.command == "exact":
        return _run_exact(spec)
    if spec.command == "reveal":
        return _run_reveal(spec)
    return _run_estimator(spec)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def _record(spec: ExperimentSpec, results: dict, started: str, t0: float, **extra) -> dict:
    return {
        "status": "ok",
        "spec": spec.to_dict(),
        **extra,
        "results": jsonable(results),
        "version": __version__,
        "meta": {"started": started, "finished": _now(), "wall_time_s": time.perf_counter() - t0},
    }


def error_record(spec: ExperimentSpec | None, exc: Exception) -> dict:
    return {
        "status": "error",
        "spec": spec.to_dict() if spec is not None else None,
        "error": {"type": type(exc).__name__, "message": str(exc)},
        "version": __version__,
        "meta": {"finished": _now()},
    }


def run(spec: ExperimentSpec):
    """Execute ``spec``, yielding one record per experiment cell."""
    if spec.command not in COMMANDS:
        raise SpecError(f"unknown command {spec.command!r}")
    spec = _resolve_seeds(spec)
    if spec.command == "sweep":
        for i, cell in enumerate(_cells(spec)):
            started, t0 = _now(), time.perf_counter()
            log.info("sweep cell %d: %s=%s", i, spec.sweep_axis, getattr(cell, spec.sweep_axis))
            yield _record(cell, _execute(cell), started, t0,
                          sweep={"axis": spec.sweep_axis, "index": i, "values": spec.sweep_values})
        return
    started, t0 = _now(), time.perf_counter()
    yield _record(spec, _execute(spec), started, t0)


# -- output -------------------------------------------------------------------------


def flatten(record: dict, prefix: str = "") -> dict:
    """Dotted-key flattening used for CSV output."""
    out = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(flatten(value, name + "."))
        elif isinstance(value, list):
            out.update(flatten({str(i): v for i, v in enumerate(value)}, name + "."))
        else:
            out[name] = value
    return out


def write_csv(records: list[dict], fh) -> None:
    rows = [flatten(r) for r in records]
    header: list[str] = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    writer = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


# -- argument parsing ---------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _num_list(text: str) -> list:
    # keep "1/2"-style entries as strings so exact commands stay exact
    return [v if "/" in v else float(v) for v in text.split(",") if v]


def _levels(text: str) -> tuple:
    vals = tuple(float(v) for v in text.split(","))
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("--levels takes two comma-separated values")
    return vals


def _common(parser: argparse.ArgumentParser, sweep: bool = False):
    g = parser.add_argument_group("graph")
    g.add_argument("--graph", choices=("torus", "box", "cycle", "rr"))
    g.add_argument("--n", type=_int_list if sweep else int)
    g.add_argument("--d", type=int)
    g.add_argument("--graph-seed", type=int)
    m = parser.add_argument_group("model")
    m.add_argument("--k", type=int)
    m.add_argument("--p", type=_num_list if sweep else str, help='density; rationals like "1/2" stay exact')
    m.add_argument("--eps", type=_num_list if sweep else str)
    m.add_argument("--L", type=float)
    m.add_argument("--x", type=int, default=0, help="vertex for influence estimates")
    m.add_argument("--function", choices=("bootstrap", "majority", "tribes"), default="bootstrap")
    m.add_argument("--m", type=int, help="arity of majority")
    m.add_argument("--y", type=str)
    m.add_argument("--W", type=float)
    m.add_argument("--lam", type=float)
    m.add_argument("--h-e", type=str)
    r = parser.add_argument_group("run")
    r.add_argument("--trials", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--precision", type=float)
    r.add_argument("--relative", action="store_true", help="precision relative to the bracket midpoint")
    r.add_argument("--target", type=float, default=0.5)
    r.add_argument("--levels", type=_levels, default=(0.25, 0.75))
    r.add_argument("--at-pc", action="store_true", help="estimate p_c first and run there")
    r.add_argument("--pc-trials", type=int, default=2000, help="trials per bisection step for --at-pc")
    r.add_argument("--z", type=float, default=estimator.Z99)
    r.add_argument("--workers", type=int)
    o = parser.add_argument_group("output")
    o.add_argument("--output", "-o")
    o.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    o.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="percolab", description="Bootstrap percolation experiments.")
    parser.add_argument("--version", action="version", version=f"percolab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analytic", help="closed forms and root finding")
    p.add_argument("what", choices=ANALYTIC)
    _common(p)
    p = sub.add_parser("exact", help="exact enumeration on small instances")
    p.add_argument("what", choices=EXACT)
    _common(p)
    for name, text in [("pc", "critical density by stochastic bisection"),
                       ("corr", "noise correlation"),
                       ("influence", "influence of one vertex"),
                       ("window", "transition window width"),
                       ("majcov", "covariance with a generalized majority"),
                       ("reveal", "revealment of the tribes query algorithm")]:
        _common(sub.add_parser(name, help=text))
    p = sub.add_parser("sweep", help="run an estimator over a grid of n, p or eps")
    p.add_argument("what", choices=SWEEPABLE)
    _common(p, sweep=True)
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    values = {f.name: getattr(args, f.name) for f in dataclasses.fields(ExperimentSpec) if hasattr(args, f.name)}
    values.setdefault("what", None)
    if args.command == "sweep":
        lists = {axis: values[axis] for axis in SWEEP_AXES if values.get(axis) is not None}
        multi = [axis for axis, v in lists.items() if len(v) > 1]
        if len(multi) > 1:
            raise SpecError(f"sweep varies one axis at a time, got lists for {', '.join(multi)}")
        axis = multi[0] if multi else ("n" if "n" in lists else next(iter(lists), None))
        if axis is None:
            raise SpecError("sweep needs a comma-separated --n, --p or --eps")
        for name, v in lists.items():
            values[name] = None if name == axis else v[0]
        values["sweep_axis"] = axis
        values["sweep_values"] = lists[axis]
    return ExperimentSpec(**values)


def _workers(cli_value: int | None) -> int | None:
    if cli_value is not None:
        return cli_value
    env = os.environ.get("PERCOLAB_WORKERS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SpecError(f"PERCOLAB_WORKERS must be an integer, got {env!r}") from None
    return None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    records: list[dict] = []
    spec = None
    status = 0
    try:
        spec = spec_from_args(args)
        estimator.set_workers(_workers(args.workers))
        for record in run(spec):
            if args.format == "jsonl":
                out.write(json.dumps(record) + "\n")
                out.flush()
            else:
                records.append(record)
    except (SpecError, estimator.DegenerateRegime, ValueError, RuntimeError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        err = error_record(spec, exc)
        if args.format == "jsonl":
            out.write(json.dumps(err) + "\n")
        else:
            records.append(err)
        status = 2 if isinstance(exc, SpecError) else 1
    if args.format == "csv":
        buf = io.StringIO()
        write_csv(records, buf)
        out.write(buf.getvalue())
    if out is not sys.stdout:
        out.close()
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
