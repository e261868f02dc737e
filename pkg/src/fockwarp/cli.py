"""Command-line harness: config parsing, check dispatch, report emission.

Commands:
  verify       run selected suites, write report.json, exit 0 iff all pass
  convergence  run refinement studies, write convergence.csv
  spectrum OP  dump a named operator in sparse triplet form
  commutator A B  dump the deformed commutator of two named operators

Named operators: N, P0..Pn, X0, X1..Xn (spectral), XS1..XSn (stencil),
V1..Vn, VT0..VTn, NWP1..NWPn.
"""

import argparse
import dataclasses
import datetime
import hashlib
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .lattice import LatticeSpec, build_grid
from .fock import enumerate_basis, sector_table
from .operators import (
    as_matrix,
    coordinate_op_spectral,
    coordinate_op_stencil,
    dump_triplets,
    momentum_op,
    number_op,
    nwp_op,
    tilde_velocity_op,
    time_op,
    velocity_op,
)
from .deform import deformed_commutator, validate_theta
from .checks import run_selected

DEFAULTS = {
    "n": 1,
    "M": 8,
    "L": 8.0,
    "m": 0.0,
    "N_max": 2,
    "theta": None,          # filled to the antisymmetric default for n
    "suites": ["exact"],
    "refinements": [[8, 8.0], [16, 16.0], [32, 32.0]],
    "seed": 42,
    "tol_exact": 1e-12,
    "order_threshold": 0.9,
    "output_dir": ".",
    "memory_budget": None,
}


@dataclasses.dataclass
class RunConfig:
    n: int
    M: int
    L: float
    m: float
    n_max: int
    theta: np.ndarray
    suites: list
    refinements: list
    seed: int
    tol_exact: float
    order_threshold: float
    output_dir: str
    memory_budget: int = None


def default_theta(n):
    t = np.zeros((n + 1, n + 1))
    t[0, 1], t[1, 0] = 0.1, -0.1
    return t


def parse_config(text):
    """Parse and validate a JSON config, filling defaults."""
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ValueError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    known = set(DEFAULTS) | {"N_max"}
    for key in raw:
        if key not in known:
            raise ValueError(f"unknown config key {key!r}; known keys: {', '.join(sorted(known))}")

    def take(key, cast, default):
        if key not in raw:
            return default
        try:
            return cast(raw[key])
        except (TypeError, ValueError) as exc:
            raise ValueError(f"config key {key!r}: {exc}") from exc

    n = take("n", int, DEFAULTS["n"])
    if n < 1:
        raise ValueError("config key 'n': must be >= 1")
    M = take("M", int, DEFAULTS["M"])
    L = take("L", float, DEFAULTS["L"])
    m = take("m", float, DEFAULTS["m"])
    n_max = take("N_max", int, DEFAULTS["N_max"])

    theta_raw = raw.get("theta")
    if theta_raw is None:
        theta = default_theta(n)
    else:
        theta = parse_theta_values([float(v) for v in theta_raw], n)

    suites = raw.get("suites", list(DEFAULTS["suites"]))
    if isinstance(suites, str):
        suites = [suites]
    if not (isinstance(suites, list) and all(isinstance(s, str) for s in suites)):
        raise ValueError("config key 'suites': must be a list of check or suite names")

    refinements = raw.get("refinements", [list(r) for r in DEFAULTS["refinements"]])
    refinements = validate_refinements(refinements)

    seed = take("seed", int, DEFAULTS["seed"])
    tol_exact = take("tol_exact", float, DEFAULTS["tol_exact"])
    order_threshold = take("order_threshold", float, DEFAULTS["order_threshold"])
    output_dir = take("output_dir", str, DEFAULTS["output_dir"])
    memory_budget = raw.get("memory_budget", None)
    if memory_budget is not None:
        memory_budget = int(memory_budget)

    return RunConfig(n=n, M=M, L=L, m=m, n_max=n_max, theta=theta, suites=suites,
                     refinements=refinements, seed=seed, tol_exact=tol_exact,
                     order_threshold=order_threshold, output_dir=output_dir,
                     memory_budget=memory_budget)


def parse_theta_values(values, n):
    """Flattened row-major theta -> validated (n+1) x (n+1) matrix."""
    d = n + 1
    if len(values) == 1 and values[0] == 0.0:
        return np.zeros((d, d))
    if len(values) != d * d:
        raise ValueError(
            f"config key 'theta': expected {d * d} entries for n={n} (flattened "
            f"{d}x{d}, row-major), got {len(values)}")
    t = np.array(values, dtype=float).reshape(d, d)
    try:
        validate_theta(t)
    except ValueError as exc:
        raise ValueError(f"config key 'theta': {exc}") from exc
    return t


def validate_refinements(refs):
    out = []
    for r in refs:
        if not (isinstance(r, (list, tuple)) and len(r) == 2):
            raise ValueError("config key 'refinements': entries must be (M, L) pairs")
        out.append((int(r[0]), float(r[1])))
    for a, b in zip(out, out[1:]):
        if b[0] <= a[0]:
            raise ValueError(
                f"config key 'refinements': M must be strictly increasing, got {a[0]} then {b[0]}")
    return out


def canonical_config(cfg):
    return {
        "n": cfg.n,
        "M": cfg.M,
        "L": cfg.L,
        "m": cfg.m,
        "N_max": cfg.n_max,
        "theta": [float(v) for v in np.asarray(cfg.theta).ravel()],
        "suites": list(cfg.suites),
        "refinements": [[int(M), float(L)] for M, L in cfg.refinements],
        "seed": cfg.seed,
        "tol_exact": cfg.tol_exact,
        "order_threshold": cfg.order_threshold,
        "output_dir": cfg.output_dir,
    }


def config_hash(cfg):
    blob = json.dumps(canonical_config(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _strip_volatile(result):
    out = {k: v for k, v in result.items() if k != "runtime_ms"}
    return out


def build_report(cfg, results):
    passed = sum(1 for r in results if r["pass"])
    return {
        "config": canonical_config(cfg),
        "results": [_strip_volatile(r) for r in results],
        "summary": {"passed": passed, "failed": len(results) - passed, "total": len(results)},
        "versions": {"artifact": __version__, "config_hash": config_hash(cfg)},
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def write_report(cfg, results):
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(build_report(cfg, results), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def write_convergence_csv(cfg, results):
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, "convergence.csv")
    with open(path, "w") as fh:
        fh.write("check,M,L,dp,residual,fitted_order\n")
        for r in results:
            if r["kind"] != "convergence":
                continue
            levels = r.get("levels") or [[None, None]] * len(r["residual"])
            order = r["fitted_order"]
            for (M, L), dp, res in zip(levels, r["spacings"], r["residual"]):
                fh.write(f"{r['name']},{M},{L},{dp!r},{res!r},{order!r}\n")
    return path


OP_PATTERN = re.compile(r"^(N|P(\d+)|X0|X(\d+)|XS(\d+)|V(\d+)|VT(\d+)|NWP(\d+))$")


def named_operator(name, basis, grid):
    """Build a Fock operator from its CLI name."""
    n = grid.n
    mo = OP_PATTERN.match(name)
    if not mo:
        raise ValueError(f"unknown operator name {name!r}")
    if name == "N":
        return number_op(basis)
    if name == "X0":
        return time_op(basis, grid)
    kind = name.rstrip("0123456789")
    idx = int(name[len(kind):])
    builders = {
        "P": (momentum_op, 0, n),
        "X": (coordinate_op_spectral, 1, n),
        "XS": (coordinate_op_stencil, 1, n),
        "V": (velocity_op, 1, n),
        "VT": (tilde_velocity_op, 0, n),
        "NWP": (nwp_op, 1, n),
    }
    if kind not in builders:
        raise ValueError(f"unknown operator name {name!r}")
    fn, lo, hi = builders[kind]
    if not lo <= idx <= hi:
        raise ValueError(f"operator {name!r}: index {idx} out of range [{lo}, {hi}] for n={n}")
    return fn(basis, grid, idx)


def _build_instance(cfg):
    spec = LatticeSpec(n=cfg.n, M=cfg.M, L=cfg.L, m=cfg.m)
    grid = build_grid(spec)
    kw = {} if cfg.memory_budget is None else {"memory_budget": cfg.memory_budget}
    basis = enumerate_basis(grid.size, cfg.n_max, **kw)
    sectors = sector_table(basis, grid)
    return grid, basis, sectors


def make_parser():
    p = argparse.ArgumentParser(
        prog="fockwarp",
        description="verification harness for deformed coordinate operators on a lattice Fock space")
    p.add_argument("command", choices=["verify", "convergence", "spectrum", "commutator"])
    p.add_argument("names", nargs="*", help="operator names for spectrum/commutator")
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--suite", action="append", metavar="NAME",
                   help="suite or check name (repeatable)")
    p.add_argument("--theta", metavar="CSV", help="flattened theta, row-major CSV (or a single 0)")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--refinements", metavar="M:L,M:L,...", help="refinement ladder")
    p.add_argument("--seed", type=int, metavar="INT")
    return p


def apply_flags(cfg, args):
    if args.suite:
        cfg.suites = list(args.suite)
    if args.theta is not None:
        try:
            values = [float(v) for v in args.theta.split(",") if v.strip() != ""]
        except ValueError as exc:
            raise ValueError(f"--theta: {exc}") from exc
        cfg.theta = parse_theta_values(values, cfg.n)
    if args.out is not None:
        cfg.output_dir = args.out
    if args.refinements is not None:
        pairs = []
        for tok in args.refinements.split(","):
            if ":" not in tok:
                raise ValueError(f"--refinements: expected M:L, got {tok!r}")
            a, b = tok.split(":", 1)
            pairs.append([int(a), float(b)])
        cfg.refinements = validate_refinements(pairs)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        cfg = parse_config(text)
        cfg = apply_flags(cfg, args)

        if args.command == "verify":
            results = run_selected(cfg, cfg.suites)
            path = write_report(cfg, results)
            for r in results:
                print(f"{'PASS' if r['pass'] else 'FAIL'} {r['name']}")
            print(f"report: {path}")
            return 0 if all(r["pass"] for r in results) else 1

        if args.command == "convergence":
            suites = cfg.suites if args.suite else ["convergence"]
            results = run_selected(cfg, suites)
            path = write_convergence_csv(cfg, results)
            for r in results:
                print(f"{'PASS' if r['pass'] else 'FAIL'} {r['name']}")
            print(f"table: {path}")
            return 0 if all(r["pass"] for r in results) else 1

        if args.command == "spectrum":
            if len(args.names) != 1:
                raise ValueError("spectrum needs exactly one operator name")
            grid, basis, _ = _build_instance(cfg)
            op = named_operator(args.names[0], basis, grid)
            dump_triplets(as_matrix(op), sys.stdout)
            return 0

        if args.command == "commutator":
            if len(args.names) != 2:
                raise ValueError("commutator needs exactly two operator names")
            grid, basis, sectors = _build_instance(cfg)
            a = named_operator(args.names[0], basis, grid)
            b = named_operator(args.names[1], basis, grid)
            c = deformed_commutator(a, b, cfg.theta, sectors)
            dump_triplets(c, sys.stdout)
            return 0
    except BrokenPipeError:
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except (ValueError, MemoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
