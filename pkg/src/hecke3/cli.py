"""Command-line interface: ``hecke3 {basis,certify,classify,rep,schur}``.

Exit codes: 0 pass, 1 fail, 2 basis enumeration failure, 3 reduction stuck,
4 usage error.  ``HECKE3_SEED`` overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from . import __version__
from .heckealg import PRIMES_62, ImpossibleCount, enumerate_basis, structure_matrices, verify_relations
from .reps import (RepError, UndefinedDenominator, build_rep, central_scalar, classify, criterion,
                   load_rep, spec_from_text, tuba_wenzl_form)
from .rewrite import ReductionStuck

EXIT_PASS, EXIT_FAIL, EXIT_ENUM, EXIT_STUCK, EXIT_USAGE = 0, 1, 2, 3, 4
COMMANDS = ("basis", "certify", "classify", "rep", "schur")
DEFAULT_OUT = {"basis": "basis.json", "certify": "certification.json",
               "classify": "classification.json", "rep": "matrices.json", "schur": None}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    k: int
    mode: str = "symbolic"
    primes: List[int] = field(default_factory=list)
    trials: int = 5
    seed: int = 0
    jobs: int = 1
    out: Optional[str] = None
    eigs: Optional[str] = None
    root: Optional[str] = None
    matrices: Optional[str] = None
    tuba_wenzl: bool = False
    structure_dir: Optional[str] = None
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.k not in (2, 3, 4, 5):
            raise UsageError(f"k must be in 2..5, got {self.k}")

    def meta(self, wall_time: float) -> Dict[str, Any]:
        return {"version": __version__, "command": self.command, "k": self.k, "seed": self.seed,
                "mode": self.mode, "wall_time": round(wall_time, 3)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hecke3", description="Generic Hecke algebras of B3 quotients: bases, "
                "freeness certificates and low-dimensional representations.")
    p.add_argument("--version", action="version", version=f"hecke3 {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("basis", help="write the basis word list")
    common(sp)

    sp = sub.add_parser("certify", help="verify the structure matrices")
    common(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--symbolic", action="store_true", help="exact check over the coefficient ring (default)")
    g.add_argument("--modp", action="store_true", help="randomized check at points mod 62-bit primes")
    sp.add_argument("--primes", default="3",
                    help="number of built-in primes, or a comma-separated list of primes")
    sp.add_argument("--trials", type=int, default=5, help="random points per prime")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.add_argument("--structure-dir", default=None,
                    help="also write structure_<g>.json sparse triplet files here (symbolic mode)")

    for name, hlp in (("classify", "evaluate the irreducibility criterion"),
                      ("rep", "write (or verify) the matrices of a representation"),
                      ("schur", "print the criterion values only")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--eigs", required=name != "rep", default=None,
                        help="comma-separated eigenvalues: p/q, p/q+r/s*i, or decimals for float mode")
        sp.add_argument("--root", default=None,
                        help="k=4: + or - (sign of r) or an explicit r; k=5: branch index or explicit root")
        sp.add_argument("--matrices", default=None, help="matrices.json to load and verify")
        if name == "rep":
            sp.add_argument("--tuba-wenzl", action="store_true", help="k=3: also emit the triangular forms")
    return p


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    seed = ns.seed
    env = os.environ.get("HECKE3_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError as exc:
            raise UsageError(f"HECKE3_SEED must be an integer, got {env!r}") from exc
    cfg = RunConfig(command=ns.command, k=ns.k, seed=seed, out=ns.out, verbose=ns.verbose)
    if ns.command == "certify":
        cfg.mode = "modp" if ns.modp else "symbolic"
        cfg.trials = ns.trials
        cfg.jobs = max(1, ns.jobs)
        cfg.structure_dir = ns.structure_dir
        if cfg.structure_dir and cfg.mode != "symbolic":
            raise UsageError("--structure-dir needs --symbolic")
        try:
            if "," in ns.primes or int(ns.primes) > len(PRIMES_62):
                cfg.primes = [int(x) for x in ns.primes.split(",") if x.strip()]
            else:
                cfg.primes = list(PRIMES_62[:int(ns.primes)])
        except ValueError as exc:
            raise UsageError(f"bad --primes {ns.primes!r}") from exc
        if cfg.trials < 1 or not cfg.primes:
            raise UsageError("need at least one prime and one trial")
    elif ns.command in ("classify", "rep", "schur"):
        cfg.mode = "exact"
        cfg.eigs, cfg.root, cfg.matrices = ns.eigs, ns.root, ns.matrices
        cfg.tuba_wenzl = getattr(ns, "tuba_wenzl", False)
    else:
        cfg.mode = "enumerate"
    return cfg


def _write(path: Optional[str], payload: Dict[str, Any]) -> None:
    if path is None:
        return
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out(cfg: RunConfig) -> Optional[str]:
    return cfg.out if cfg.out is not None else DEFAULT_OUT[cfg.command]


# ---------------------------------------------------------------------------

def cmd_basis(cfg: RunConfig) -> int:
    t0 = time.time()
    try:
        basis = enumerate_basis(cfg.k, cfg.seed)
    except ImpossibleCount as exc:
        print(f"basis enumeration failed: {exc}", file=sys.stderr)
        return EXIT_ENUM
    payload = basis.to_json()
    # no wall time in the file: the basis file is meant to be byte-identical across runs
    payload["meta"] = {k: v for k, v in cfg.meta(0.0).items() if k != "wall_time"}
    _write(_out(cfg), payload)
    print(f"k={cfg.k}: {len(basis)} basis words ({time.time() - t0:.2f} s)")
    return EXIT_PASS


def cmd_certify(cfg: RunConfig) -> int:
    t0 = time.time()
    try:
        report = verify_relations(cfg.k, cfg.mode, cfg.primes, cfg.trials, cfg.seed, cfg.jobs)
    except ImpossibleCount as exc:
        print(f"basis enumeration failed: {exc}", file=sys.stderr)
        return EXIT_ENUM
    except ReductionStuck as exc:
        print(f"reduction stuck: {exc}", file=sys.stderr)
        if exc.trace is not None:
            print(json.dumps(exc.trace.to_json(), indent=2), file=sys.stderr)
        return EXIT_STUCK
    payload = report.to_json()
    payload["meta"] = cfg.meta(time.time() - t0)
    _write(_out(cfg), payload)
    if cfg.structure_dir and report.passed:
        _write_structure(cfg)
    verdict = "PASS" if report.passed else "FAIL"
    where = f" over {report.ring}" if report.ring else ""
    print(f"k={cfg.k} {cfg.mode}{where}: {verdict} ({payload['meta']['wall_time']} s)")
    for name, c in report.checks.items():
        print(f"  {name:17s} {'ok' if c.passed else 'FAIL'}  {c.detail}")
    if not report.passed:
        print(f"first failure: {json.dumps(report.first_failure(), default=str)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


def structure_filename(generator: str) -> str:
    """structure_s1.json, structure_s1inv.json, ..."""
    return f"structure_{generator.replace('^-1', 'inv')}.json"


def _write_structure(cfg: RunConfig) -> None:
    os.makedirs(cfg.structure_dir, exist_ok=True)
    for name, m in structure_matrices(cfg.k).items():
        payload = m.to_json()
        payload["meta"] = {k: v for k, v in cfg.meta(0.0).items() if k != "wall_time"}
        _write(os.path.join(cfg.structure_dir, structure_filename(name)), payload)


def _spec(cfg: RunConfig):
    if cfg.eigs is None:
        raise UsageError("--eigs is required")
    try:
        return spec_from_text(cfg.k, cfg.eigs, cfg.root)
    except RepError as exc:
        raise UsageError(str(exc)) from exc


def cmd_classify(cfg: RunConfig) -> int:
    t0 = time.time()
    spec = _spec(cfg)
    rep = load_rep(cfg.k, cfg.matrices, spec.lams, spec.root) if cfg.matrices else None
    res = classify(spec, rep)
    payload = res.to_json()
    payload["meta"] = cfg.meta(time.time() - t0)
    _write(_out(cfg), payload)
    print(f"k={cfg.k}: {res.verdict} (criterion = {spec.F.text(res.criterion.value)})")
    if res.commutant_dim is not None:
        print(f"  commutant dimension {res.commutant_dim}, algebra dimension {res.algebra_dim}/{cfg.k ** 2}")
    for n in res.notes:
        print(f"  {n}")
    return EXIT_PASS


def cmd_schur(cfg: RunConfig) -> int:
    spec = _spec(cfg)
    crit = criterion(spec)
    payload = crit.to_json()
    print(json.dumps(payload, indent=2, sort_keys=True))
    if cfg.out:
        payload["meta"] = cfg.meta(0.0)
        _write(cfg.out, payload)
    return EXIT_PASS


def cmd_rep(cfg: RunConfig) -> int:
    t0 = time.time()
    if cfg.matrices:
        spec = _spec(cfg) if cfg.eigs else None
        try:
            rep = load_rep(cfg.k, cfg.matrices, spec.lams if spec else None, spec.root if spec else None)
        except RepError as exc:
            print(f"verification FAILED: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        if cfg.k in (4, 5) and rep.spec.root is None:
            raise UsageError(f"k = {cfg.k} needs --root (with --eigs) to evaluate the criterion")
        res = classify(rep.spec, rep)
        payload = rep.to_json()
        payload["verification"] = {"braid_relation": True, "spectrum": True,
                                   "commutant_dim": res.commutant_dim, "algebra_dim": res.algebra_dim,
                                   "irreducible": res.rep_irreducible, "verdict": "PASS"}
        print(f"k={cfg.k}: supplied matrices verified (ABA = BAB, spectrum matches); "
              f"commutant {res.commutant_dim}, algebra dimension {res.algebra_dim}/{cfg.k ** 2}")
    else:
        if cfg.k == 5:
            raise UsageError("k = 5 has no built-in matrices; pass --matrices")
        spec = _spec(cfg)
        res = classify(spec)
        if res.verdict == "UNDEFINED_DENOMINATOR":
            print(f"UNDEFINED_DENOMINATOR: {res.undefined} vanishes", file=sys.stderr)
            return EXIT_FAIL
        if res.verdict != "IRREDUCIBLE_EXISTS":
            print(f"{res.verdict}: vanishing factors {res.criterion.zero_factors}", file=sys.stderr)
            return EXIT_FAIL
        try:
            rep = build_rep(spec)
        except UndefinedDenominator as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_FAIL
        payload = rep.to_json()
        payload["central_scalar"] = spec.F.text(central_scalar(rep))
        print(f"k={cfg.k}: A = {payload['A']}")
        print(f"      B = {payload['B']}")
    if cfg.tuba_wenzl:
        if cfg.k != 3:
            raise UsageError("--tuba-wenzl needs k = 3")
        try:
            tw = tuba_wenzl_form(rep)
        except RepError as exc:
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        payload["tuba_wenzl"] = tw.to_json(rep.F)
        c = tw.conjugator
        print(f"  det D = {rep.F.text(c.det)}; D^-1 A D {c.shape_A}, D^-1 B D {c.shape_B}")
        if tw.ordered:
            print(f"  ordered form: A {tw.ordered.shape_A}, B {tw.ordered.shape_B}")
    payload["meta"] = cfg.meta(time.time() - t0)
    _write(_out(cfg), payload)
    return EXIT_PASS


HANDLERS = {"basis": cmd_basis, "certify": cmd_certify, "classify": cmd_classify,
            "rep": cmd_rep, "schur": cmd_schur}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RepError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
