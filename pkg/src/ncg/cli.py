"""Command line front end: ``ncg {analyze,nrange,gns,convalg,audit}``.

Exit codes: 0 success, 2 unparsable input, 3 eigensolver failure,
4 invalid state, 5 measure/space mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .convalg import (
    BlockMeasure,
    block_dims,
    convolve,
    cstar_norm,
    distance,
    involution,
    to_block_matrices,
)
from .errors import ClusterInstability, InvalidState, NonConvergence, SpaceMismatch
from .jordan import dunford_decompose, find_invariant_subspace
from .linop import Tolerances, is_normal, operator_norm, read_matrix, spectrum
from .qspace import FiniteQuantumSpace, relation_pairs
from .report import dumps, write_atomic
from .speccalc import audit_claims, check_spectrum_in_sigma, numerical_range
from .states import (
    algebra_from_json,
    build_RA,
    gns,
    is_irreducible,
    state_from_json,
)

EXIT_PARSE, EXIT_NONCONV, EXIT_STATE, EXIT_SPACE = 2, 3, 4, 5


class InputError(Exception):
    pass


@dataclass(frozen=True)
class AnalysisConfig:
    tolerances: Tolerances
    angle_count: int = 256
    sample_count: int = 10
    seed: int = 0
    output_dir: str = "."

    def __post_init__(self):
        if self.angle_count < 3:
            raise ValueError("angle_count must be at least 3")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("output_dir")
        return d


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _header(command: str, config: AnalysisConfig, inputs: list[Path]) -> dict:
    return {
        "tool": "ncg",
        "version": __version__,
        "command": command,
        "config": config.to_json(),
        "inputs": [p.name for p in inputs],
    }


def _load(fn, *args):
    try:
        return fn(*args)
    except (InvalidState, SpaceMismatch):
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(str(exc)) from exc


def _read_json(path: Path):
    return json.loads(Path(path).read_text())


def _basis_json(basis: np.ndarray) -> list:
    return [[_pair(z) for z in col] for col in basis.T]


def analyze_report(a: np.ndarray, config: AnalysisConfig) -> dict:
    tol = config.tolerances
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClusterInstability)
        dec = dunford_decompose(a, tol)
        subspace, branch = find_invariant_subspace(a, tol)
    nr = numerical_range(a, config.angle_count)
    sig = check_spectrum_in_sigma(a, tol, config.angle_count)
    claims = audit_claims(a, tol, config.angle_count, config.sample_count, config.seed, decomposition=dec)
    return {
        "matrix": {"dim": a.shape[0], "norm": operator_norm(a), "normal": is_normal(a, tol)},
        "spectrum": [{"eigenvalue": _pair(z), "multiplicity": m} for z, m in spectrum(a, tol)],
        "numerical_range": {
            **nr.summary(),
            "spectrum_in_range": {
                "pass": sig.passed,
                "threshold": sig.threshold,
                "distances": list(sig.distances),
            },
        },
        "dunford": dec.to_json(),
        "claims": claims.to_json()["claims"],
        "invariant_subspace": {
            "branch": branch,
            "rank": subspace.rank,
            "basis": _basis_json(subspace.basis),
            "residual": subspace.invariance_residual(a),
        },
    }


def gns_report(algebra, states, config: AnalysisConfig) -> dict:
    tol = config.tolerances
    per_state = []
    pure = True
    for s in states:
        rep = gns(s, tol)
        irr = is_irreducible(rep, tol)
        pure = pure and irr
        per_state.append({"hilbert_dim": rep.hilbert_dim, "irreducible": irr, "residuals": rep.residuals()})
    out = {"algebra_dim": algebra.dim, "ambient_dim": algebra.ambient_dim, "states": per_state}
    if len(states) > 1:
        if pure:
            space = build_RA(algebra, states, tol)
            out["partition"] = space.to_json()
        else:
            out["partition"] = None
            out["partition_note"] = "not all states are pure"
    return out


def convalg_report(space: FiniteQuantumSpace, measures: list[BlockMeasure]) -> dict:
    m = len(measures)
    cstar, assoc, mult, star, comm = [], [], [], [], []
    for mu in measures:
        norm = cstar_norm(mu)
        cstar.append(abs(cstar_norm(convolve(involution(mu), mu)) - norm**2) / max(1.0, norm**2))
    for i in range(m):
        mu, nu, rho = measures[i], measures[(i + 1) % m], measures[(i + 2) % m]
        assoc.append(distance(convolve(convolve(mu, nu), rho), convolve(mu, convolve(nu, rho))))
        lhs = to_block_matrices(convolve(mu, nu))
        rhs = [x @ y for x, y in zip(to_block_matrices(mu), to_block_matrices(nu))]
        mult.append(max((float(np.max(np.abs(x - y))) for x, y in zip(lhs, rhs)), default=0.0))
        star.append(max(
            (float(np.max(np.abs(x - y.conj().T)))
             for x, y in zip(to_block_matrices(involution(mu)), to_block_matrices(mu))),
            default=0.0,
        ))
        comm.append(distance(convolve(mu, nu), convolve(nu, mu)))
    dims = block_dims(space)
    return {
        "space": space.to_json(),
        "block_dims": dims,
        "total_dim": sum(d * d for d in dims),
        "relation_size": len(relation_pairs(space)),
        "measure_count": m,
        "cstar_identity_residuals": cstar,
        "associativity_residuals": assoc,
        "multiplicativity_residuals": mult,
        "involution_residuals": star,
        "commutativity_residual": max(comm, default=0.0),
    }


def _config(args) -> AnalysisConfig:
    seed = args.seed
    env = os.environ.get("NCG_SEED")
    if env is not None and env.strip():
        seed = int(env)
    tol = Tolerances(tol_eig=args.tol_eig, tol_resid=args.tol_resid)
    return AnalysisConfig(tol, args.angles, args.samples, seed, args.out)


def _emit(config: AnalysisConfig, name: str, text: str) -> Path:
    path = write_atomic(Path(config.output_dir) / name, text)
    print(path)
    return path


def cmd_analyze(args, config):
    a = _load(read_matrix, args.input)
    report = {**_header("analyze", config, [Path(args.input)]), **analyze_report(a, config)}
    return _emit(config, f"{Path(args.input).stem}.analyze.json", dumps(report) + "\n")


def cmd_audit(args, config):
    a = _load(read_matrix, args.input)
    tol = config.tolerances
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClusterInstability)
        claims = audit_claims(a, tol, config.angle_count, config.sample_count, config.seed)
    report = {**_header("audit", config, [Path(args.input)]), **claims.to_json()}
    return _emit(config, f"{Path(args.input).stem}.audit.json", dumps(report) + "\n")


def cmd_nrange(args, config):
    a = _load(read_matrix, args.input)
    nr = numerical_range(a, config.angle_count)
    return _emit(config, f"{Path(args.input).stem}.nrange.csv", nr.to_csv())


def _states_from(obj, algebra):
    if isinstance(obj, dict) and "states" in obj:
        obj = obj["states"]
    if isinstance(obj, dict):
        obj = [obj]
    return [state_from_json(s, algebra) for s in obj]


def cmd_gns(args, config):
    tol = config.tolerances
    algebra = _load(lambda p: algebra_from_json(_read_json(p), tol), args.algebra)
    states = _load(lambda p: _states_from(_read_json(p), algebra), args.state)
    report = {
        **_header("gns", config, [Path(args.algebra), Path(args.state)]),
        **gns_report(algebra, states, config),
    }
    return _emit(config, f"{Path(args.state).stem}.gns.json", dumps(report) + "\n")


def _measures_from(obj, space):
    if isinstance(obj, dict) and "measures" in obj:
        obj = obj["measures"]
    if isinstance(obj, dict):
        obj = [obj]
    return [BlockMeasure.from_json(m, space) for m in obj]


def cmd_convalg(args, config):
    space = _load(lambda p: FiniteQuantumSpace.from_json(_read_json(p)), args.space)
    inputs = [Path(args.space)]
    if args.measures:
        measures = _load(lambda p: _measures_from(_read_json(p), space), args.measures)
        inputs.append(Path(args.measures))
    else:
        rng = np.random.default_rng(config.seed)
        measures = [BlockMeasure.random(space, rng) for _ in range(config.sample_count)]
    report = {**_header("convalg", config, inputs), **convalg_report(space, measures)}
    return _emit(config, f"{Path(args.space).stem}.convalg.json", dumps(report) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-eig", type=float, default=1e-6)
    common.add_argument("--tol-resid", type=float, default=1e-9)
    common.add_argument("--angles", type=int, default=256, help="numerical-range angle count")
    common.add_argument("--samples", type=int, default=10, help="pure-state / random-measure sample count")
    common.add_argument("--seed", type=int, default=0, help="overridden by NCG_SEED when set")
    common.add_argument("--out", default=".", help="output directory")

    parser = argparse.ArgumentParser(prog="ncg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ncg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="full report for one matrix")
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("nrange", parents=[common], help="numerical-range boundary as CSV")
    p.add_argument("input")
    p.set_defaults(func=cmd_nrange)

    p = sub.add_parser("audit", parents=[common], help="claims audit for one matrix")
    p.add_argument("input")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("gns", parents=[common], help="GNS data for states on a generated algebra")
    p.add_argument("algebra")
    p.add_argument("state")
    p.set_defaults(func=cmd_gns)

    p = sub.add_parser("convalg", parents=[common], help="convolution-algebra residuals")
    p.add_argument("space")
    p.add_argument("measures", nargs="?")
    p.set_defaults(func=cmd_convalg)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
    except ValueError as exc:
        print(f"ncg: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        args.func(args, config)
    except InputError as exc:
        print(f"ncg: cannot parse input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonConvergence as exc:
        print(f"ncg: eigensolver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except InvalidState as exc:
        print(f"ncg: invalid state: {exc}", file=sys.stderr)
        return EXIT_STATE
    except SpaceMismatch as exc:
        print(f"ncg: space mismatch: {exc}", file=sys.stderr)
        return EXIT_SPACE
    return 0


if __name__ == "__main__":
    sys.exit(main())
