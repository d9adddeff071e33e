"""Command-line interface: ``geks test``, ``geks simulate`` and ``geks calibrate``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .calibrate import ALPHAS, calibrate
from .errors import DataError, GeksError, NumericalError
from .io import load_dataset, load_matrix, write_dataset, write_json
from .kernel import KernelSpec, km_test
from .null_model import fit_null
from .score import ge_score_test
from .simulate import UINT64_MAX, SimConfig, simulate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
RANK_TOL_ENV = "GEKS_RANK_TOL"

logger = logging.getLogger("geks")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunConfig:
    test: str
    pheno: str
    geno: str
    out: str
    kernel: str = "linear"
    kernel_tilde: str = "linear"
    kernel_matrix: str | None = None
    kernel_tilde_matrix: str | None = None
    rank_tol: float | None = None
    max_iter: int = 100
    irls_tol: float = 1e-10
    seed: int | None = field(default=None)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= UINT64_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geks", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"geks {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run the score and/or kernel test on TSV inputs")
    t.add_argument("--pheno", required=True, help="phenotype TSV with y, s and covariate columns")
    t.add_argument("--geno", required=True, help="genotype TSV, n rows x p SNP columns")
    t.add_argument("--test", choices=("score", "kernel", "both"), default="both")
    t.add_argument("--out", default="-", help="JSON output path ('-' for stdout)")
    t.add_argument("--kernel", choices=("linear", "precomputed"), default="linear")
    t.add_argument("--kernel-tilde", choices=("linear", "precomputed"), default="linear")
    t.add_argument("--kernel-matrix", help="n x n TSV for a precomputed main-effect kernel")
    t.add_argument("--kernel-tilde-matrix", help="n x n TSV for a precomputed interaction kernel")
    t.add_argument("--rank-tol", type=float, help=f"rank tolerance (overrides ${RANK_TOL_ENV})")
    t.add_argument("--max-iter", type=int, default=100)
    t.add_argument("--irls-tol", type=float, default=1e-10)

    def sim_args(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--q", type=int, default=2, help="covariate columns incl. intercept and s")
        p.add_argument("--p", type=int, default=3)
        p.add_argument("--seed", type=_seed, required=True)
        p.add_argument("--beta", type=_floats, help="comma-separated, order [intercept, covariates..., s]")
        p.add_argument("--a", type=_floats, help="comma-separated main effects (default 0)")
        p.add_argument("--b", type=_floats, help="comma-separated interaction effects (default 0)")
        p.add_argument("--maf", type=_floats)
        p.add_argument("--env", choices=("bernoulli", "normal"), default="bernoulli")
        p.add_argument("--env-prob", type=float, default=0.5)

    s = sub.add_parser("simulate", help="write simulated phenotype and genotype TSVs")
    sim_args(s)
    s.add_argument("--pheno-out", required=True)
    s.add_argument("--geno-out", required=True)

    c = sub.add_parser("calibrate", help="empirical rejection rates under null simulation")
    sim_args(c)
    c.add_argument("--reps", type=int, default=2000)
    c.add_argument("--test", choices=("score", "kernel", "both"), default="both")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--rank-tol", type=float)
    c.add_argument("--out", default="-")
    return parser


def resolve_rank_tol(cli_value):
    if cli_value is not None:
        return cli_value
    env = os.environ.get(RANK_TOL_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"{RANK_TOL_ENV}={env!r} is not a number") from None
    return None


def _sim_config(args) -> SimConfig:
    return SimConfig(n=args.n, q=args.q, p=args.p, beta_true=args.beta, a_true=args.a, b_true=args.b,
                     maf=args.maf, env=args.env, env_prob=args.env_prob, seed=args.seed)


def _tests(choice: str) -> tuple:
    return ("score", "kernel") if choice == "both" else (choice,)


def _kernel_spec(kind, path, flag):
    if kind == "linear":
        if path:
            raise UsageError(f"{flag} given but the kernel kind is linear")
        return KernelSpec.linear()
    if not path:
        raise UsageError(f"a precomputed kernel needs {flag}")
    return KernelSpec.precomputed(load_matrix(path))


def cmd_test(args) -> int:
    cfg = RunConfig(test=args.test, pheno=args.pheno, geno=args.geno, out=args.out, kernel=args.kernel,
                    kernel_tilde=args.kernel_tilde, kernel_matrix=args.kernel_matrix,
                    kernel_tilde_matrix=args.kernel_tilde_matrix, rank_tol=resolve_rank_tol(args.rank_tol),
                    max_iter=args.max_iter, irls_tol=args.irls_tol)
    spec_k = _kernel_spec(cfg.kernel, cfg.kernel_matrix, "--kernel-matrix")
    spec_kt = _kernel_spec(cfg.kernel_tilde, cfg.kernel_tilde_matrix, "--kernel-tilde-matrix")
    data = load_dataset(cfg.pheno, cfg.geno)
    fit = fit_null(data, max_iter=cfg.max_iter, tol=cfg.irls_tol)
    doc = {
        "tool": "geks",
        "version": __version__,
        "config": asdict(cfg),
        "data": {"n": data.n, "q": data.q, "p": data.p, "covariates": list(data.covariate_names),
                 "snps": list(data.snp_names)},
        "null_fit": {"beta": fit.beta.tolist(), "iterations": fit.iterations, "converged": fit.converged},
    }
    if cfg.test in ("score", "both"):
        doc["score"] = ge_score_test(data, fit, cfg.rank_tol).to_dict()
    if cfg.test in ("kernel", "both"):
        doc["kernel"] = km_test(data, fit, spec_k, spec_kt).to_dict()
    write_json(doc, cfg.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    data = simulate(_sim_config(args))
    write_dataset(data, args.pheno_out, args.geno_out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _sim_config(args)
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    start = time.perf_counter()
    results = calibrate(cfg, args.reps, _tests(args.test), args.workers, resolve_rank_tol(args.rank_tol))
    config = asdict(cfg)
    config.pop("stream")
    doc = {
        "tool": "geks",
        "version": __version__,
        "config": {**config, "reps": args.reps, "test": args.test, "workers": args.workers},
        "alphas": list(ALPHAS),
        **results,
        "elapsed_seconds": time.perf_counter() - start,
    }
    write_json(doc, args.out)
    return EXIT_OK


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handler = {"test": cmd_test, "simulate": cmd_simulate, "calibrate": cmd_calibrate}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"geks: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"geks: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"geks: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GeksError as exc:
        print(f"geks: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
