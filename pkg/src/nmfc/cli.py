"""Command line front end.

Subcommands: ``complete`` factors one observation file, ``bench`` sweeps
synthetic instances over ranks and sample rates, ``image`` runs the
recovery pipeline on a PGM, ``kkt-check`` audits a dumped iterate
against first-order optimality, and ``synth`` writes a fresh synthetic
instance to disk.

Every flag can also come from a ``--config`` file of ``flag = value``
lines (later command-line flags win).  Each run echoes its effective
flags to ``run.cfg`` in the output directory, so any run is reproducible
by feeding that file back through ``--config``.  The environment
variable ``NMFC_THREADS`` caps the numeric library thread pools.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .admm import default_params, export_blocks, solve
from .baselines import BASELINE_KINDS, BaselineParams, run_baseline
from .io import (
    ResultRecord,
    read_dense_csv,
    read_observed,
    read_pgm,
    results_table,
    write_dense_csv,
    write_observed,
    write_pgm,
    write_results,
)
from .kkt import kkt_residuals
from .masking import ObservedMatrix, embed, gather, overwrite_observed
from .metrics import evaluate
from .synth import make_problem, sample_mask

__all__ = ["main"]

SOLVER_KINDS = ("admm",) + BASELINE_KINDS


class CliError(Exception):
    """Validation or input failure; message goes to stderr, exit code 1."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _rate(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"sample rate must lie in (0, 1], got {text}")
    return value


def _apply_config(argv: list) -> list:
    """Expand ``--config FILE`` into flags inserted after the subcommand."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i == 0:
        raise CliError("--config must follow a subcommand")
    if i + 1 >= len(argv):
        raise CliError("--config requires a file path")
    path = argv[i + 1]
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from None
    extra: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-")
        value = value.strip()
        if not sep or not key:
            raise CliError(f"{path}: line {lineno}: expected 'flag = value'")
        flag = "--" + key.replace("_", "-")
        if value.lower() == "true":
            extra.append(flag)
        elif value.lower() == "false":
            continue
        else:
            extra.extend([flag, value])
    return argv[:1] + extra + argv[1:i] + argv[i + 2:]


def _write_echo(path: Path, ns: argparse.Namespace, keys: tuple) -> None:
    """Echo the effective flags in config-file syntax."""
    lines = ["# effective flags; rerun with: nmfc " + ns.command + " --config " + path.name]
    for key in keys:
        value = getattr(ns, key.replace("-", "_"))
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _add_config_flag(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", metavar="FILE",
                    help="read flags from FILE (lines of 'flag = value'); explicit flags win")


def _add_solver_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--tol", type=_positive_float, default=1e-5, help="stopping tolerance")
    sp.add_argument("--maxiter", type=_positive_int, default=2000, help="iteration cap")
    sp.add_argument("--seed", type=int, default=0, help="initialization seed")
    sp.add_argument("--alpha", type=_positive_float, default=None,
                    help="X-side penalty on the rescaled problem (default: heuristic)")
    sp.add_argument("--beta", type=_positive_float, default=None,
                    help="Y-side penalty on the rescaled problem (default: heuristic)")
    sp.add_argument("--gamma", type=_positive_float, default=None,
                    help="multiplier step length in (0, 1.618)")
    sp.add_argument("--omega", type=float, default=1.0, help="over-relaxation weight (lmafit-sor)")
    sp.add_argument("--epsilon", type=_positive_float, default=1e-9, help="denominator guard (mult)")
    sp.add_argument("--tau", type=_positive_float, default=1.0, help="gradient step (fpca)")
    sp.add_argument("--mu", type=_positive_float, default=None,
                    help="shrinkage weight (fpca, default: 1e-2 * top singular value)")


def _run_solver(kind: str, observed: ObservedMatrix, q: int, ns: argparse.Namespace, seed: int):
    """Dispatch one solve; returns (Solution, parameter echo dict)."""
    tol = ns.tol
    maxiter = ns.maxiter
    try:
        if kind == "admm":
            params = default_params(observed, q, seed=seed, tol=tol, maxiter=maxiter)
            overrides = {k: getattr(ns, k) for k in ("alpha", "beta", "gamma")
                         if getattr(ns, k, None) is not None}
            if overrides:
                params = replace(params, **overrides)
            sol = solve(observed, params, factors=getattr(ns, "factors", "xy"))
            echo = asdict(params)
        else:
            params = BaselineParams(q=q, omega=getattr(ns, "omega", 1.0),
                                    epsilon=getattr(ns, "epsilon", 1e-9),
                                    tau=getattr(ns, "tau", 1.0),
                                    mu=getattr(ns, "mu", None),
                                    tol=tol, maxiter=maxiter, seed=seed)
            sol = run_baseline(kind, observed, params)
            echo = asdict(params)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return sol, echo


def _read_observed_checked(path) -> ObservedMatrix:
    try:
        return read_observed(path)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from None


_COMPLETE_KEYS = ("input", "rank", "solver", "factors", "tol", "maxiter", "seed",
                  "alpha", "beta", "gamma", "omega", "epsilon", "tau", "mu",
                  "dump-state", "truth", "out")


def _cmd_complete(ns: argparse.Namespace) -> int:
    if ns.dump_state and ns.solver != "admm":
        raise CliError("--dump-state requires the admm solver")
    if ns.factors != "xy" and ns.solver != "admm":
        raise CliError("--factors applies only to the admm solver")
    observed = _read_observed_checked(ns.input)
    m, n = observed.shape
    if ns.rank > min(m, n):
        raise CliError(f"rank {ns.rank} exceeds min(m, n) = {min(m, n)}")
    truth = None
    if ns.truth is not None:
        try:
            truth = read_dense_csv(ns.truth)
        except (OSError, ValueError) as exc:
            raise CliError(str(exc)) from None
        if truth.shape != (m, n):
            raise CliError(f"truth shape {truth.shape} does not match observation {m}x{n}")

    outdir = Path(ns.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_echo(outdir / "run.cfg", ns, _COMPLETE_KEYS)

    start = time.perf_counter()
    sol, echo = _run_solver(ns.solver, observed, ns.rank, ns, ns.seed)
    cpu = time.perf_counter() - start
    product = sol.X @ sol.Y
    completed = overwrite_observed(product, observed)

    write_dense_csv(sol.X, outdir / "X.csv")
    write_dense_csv(sol.Y, outdir / "Y.csv")
    write_dense_csv(completed, outdir / "Z.csv")
    if ns.dump_state:
        blocks = export_blocks(sol, observed)
        for name in ("U", "V", "Lambda", "Pi"):
            write_dense_csv(blocks[name], outdir / f"{name}.csv")

    report = None
    if truth is not None:
        peak = float(truth.max())
        if peak <= 0:
            raise CliError("truth matrix has no positive entries; cannot set the PSNR peak")
        report = evaluate(product, truth, max_i=peak, cpu_seconds=cpu)
    record = ResultRecord(solver=ns.solver, m=m, n=n, q=ns.rank, r=None,
                          sr=observed.sample_rate, seed=ns.seed, params=echo,
                          iterations=sol.iterations, stop_reason=sol.stop_reason, eval=report)
    write_results([record], outdir / "result.json")
    print(f"{ns.solver}: stop={sol.stop_reason} iterations={sol.iterations} "
          f"final_f={sol.final_f:.6e}")
    return 0


_BENCH_KEYS = ("m", "n", "ranks", "srs", "trials", "seed0", "solvers",
               "tol", "maxiter", "omega", "out")


def _parse_list(text: str, parse, what: str) -> list:
    items = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not items:
        raise CliError(f"empty {what} list")
    try:
        return [parse(tok) for tok in items]
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise CliError(f"bad {what} list {text!r}: {exc}") from None


def _cmd_bench(ns: argparse.Namespace) -> int:
    ranks = _parse_list(ns.ranks, _positive_int, "rank")
    srs = _parse_list(ns.srs, _rate, "sample-rate")
    solvers = _parse_list(ns.solvers, str, "solver")
    for kind in solvers:
        if kind not in SOLVER_KINDS:
            raise CliError(f"unknown solver {kind!r}; expected one of {', '.join(SOLVER_KINDS)}")
    if max(ranks) > min(ns.m, ns.n):
        raise CliError(f"rank {max(ranks)} exceeds min(m, n) = {min(ns.m, ns.n)}")

    outdir = Path(ns.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_echo(outdir / "run.cfg", ns, _BENCH_KEYS)

    records = []
    summary_rows = []
    for q in ranks:
        for sr in srs:
            cell = {kind: [] for kind in solvers}
            for trial in range(ns.trials):
                seed = ns.seed0 + trial
                observed, prob = make_problem(ns.m, ns.n, q, sr, seed)
                peak = float(prob.M.max())
                for kind in solvers:
                    start = time.perf_counter()
                    sol, echo = _run_solver(kind, observed, q, ns, seed)
                    cpu = time.perf_counter() - start
                    report = evaluate(sol.X @ sol.Y, prob.M, max_i=peak, cpu_seconds=cpu)
                    records.append(ResultRecord(
                        solver=kind, m=ns.m, n=ns.n, q=q, r=q, sr=sr, seed=seed,
                        params=echo, iterations=sol.iterations,
                        stop_reason=sol.stop_reason, eval=report))
                    cell[kind].append(report)
            for kind in solvers:
                reports = cell[kind]
                summary_rows.append({
                    "solver": kind, "q": q, "sr": sr, "trials": ns.trials,
                    "mean_rel_err": float(np.mean([r.rel_err for r in reports])),
                    "median_rel_err": float(np.median([r.rel_err for r in reports])),
                    "mean_cpu_seconds": float(np.mean([r.cpu_seconds for r in reports])),
                })

    write_results(records, outdir / "records.jsonl", outdir / "records.txt")
    _write_summary(summary_rows, outdir / "summary.jsonl", outdir / "summary.txt")
    print(_summary_table(summary_rows), end="")
    return 0


def _write_summary(rows, jsonl_path: Path, table_path: Path) -> None:
    import json

    with open(jsonl_path, "w", encoding="ascii") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    table_path.write_text(_summary_table(rows), encoding="ascii")


def _summary_table(rows) -> str:
    cols = ("solver", "q", "sr", "trials", "mean_rel_err", "median_rel_err", "mean_cpu_seconds")
    table = [cols]
    for row in rows:
        table.append((row["solver"], str(row["q"]), format(row["sr"], ".3g"),
                      str(row["trials"]), format(row["mean_rel_err"], ".4e"),
                      format(row["median_rel_err"], ".4e"),
                      format(row["mean_cpu_seconds"], ".3f")))
    widths = [max(len(r[c]) for r in table) for c in range(len(cols))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
    return "\n".join(lines) + "\n"


_IMAGE_KEYS = ("input", "sr", "rank", "solver", "tol", "maxiter", "seed",
               "alpha", "beta", "gamma", "omega", "epsilon", "tau", "mu", "out")


def _cmd_image(ns: argparse.Namespace) -> int:
    try:
        img, maxval = read_pgm(ns.input)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from None
    h, w = img.shape
    if ns.rank > min(h, w):
        raise CliError(f"rank {ns.rank} exceeds min(h, w) = {min(h, w)}")

    outdir = Path(ns.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_echo(outdir / "run.cfg", ns, _IMAGE_KEYS)

    # work on unit scale; the header maxval restores pixel units on output
    unit = img / maxval
    mask = sample_mask(h, w, ns.sr, ns.seed)
    observed = ObservedMatrix(mask, gather(unit, mask))
    start = time.perf_counter()
    sol, echo = _run_solver(ns.solver, observed, ns.rank, ns, ns.seed)
    cpu = time.perf_counter() - start
    product = sol.X @ sol.Y
    report = evaluate(product, unit, max_i=1.0, cpu_seconds=cpu)

    write_pgm(product * maxval, maxval, outdir / "recovered.pgm")
    write_pgm(embed(observed.values, mask) * maxval, maxval, outdir / "masked.pgm")
    record = ResultRecord(solver=ns.solver, m=h, n=w, q=ns.rank, r=None, sr=ns.sr,
                          seed=ns.seed, params=echo, iterations=sol.iterations,
                          stop_reason=sol.stop_reason, eval=report)
    write_results([record], outdir / "result.json")
    print(f"{ns.solver}: psnr={report.psnr:.2f} dB rel_err={report.rel_err:.4e} "
          f"iterations={sol.iterations}")
    return 0


def _cmd_kkt_check(ns: argparse.Namespace) -> int:
    observed = _read_observed_checked(ns.input)
    blocks = {}
    for name, path in (("X", ns.x), ("Y", ns.y), ("Z", ns.z), ("U", ns.u),
                       ("V", ns.v), ("Lambda", ns.lam), ("Pi", ns.pi)):
        try:
            blocks[name] = read_dense_csv(path)
        except (OSError, ValueError) as exc:
            raise CliError(str(exc)) from None
    try:
        report = kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                               blocks["V"], blocks["Lambda"], blocks["Pi"], observed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    for key, value in report.as_dict().items():
        print(f"{key} {value:.6e}")
    ok = report.max_scaled() <= ns.tol
    print(f"max_scaled {report.max_scaled():.6e}")
    print(f"status {'pass' if ok else 'fail'}")
    return 0 if ok else 1


_SYNTH_KEYS = ("m", "n", "rank", "sr", "seed", "out")


def _cmd_synth(ns: argparse.Namespace) -> int:
    if ns.rank > min(ns.m, ns.n):
        raise CliError(f"rank {ns.rank} exceeds min(m, n) = {min(ns.m, ns.n)}")
    observed, prob = make_problem(ns.m, ns.n, ns.rank, ns.sr, ns.seed)
    outdir = Path(ns.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_echo(outdir / "run.cfg", ns, _SYNTH_KEYS)
    write_observed(observed, outdir / "observed.coo")
    write_dense_csv(prob.M, outdir / "truth.csv")
    print(f"wrote {observed.mask.count} of {ns.m * ns.n} entries "
          f"(rank {ns.rank}, sample rate {ns.sr:.3g})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmfc",
        description="Nonnegative matrix factorization and completion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("complete", help="factor one observation file")
    sp.add_argument("--input", required=True, help="coordinate observation file")
    sp.add_argument("--rank", type=_positive_int, required=True, help="inner dimension q")
    sp.add_argument("--solver", choices=SOLVER_KINDS, default="admm")
    sp.add_argument("--factors", choices=("xy", "uv"), default="xy",
                    help="which factor pair the admm solver returns")
    sp.add_argument("--dump-state", action="store_true",
                    help="also write U, V, Lambda, Pi for kkt-check (admm only)")
    sp.add_argument("--truth", default=None, help="dense CSV ground truth for metrics")
    sp.add_argument("--out", required=True, help="output directory")
    _add_solver_flags(sp)
    _add_config_flag(sp)
    sp.set_defaults(func=_cmd_complete)

    sp = sub.add_parser("bench", help="sweep synthetic instances")
    sp.add_argument("--m", type=_positive_int, required=True)
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--ranks", required=True, help="comma-separated ranks, e.g. 10,20")
    sp.add_argument("--srs", required=True, help="comma-separated sample rates, e.g. 1.0,0.75,0.5")
    sp.add_argument("--trials", type=_positive_int, default=10)
    sp.add_argument("--seed0", type=int, default=0, help="trial t uses seed seed0 + t")
    sp.add_argument("--solvers", default="admm", help="comma-separated solver names")
    sp.add_argument("--tol", type=_positive_float, default=1e-5)
    sp.add_argument("--maxiter", type=_positive_int, default=2000)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--out", required=True, help="output directory")
    _add_config_flag(sp)
    sp.set_defaults(func=_cmd_bench)

    sp = sub.add_parser("image", help="mask and recover a PGM image")
    sp.add_argument("--input", required=True, help="binary PGM image")
    sp.add_argument("--sr", type=_rate, required=True, help="sample rate in (0, 1]")
    sp.add_argument("--rank", type=_positive_int, required=True)
    sp.add_argument("--solver", choices=SOLVER_KINDS, default="admm")
    sp.add_argument("--out", required=True, help="output directory")
    _add_solver_flags(sp)
    _add_config_flag(sp)
    sp.set_defaults(func=_cmd_image, factors="xy")

    sp = sub.add_parser("kkt-check", help="audit a dumped iterate")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--z", required=True)
    sp.add_argument("--u", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--pi", required=True)
    sp.add_argument("--input", required=True, help="coordinate observation file")
    sp.add_argument("--tol", type=_positive_float, default=1e-4,
                    help="bound every scaled residual must meet")
    _add_config_flag(sp)
    sp.set_defaults(func=_cmd_kkt_check)

    sp = sub.add_parser("synth", help="write a synthetic instance")
    sp.add_argument("--m", type=_positive_int, required=True)
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--rank", type=_positive_int, required=True)
    sp.add_argument("--sr", type=_rate, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output directory")
    _add_config_flag(sp)
    sp.set_defaults(func=_cmd_synth)

    return parser


def _thread_cap():
    """Honor NMFC_THREADS by capping the BLAS/LAPACK thread pools."""
    raw = os.environ.get("NMFC_THREADS")
    if not raw:
        return None
    try:
        limit = int(raw)
        if limit < 1:
            raise ValueError
    except ValueError:
        raise CliError(f"NMFC_THREADS must be a positive integer, got {raw!r}") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=limit)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        holder = _thread_cap()  # noqa: F841  (keeps the cap alive for the run)
        argv = _apply_config(argv)
        ns = _build_parser().parse_args(argv)
        return ns.func(ns)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
