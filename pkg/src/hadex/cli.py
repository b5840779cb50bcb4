"""Command-line pipeline: search, verify, optimize, stats, dataset export.

One executable with subcommands; every run writes its primary artifacts
into --out-dir with stable bytes (given the same config and seed), while
wall-clock metadata goes to a separate runmeta.json.  --check turns each
subcommand into a golden-number gate that exits nonzero on mismatch.

Primary artifacts:
  search          counterexamples.txt, report.json, optionally witnesses.csv
  verify-z        zverdicts.csv
  optimize-r      ropt.csv
  stats           stats.json
  export-dataset  dataset.csv
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import golden, gf2, realopt, search, stats, zverify


class MissingInput(FileNotFoundError):
    """An upstream artifact required by the subcommand is absent."""


class CheckFailed(RuntimeError):
    """A --check golden-number comparison did not match."""


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_runmeta(out: Path, command: str, elapsed_s: float) -> None:
    meta = {
        "command": command,
        "elapsed_ms": int(elapsed_s * 1000),
        "finished_unix": time.time(),
    }
    with open(out / "runmeta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def _load_counterexamples(out: Path) -> list[int]:
    path = out / "counterexamples.txt"
    if not path.exists():
        raise MissingInput(f"{path} not found; run `hadex search` first")
    return [gf2.from_hex(line) for line in path.read_text().splitlines() if line.strip()]


def _rebuild_map(table: search.RankTable, cex: list[int]) -> search.ExpressibilityMap:
    # The map is exactly the full-rank words minus the recorded counterexamples.
    bits = (table.ranks == 4).copy()
    bits[np.asarray(cex, dtype=np.int64)] = False
    return search.ExpressibilityMap(bits)


def cmd_ranks(args) -> int:
    table = search.build_rank_table()
    hist = table.histogram()
    for r, n in enumerate(hist):
        print(f"{r} {n}")
    p = golden.FULL_RANK_PROBABILITY
    print(f"full-rank probability {hist[4]}/{sum(hist)} = {p.numerator}/{p.denominator}"
          f" = {float(p):.10f}")
    if args.check and hist != golden.RANK_HISTOGRAM:
        raise CheckFailed(f"rank histogram {hist} != {golden.RANK_HISTOGRAM}")
    return 0


def cmd_search(args) -> int:
    out = _out_dir(args)
    table = search.build_rank_table()
    witnesses = None
    if args.witnesses:
        emap, report, witnesses = search.run_search_recording(table)
    else:
        emap, report = search.run_search(table, jobs=args.jobs)
    cex = search.counterexamples(emap, table)

    with open(out / "counterexamples.txt", "w") as fh:
        fh.writelines(gf2.to_hex(m) + "\n" for m in cex)
    with open(out / "report.json", "w") as fh:
        json.dump(
            {
                "rank_histogram": list(report.rank_histogram),
                "expressible": report.expressible_count,
                "counterexamples": report.counterexample_count,
                "elapsed_ms": int(report.elapsed_s * 1000),
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    if witnesses is not None:
        with open(out / "witnesses.csv", "w") as fh:
            fh.write("product,factor_a,factor_b\n")
            for w in emap.words():
                fh.write(
                    f"{gf2.to_hex(int(w))},{gf2.to_hex(int(witnesses.factor_a[w]))},"
                    f"{gf2.to_hex(int(witnesses.factor_b[w]))}\n"
                )
    _write_runmeta(out, "search", report.elapsed_s)
    print(f"expressible {report.expressible_count}  counterexamples {report.counterexample_count}")

    if args.check:
        if report.expressible_count != golden.EXPRESSIBLE_COUNT:
            raise CheckFailed(f"expressible {report.expressible_count} != {golden.EXPRESSIBLE_COUNT}")
        if report.counterexample_count != golden.COUNTEREXAMPLE_COUNT:
            raise CheckFailed(f"counterexamples {report.counterexample_count} != {golden.COUNTEREXAMPLE_COUNT}")
        if golden.FIRST_COUNTEREXAMPLE not in cex:
            raise CheckFailed("127f missing from the counterexample list")
    return 0


def cmd_counterexamples(args) -> int:
    table = search.build_rank_table()
    emap, _ = search.run_search(table, jobs=args.jobs)
    for m in search.counterexamples(emap, table):
        print(gf2.to_hex(m))
    return 0


def cmd_verify_z(args) -> int:
    out = _out_dir(args)
    cex = _load_counterexamples(out)
    if args.sample:
        cex = cex[:: max(1, len(cex) // args.sample)][: args.sample]
    t0 = time.perf_counter()
    mode = "orbit" if args.orbit_reduced else "full"
    verdicts = zverify.verify_all_z(cex, jobs=args.jobs, mode=mode)
    with open(out / "zverdicts.csv", "w") as fh:
        fh.write("matrix,ones,assignments,min_rank,verified\n")
        for v in verdicts:
            fh.write(
                f"{gf2.to_hex(v.matrix)},{v.ones},{v.assignments_checked},"
                f"{v.min_rank_found},{str(v.verified).lower()}\n"
            )
    _write_runmeta(out, "verify-z", time.perf_counter() - t0)
    n_ok = sum(v.verified for v in verdicts)
    print(f"verified {n_ok}/{len(verdicts)} (mode {mode})")
    if args.check and n_ok != len(verdicts):
        raise CheckFailed(f"only {n_ok}/{len(verdicts)} counterexamples verified")
    return 0


def cmd_optimize_r(args) -> int:
    out = _out_dir(args)
    config = realopt.OptConfig(
        restarts=args.restarts,
        iterations=args.iters,
        success_tolerance=args.tol,
        evidence_threshold=args.threshold,
        method="de" if args.de else "gd",
    )
    cex = _load_counterexamples(out)
    if args.sample:
        rng = np.random.default_rng(args.seed)
        idx = rng.choice(len(cex), size=min(args.sample, len(cex)), replace=False)
        cex = [cex[i] for i in sorted(idx)]
    t0 = time.perf_counter()
    reports = realopt.evidence_batch(cex, config, seed=args.seed)
    with open(out / "ropt.csv", "w") as fh:
        fh.write("matrix,restarts,best_residual,converged,iters\n")
        for r in reports:
            fh.write(
                f"{gf2.to_hex(r.target)},{r.restarts},{r.best_residual:.6e},"
                f"{str(r.converged).lower()},{r.iterations_used}\n"
            )
    _write_runmeta(out, "optimize-r", time.perf_counter() - t0)
    n_conv = sum(r.converged for r in reports)
    n_below = sum(r.best_residual < config.evidence_threshold for r in reports)
    print(
        f"targets {len(reports)}  converged(<{config.success_tolerance:g}) {n_conv}  "
        f"below evidence threshold(<{config.evidence_threshold:g}) {n_below}  "
        f"[evidence only]"
    )

    if args.check:
        # Golden gate: the seeded positive controls must converge; see the
        # package docs for why no golden is asserted on counterexamples.
        controls = realopt.positive_controls(golden.CONTROL_COUNT, seed=args.seed, config=config)
        ok = sum(rep.converged for _, rep in controls)
        print(f"positive controls converged {ok}/{golden.CONTROL_COUNT}")
        if ok < golden.CONTROL_MIN_CONVERGED:
            raise CheckFailed(f"only {ok}/{golden.CONTROL_COUNT} positive controls converged")
    return 0


def cmd_stats(args) -> int:
    out = _out_dir(args)
    table = search.build_rank_table()
    emap = _rebuild_map(table, _load_counterexamples(out))
    t0 = time.perf_counter()
    dt = stats.density_table(emap, table)
    accs = stats.accuracy_by_cutoff(dt)
    expr_stats, cex_stats = stats.zero_stats(emap, table)
    t_welch = stats.welch_t(expr_stats, cex_stats)
    t_pooled = stats.pooled_t(expr_stats, cex_stats)
    payload = {
        "density": {
            "ones": list(range(17)),
            "expressible": dt.expressible.tolist(),
            "counterexample": dt.counterexample.tolist(),
        },
        "accuracy_by_cutoff": accs,
        "best_cutoff": stats.best_cutoff(dt),
        "class_stats": {
            s.label: {"n": s.n, "mean_zeros": s.mean_zeros, "variance_zeros": s.variance_zeros}
            for s in (expr_stats, cex_stats)
        },
        "t_welch": t_welch,
        "t_pooled": t_pooled,
    }
    with open(out / "stats.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    _write_runmeta(out, "stats", time.perf_counter() - t0)
    print(
        f"accuracy@{golden.BEST_CUTOFF} {accs[golden.BEST_CUTOFF]:.4f}  "
        f"mean zeros {expr_stats.mean_zeros:.4f}/{cex_stats.mean_zeros:.4f}  "
        f"t pooled {t_pooled:.2f}  t welch {t_welch:.2f}"
    )

    if args.check:
        acc9 = accs[golden.BEST_CUTOFF]
        if abs(acc9 - golden.DENSITY_ACCURACY) > golden.DENSITY_ACCURACY_TOL:
            raise CheckFailed(f"accuracy@9 {acc9:.4f} != {golden.DENSITY_ACCURACY}")
        if abs(expr_stats.mean_zeros - golden.MEAN_ZEROS_EXPRESSIBLE) > golden.MEAN_ZEROS_TOL:
            raise CheckFailed(f"expressible mean zeros {expr_stats.mean_zeros:.4f}")
        if abs(cex_stats.mean_zeros - golden.MEAN_ZEROS_COUNTEREXAMPLE) > golden.MEAN_ZEROS_TOL:
            raise CheckFailed(f"counterexample mean zeros {cex_stats.mean_zeros:.4f}")
        close = [
            t for t in (t_welch, t_pooled) if abs(t - golden.T_STATISTIC) <= golden.T_STATISTIC_TOL
        ]
        if not close:
            raise CheckFailed(f"neither t ({t_welch:.2f}, {t_pooled:.2f}) matches {golden.T_STATISTIC}")
    return 0


def cmd_export_dataset(args) -> int:
    out = _out_dir(args)
    table = search.build_rank_table()
    emap = _rebuild_map(table, _load_counterexamples(out))
    t0 = time.perf_counter()
    n = stats.write_dataset(out / "dataset.csv", emap, table)
    _write_runmeta(out, "export-dataset", time.perf_counter() - t0)
    print(f"wrote {n} rows to {out / 'dataset.csv'}")
    if args.check and n != golden.RANK_HISTOGRAM[4]:
        raise CheckFailed(f"dataset rows {n} != {golden.RANK_HISTOGRAM[4]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    # Global flags may appear before or after the subcommand; the shared
    # parent uses SUPPRESS so a subcommand parse never clobbers values
    # given up front.
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker threads")
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for all randomness")
    shared.add_argument("--out-dir", default=argparse.SUPPRESS, help="artifact directory")
    shared.add_argument(
        "--check", action="store_true", default=argparse.SUPPRESS,
        help="fail on any golden-number mismatch",
    )

    parser = argparse.ArgumentParser(
        prog="hadex",
        parents=[shared],
        description="Hadamard rank-2 expressibility census of 4x4 binary matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ranks", help="print the rank histogram", parents=[shared]).set_defaults(
        func=cmd_ranks
    )

    p = sub.add_parser("search", help="run the full pair search", parents=[shared])
    p.add_argument("--witnesses", action="store_true", help="also write witnesses.csv")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("counterexamples", help="print the counterexample list", parents=[shared])
    p.set_defaults(func=cmd_counterexamples)

    p = sub.add_parser("verify-z", help="verify counterexamples by sign enumeration", parents=[shared])
    group = p.add_mutually_exclusive_group()
    group.add_argument("--full", action="store_true", help="enumerate all 2^k assignments (default)")
    group.add_argument("--orbit-reduced", action="store_true", help="one assignment per scaling orbit")
    p.add_argument("--sample", type=int, default=0, help="verify only N evenly spaced matrices")
    p.set_defaults(func=cmd_verify_z)

    p = sub.add_parser("optimize-r", help="attempt real factorizations of counterexamples", parents=[shared])
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6, help="success tolerance on the residual")
    p.add_argument("--threshold", type=float, default=1e-3, help="evidence threshold on the residual")
    p.add_argument("--de", action="store_true", help="use differential evolution instead of gradient descent")
    p.add_argument("--sample", type=int, default=0, help="optimize a random subset of N counterexamples")
    p.set_defaults(func=cmd_optimize_r)

    p = sub.add_parser("stats", help="density and zero-count statistics", parents=[shared])
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-dataset", help="write the labeled dataset CSV", parents=[shared])
    p.set_defaults(func=cmd_export_dataset)
    return parser


_GLOBAL_DEFAULTS = {"jobs": 1, "seed": 0, "out_dir": "out", "check": False}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    # Global flags are SUPPRESS-defaulted so values given before the
    # subcommand survive the subparser merge; fill the gaps here.
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except MissingInput as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # Downstream consumer (e.g. head) closed the pipe; not an error.
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    raise SystemExit(main())
