"""Command-line entry point: ``sse entropy | simulate | select-k``.

Machine-readable results go to stdout with six decimals; logs go to stderr.
Exit codes: 0 success, 2 bad input or usage, 3 oracle failure, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from .assignment import ClusterAssignment
from .clustering import SpectralConfig
from .entropy import BoundConditionError
from .graph import VARIANTS, SpectralError, as_adjacency
from .model_selection import select_k
from .oracle import (
    POLICIES,
    TEMPLATES,
    CachedOracle,
    LlmOracle,
    LlmOracleConfig,
    MockOracle,
    OracleError,
    VerdictCache,
    build_adjacency,
)
from .pipeline import PipelineError, run_pipeline
from .simulation import SCENARIOS, TABLE1_ROWS, ExperimentConfig, persist_report, run_experiment, table1_rows

log = logging.getLogger("spectral_entropy")

EXIT_INPUT = 2
EXIT_ORACLE = 3
EXIT_NUMERIC = 4


class InputError(ValueError):
    pass


# -- input --------------------------------------------------------------------


def _sniff(path, lines):
    if path.endswith(".npy"):
        return "npy"
    if path.endswith(".jsonl") or path.endswith(".ndjson"):
        return "jsonl"
    body = [ln for ln in lines if ln.strip()]
    if body and body[0].lstrip().startswith("{"):
        return "jsonl"
    tokens = [ln.replace(",", " ").split() for ln in body]
    if body and all(len(t) == len(body) and all(x in ("0", "1", "0.0", "1.0") for x in t) for t in tokens):
        return "matrix"
    return "plain"


def read_input(path: str, fmt: str = "auto"):
    """Return ``(texts, truth, E)``; exactly one of ``texts`` and ``E`` is set."""
    if fmt == "npy" or (fmt == "auto" and path.endswith(".npy")):
        try:
            return None, None, np.load(path)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read matrix {path}: {exc}") from exc
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if fmt == "auto":
        fmt = _sniff(path, lines)
    if fmt == "matrix":
        rows = [ln.replace(",", " ").split() for ln in lines if ln.strip()]
        try:
            return None, None, np.array(rows, dtype=float)
        except ValueError as exc:
            raise InputError(f"{path}: not a numeric matrix: {exc}") from exc
    if fmt == "plain":
        return [ln for ln in lines if ln.strip()], None, None

    texts, labels = [], []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(rec, dict) or not isinstance(rec.get("text"), str):
            raise InputError(f"{path}:{lineno}: record needs a string 'text' field")
        texts.append(rec["text"])
        labels.append(rec.get("truth_label"))
    truth = None
    if any(lab is not None for lab in labels):
        if any(lab is None for lab in labels):
            raise InputError(f"{path}: truth_label must be given for every record or for none")
        ids: dict = {}
        coded = [ids.setdefault(json.dumps(lab, sort_keys=True), len(ids)) for lab in labels]
        truth = ClusterAssignment(coded, len(ids))
    return texts, truth, None


def _parse_k(value: str):
    if value in ("true", "cv"):
        return value
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"K must be an integer, 'cv' or 'true', got {value!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError("K must be at least 1")
    return k


def _floats(value: str) -> list[float]:
    try:
        return [float(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}") from None


def _ratio_grid(value: str) -> list[list[float]]:
    return [_floats(part) for part in value.split(";") if part.strip()]


def _ints(value: str) -> list[int]:
    try:
        return [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from None


def _prob(value: str) -> float:
    x = float(value)
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {value}")
    return x


# -- oracle wiring ------------------------------------------------------------


def make_oracle(args, truth):
    if args.oracle == "mock":
        if truth is None:
            raise InputError("the mock oracle needs truth_label on every input record")
        if args.p is None or args.q is None:
            raise InputError("the mock oracle needs --p and --q")
        oracle = MockOracle(truth, args.p, args.q, seed=args.seed)
    else:
        cfg = LlmOracleConfig(
            endpoint=args.endpoint,
            model=args.model,
            template=args.template,
            max_inflight=args.max_inflight,
        )
        oracle = LlmOracle(cfg)
    if args.cache:
        oracle = CachedOracle(oracle, VerdictCache(args.cache))
    return oracle


def _adjacency_from_args(args):
    texts, truth, E = read_input(args.input, args.format)
    if E is not None:
        return None, truth, E
    if len(texts) < 2:
        raise InputError(f"need at least 2 texts, got {len(texts)}")
    oracle = make_oracle(args, truth)
    try:
        E = build_adjacency(texts, oracle, args.policy, args.max_inflight)
    except OracleError as exc:
        raise PipelineError("oracle", exc) from exc
    return texts, truth, E


# -- subcommands --------------------------------------------------------------


def _fmt(x):
    if x is None:
        return "NA"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6f}"


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def cmd_entropy(args, out) -> int:
    _, truth, E = _adjacency_from_args(args)
    if E.shape[0] < 2:
        raise InputError(f"need at least 2 items, got {E.shape[0]}")
    config = SpectralConfig(variant=args.variant, restarts=args.restarts, seed=args.seed)
    report = run_pipeline(E=E, truth=truth, k=args.k, seed=args.seed, config=config)
    print(f"K\t{report.K}", file=out)
    print(f"e_hat\t{_fmt(report.e_hat)}", file=out)
    print("cluster_sizes\t" + " ".join(map(str, report.cluster_sizes)), file=out)
    if truth is not None:
        print(f"e_bar\t{_fmt(report.e_bar)}", file=out)
        print(f"gap\t{_fmt(report.gap_bar_hat)}", file=out)
        print(f"m_error\t{_fmt(report.m_error)}", file=out)
        print(f"p_hat\t{_fmt(report.p_hat)}", file=out)
        print(f"q_hat\t{_fmt(report.q_hat)}", file=out)
        for name in sorted(report.bounds):
            print(f"bound_{name}\t{_fmt(report.bounds[name])}", file=out)
    if args.out:
        doc = report.to_dict()
        doc["labels"] = report.assignment.labels.tolist()
        _write_json(args.out, doc)
    return 0


def cmd_select_k(args, out) -> int:
    _, _, E = _adjacency_from_args(args)
    E = as_adjacency(E, weighted=True)
    config = SpectralConfig(variant=args.variant, restarts=args.restarts, seed=args.seed)
    res = select_k(E, args.k_min, args.k_max, folds=args.folds, seed=args.seed, loss=args.loss, config=config)
    for k, loss in zip(res.candidate_ks, res.losses):
        log.info("K=%d  mean held-out %s %.6f", k, res.loss, loss)
    print(res.chosen_k, file=out)
    if args.out:
        _write_json(
            args.out,
            {"candidate_ks": res.candidate_ks, "losses": res.losses, "chosen_k": res.chosen_k, "folds": res.folds,
             "seed": res.seed, "loss": res.loss},
        )
    return 0


def _pq_from_args(args):
    if args.model_row:
        rows = TABLE1_ROWS[args.item_list]
        lookup = {k.lower(): k for k in rows}
        pq = {}
        for name in args.model_row:
            key = lookup.get(name.lower())
            if key is None:
                raise InputError(f"unknown model row {name!r}; expected one of {sorted(rows)}")
            pq[key] = list(rows[key])
        return pq
    if args.p is not None or args.q is not None:
        if args.p is None or args.q is None:
            raise InputError("give both --p and --q")
        return {"custom": [args.p, args.q]}
    return None


def cmd_simulate(args, out) -> int:
    if args.k not in ("true", "cv"):
        raise InputError("simulate takes --k true or --k cv")
    cfg = ExperimentConfig(
        scenario=args.scenario,
        ratios=args.ratios,
        sizes=args.sizes,
        pq=_pq_from_args(args),
        k_policy=args.k,
        replications=args.reps,
        seed=args.seed,
        variant=args.variant,
        restarts=args.restarts,
        item_list=args.item_list,
        M=args.items_per_text,
        template=args.text_template,
        p_vec=args.p_vec,
        workers=args.max_inflight,
    )
    report = run_experiment(cfg)
    writer = csv.writer(out, lineterminator="\n")
    if cfg.scenario == "table1":
        writer.writerows(table1_rows(report))
    else:
        fields = [k for k in report.aggregates[0] if k.endswith("_mean") or k.endswith("_se")]
        head = ["row", "p", "q", "n"]
        writer.writerow(head + fields)
        for a in report.aggregates:
            writer.writerow([a["row"], _fmt(a["p"]), _fmt(a["q"]), a["n"]] + [_fmt(a[f]) for f in fields])
    for key, value in report.summary.items():
        log.info("%s: %s", key, value)
    if args.out:
        persist_report(report, args.out)
    return 0


# -- parser -------------------------------------------------------------------


def _common(p, *, oracle=True):
    p.add_argument("--seed", type=int, default=0, help="master random seed (default 0)")
    p.add_argument("--variant", choices=VARIANTS, default="unnormalized", help="spectral embedding (default unnormalized)")
    p.add_argument("--restarts", type=int, default=10, help="k-means restarts (default 10)")
    p.add_argument("--max-inflight", type=int, default=1, help="concurrent oracle calls or simulation workers")
    p.add_argument("--out", metavar="PATH", help="also write results here")
    p.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    if oracle:
        p.add_argument("input", help="JSONL records {id, text, truth_label}, plain text, or a 0/1 adjacency matrix")
        p.add_argument("--format", choices=("auto", "jsonl", "plain", "matrix", "npy"), default="auto",
                       help="input format (default: detect)")
        p.add_argument("--oracle", choices=("mock", "llm"), default="mock", help="pairwise judge (default mock)")
        p.add_argument("--p", type=_prob, help="mock oracle within-cluster edge probability")
        p.add_argument("--q", type=_prob, help="mock oracle between-cluster edge probability")
        p.add_argument("--policy", choices=POLICIES, default="single", help="how ordered verdicts combine")
        p.add_argument("--template", choices=TEMPLATES, default="formatted", help="LLM prompt template")
        p.add_argument("--endpoint", help="chat-completion URL (or SSE_ENDPOINT)")
        p.add_argument("--model", help="model name (or SSE_MODEL); the key comes from SSE_API_KEY")
        p.add_argument("--cache", metavar="PATH", help="NDJSON verdict cache to read and extend")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sse", description="Semantic spectral entropy of text collections.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("entropy", help="score a text collection", description="Cluster a collection and report its entropy.")
    _common(p)
    p.add_argument("--k", type=_parse_k, default="true", help="cluster count: N, 'cv' or 'true' (default true)")

    p = sub.add_parser("select-k", help="choose K by cross-validation", description="Pick the number of clusters by pair holdout.")
    _common(p)
    p.add_argument("--k-min", type=int, default=1, help="smallest candidate K (default 1)")
    p.add_argument("--k-max", type=int, help="largest candidate K (default min(10, n/4))")
    p.add_argument("--folds", type=int, default=5, help="pair folds (default 5)")
    p.add_argument("--loss", choices=("mse", "nll"), default="mse", help="held-out loss (default mse)")

    p = sub.add_parser("simulate", help="run a simulation study", description="Run a seeded simulation and print per-cell means.")
    p.add_argument("scenario", choices=SCENARIOS, help="study to run")
    _common(p, oracle=False)
    p.add_argument("--k", choices=("true", "cv"), default="true", help="K policy (default true)")
    p.add_argument("--model-row", action="append", help="judge row(s) whose (p, q) to use; repeatable")
    p.add_argument("--item-list", choices=("hobbies", "events"), default="hobbies", help="corpus item list (table1)")
    p.add_argument("--p", type=_prob, help="within-cluster edge probability (with --q, replaces the row grid)")
    p.add_argument("--q", type=_prob, help="between-cluster edge probability")
    p.add_argument("--ratios", type=_ratio_grid, help="cluster ratios, e.g. '0.2,0.3,0.5;0.5,0.5'")
    p.add_argument("--sizes", type=_ints, help="collection sizes, e.g. 30,50,70")
    p.add_argument("--p-vec", type=_floats, help="cluster probabilities for generative studies")
    p.add_argument("--reps", type=int, help="replications per cell")
    p.add_argument("--items-per-text", type=int, default=3, help="items listed per text (default 3)")
    p.add_argument("--text-template", choices=("canonical", "varied"), default="canonical", help="sentence forms")
    return parser


COMMANDS = {"entropy": cmd_entropy, "select-k": cmd_select_k, "simulate": cmd_simulate}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args, out)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE if exc.stage == "oracle" else EXIT_NUMERIC
    except OracleError as exc:
        print(f"error: oracle stage failed: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (SpectralError, np.linalg.LinAlgError, BoundConditionError) as exc:
        print(f"error: numerical stage failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: input stage failed: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
