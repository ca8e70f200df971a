"""``colsel`` command line.

Exit status: 0 on success, 1 on a data error, 2 on a usage error. Failures
print one JSON object on standard error.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys

import colsel
from colsel import bounds, harness
from colsel.errors import ColselError
from colsel.io import (
    BOUND_TRACE_COLUMNS,
    ORIENTATIONS,
    POLICIES,
    SELECT_TRACE_COLUMNS,
    DatasetHandle,
    ReportDocument,
    load_csv,
    write_table,
)
from colsel.linalg import coherence
from colsel.selection import SelectionConfig, greedy_select

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def _emit_error(payload):
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _start(value):
    if value == "random":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'random' or a column index, got {value!r}")


def _methods(value):
    items = tuple(m.strip() for m in value.split(",") if m.strip())
    bad = [m for m in items if m not in harness.METHODS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}; choose from {','.join(harness.METHODS)}")
    return items


def _add_dataset_args(p):
    p.add_argument("input", help="CSV matrix file")
    p.add_argument("--orientation", choices=ORIENTATIONS, default="columns-are-features")
    p.add_argument("--policy", choices=POLICIES, default="normalize")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="colsel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=colsel.__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coherence", help="print the coherence of a matrix")
    _add_dataset_args(p)

    p = sub.add_parser("select", help="greedy column selection with certificate")
    _add_dataset_args(p)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--start", type=_start, default="random")
    p.add_argument("--mode", choices=("exact", "certificate"), default="exact")
    p.add_argument("--max-cols", type=int, default=None)
    p.add_argument("--parallel-scan", action="store_true")
    p.add_argument("--report", default=None, help="JSON report path (default: stdout)")
    p.add_argument("--trace", default=None, help="per-step CSV path")

    p = sub.add_parser("bound", help="evaluate perturbation bounds")
    bsub = p.add_subparsers(dest="bound_kind", required=True, parser_class=_Parser)
    b = bsub.add_parser("one", help="one appended column")
    b.add_argument("--lambda", dest="lam", type=float, required=True)
    b.add_argument("--w", type=float, required=True)
    b = bsub.add_parser("batch", help="several appended columns")
    b.add_argument("--mu", type=float, required=True)
    b.add_argument("--alpha", type=float, required=True)
    b.add_argument("--s0", type=int, required=True)
    b.add_argument("--s1", type=int, required=True)
    b.add_argument("--lambda", dest="lam", type=float, required=True)
    b = bsub.add_parser("gershgorin", help="disc bound")
    b.add_argument("--mu", type=float, required=True)
    b.add_argument("--s", type=int, required=True)

    p = sub.add_parser("simulate", help="Monte Carlo comparison of selectors")
    p.add_argument("--rows", type=int, default=100)
    p.add_argument("--cols", type=int, default=1000)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--methods", type=_methods, default=("greedy-exact", "random"))
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--m", type=int, default=5, help="number of smallest singular values kept")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", default=None)

    p = sub.add_parser("trace", help="bound-versus-truth curves along a greedy run")
    p.add_argument("--rows", type=int, default=20)
    p.add_argument("--cols", type=int, default=200)
    p.add_argument("--steps", type=int, default=15)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--input", default=None, help="CSV matrix instead of a Gaussian draw")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--report", default=None)
    return parser


def _seed(value):
    return value if value is not None else secrets.randbits(63)


def _document(kind, command, result):
    command = {"command": kind, **command}
    return ReportDocument(kind=kind, command=command, result=result, library_version=colsel.__version__)


def _publish(doc, path):
    if path:
        doc.write(path)
    else:
        sys.stdout.write(doc.to_json())


def _cmd_coherence(args):
    X = load_csv(DatasetHandle(args.input, args.orientation, args.policy))
    print(repr(coherence(X)))


def _cmd_select(args):
    seed = _seed(args.seed)
    cfg = SelectionConfig(
        epsilon=args.epsilon,
        max_cols=args.max_cols,
        seed=seed,
        start=args.start,
        mode=args.mode,
        parallel_scan=args.parallel_scan,
    )
    X = load_csv(DatasetHandle(args.input, args.orientation, args.policy))
    trace = greedy_select(X, cfg)
    command = {"input": args.input, "orientation": args.orientation, "policy": args.policy, **cfg.as_dict()}
    result = {"rows": X.n, "cols": X.p, "backend": colsel.BACKEND, **trace.as_dict()}
    _publish(_document("select", command, result), args.report)
    if args.trace:
        write_table(args.trace, SELECT_TRACE_COLUMNS, [st.as_dict() for st in trace.steps])


def _cmd_bound(args):
    if args.bound_kind == "one":
        out = bounds.bound_append_minform(args.lam, args.w).as_dict()
        out = {"sharp": out["sharp_bound"], "minform": out["minform_bound"], **out}
    elif args.bound_kind == "batch":
        params = bounds.BatchBoundParams(args.mu, args.alpha, args.s0, args.s1, args.lam)
        first, second = bounds.eps_min_branches(params)
        out = {
            "alpha_bound": bounds.bound_append_alpha(params),
            "eps_min": bounds.eps_min(params),
            "eps_min_first": first,
            "eps_min_second": second,
            "batch_bound": bounds.batch_lower_bound(params),
            "recursion": bounds.bound_successive_recursion(params).as_dict(),
        }
    else:
        out = {"gershgorin": bounds.gershgorin_lower_bound(args.mu, args.s)}
    doc = _document("bound", {k: v for k, v in vars(args).items() if k != "command"}, out)
    sys.stdout.write(doc.to_json())


def _cmd_simulate(args):
    spec = harness.EnsembleSpec(
        rows=args.rows,
        cols=args.cols,
        trials=args.trials,
        seed=_seed(args.seed),
        k=args.k,
        epsilon=args.epsilon,
        methods=args.methods,
        m=args.m,
    )
    results = harness.run_trials(spec, workers=args.workers)
    summary = harness.summarize(results)
    result = {"summary": summary.as_dict(), "trials": [r.as_dict() for r in results]}
    _publish(_document("simulate", {**spec.as_dict(), "workers": args.workers}, result), args.report)


def _cmd_trace(args):
    seed = _seed(args.seed)
    if args.input:
        X = load_csv(DatasetHandle(args.input))
    else:
        X = harness.gen_gaussian(args.rows, args.cols, seed)
    cfg = SelectionConfig(seed=seed, max_cols=args.steps, stop_on_eta=False)
    rep = harness.bound_trace(X, cfg)
    rows = [r.as_dict() for r in rep.rows]
    if args.out:
        write_table(args.out, BOUND_TRACE_COLUMNS, rows)
    else:
        write_table(sys.stdout, BOUND_TRACE_COLUMNS, rows)
    if args.report:
        command = {"rows": X.n, "cols": X.p, "steps": args.steps, "seed": seed, "input": args.input}
        result = {**rep.as_dict(), "violations": [list(v) for v in rep.violations()]}
        _document("trace", command, result).write(args.report)


COMMANDS = {
    "coherence": _cmd_coherence,
    "select": _cmd_select,
    "bound": _cmd_bound,
    "simulate": _cmd_simulate,
    "trace": _cmd_trace,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _emit_error({"error": "Usage", "message": str(exc)})
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except ColselError as exc:
        _emit_error(exc.as_dict())
        return EXIT_USAGE if exc.usage else EXIT_DATA
    except OSError as exc:
        _emit_error({"error": "IO", "message": str(exc)})
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
