"""Command-line entry points: load, query, repl, corpus gen, nlu train,
eval, serve."""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import corpus as corpus_mod
from .catalog import Database, load_dataset, relation_stats
from .corpus import QueryType, read_corpus, write_corpus
from .data_paths import datasets_dir, default_model_path
from .errors import NlstplanError
from .nlu import TypeClassifier, train_classifier
from .pipeline import build_query_response, extraction_from_slots, translate
from .plan import execute, map_query


def _open_db(args) -> Database:
    root = datasets_dir(getattr(args, "data", None))
    path = root / args.db
    if not path.is_dir():
        # allow passing a dataset directory directly
        path = Path(args.db)
    return load_dataset(path)


def _load_model(path: str | None) -> TypeClassifier:
    model_file = Path(path) if path else default_model_path()
    return TypeClassifier.load(model_file)


def cmd_load(args) -> int:
    db = _open_db(args)
    doc = {"name": db.name, "relations": []}
    for name in db.base_names:
        st = relation_stats(db, name)
        doc["relations"].append({"name": name, "tuples": st.tuple_count,
                                 "indexes": sorted(db.relations[name].indexes)})
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"loaded {db.name}")
        for rel in doc["relations"]:
            idx = f" (indexed: {', '.join(rel['indexes'])})" if rel["indexes"] else ""
            print(f"  {rel['name']}: {rel['tuples']} tuples{idx}")
    return 0


def _print_response(response: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(response, indent=2))
        return
    if "error" in response:
        err = response["error"]
        print(f"error ({err['category']}): {err['message']}")
        for s in err.get("suggestions", []):
            print(f"  try: {s}")
        return
    print(f"type: {response['trace']['query_type']}")
    print(f"plan: {response['plan_text']}")
    timing = response["timing"]
    opt = (f", optimized {timing['optimized_ms']:.1f} ms"
           if timing.get("optimized_ms") is not None else "")
    print(f"time: translation {timing['translation_ms']:.1f} ms, "
          f"baseline {timing['baseline_ms']:.1f} ms{opt}")
    rows = response["results"]["rows"]
    names = [a["name"] for a in response["results"]["schema"]]
    print(f"rows: {len(rows)}")
    for row in rows[:args_max_rows]:
        print("  " + " | ".join(f"{n}={_short(v)}" for n, v in zip(names, row)))
    if len(rows) > args_max_rows:
        print(f"  ... {len(rows) - args_max_rows} more")


args_max_rows = 10


def _short(v, limit: int = 48) -> str:
    s = str(v)
    return s if len(s) <= limit else s[:limit] + "..."


def cmd_query(args) -> int:
    db = _open_db(args)
    clf = _load_model(args.model)
    response = build_query_response(db, args.nlq, clf, optimize=args.optimize,
                                    seed=args.seed)
    _print_response(response, args.json)
    return 0 if "error" not in response else 1


def cmd_repl(args) -> int:
    db = _open_db(args)
    clf = _load_model(args.model)
    print(f"nlstplan repl on {db.name} (blank line or Ctrl-D to exit)")
    while True:
        try:
            line = input("nlq> ").strip()
        except EOFError:
            print()
            return 0
        if not line:
            return 0
        response = build_query_response(db, line, clf, optimize=args.optimize,
                                        seed=args.seed)
        _print_response(response, args.json)


def cmd_corpus_gen(args) -> int:
    db = _open_db(args)
    entries = corpus_mod.generate(db, args.n, args.seed)
    if args.out:
        write_corpus(entries, args.out)
        print(f"wrote {len(entries)} entries to {args.out}")
    else:
        for e in entries:
            print(e.to_json())
    return 0


def cmd_nlu_train(args) -> int:
    entries = read_corpus(args.corpus)
    clf = train_classifier(entries, seed=args.seed)
    clf.save(args.out)
    print(f"trained on {len(entries)} entries; model written to {args.out}")
    return 0


@dataclass
class EvalReport:
    n: int
    translated: int
    correct: int
    translatability: float
    precision: float
    mean_response_ms: float
    p95_response_ms: float
    per_type: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def evaluate(db: Database, entries, clf: TypeClassifier, seed: int = 7) -> EvalReport:
    """Translatability / precision / response time over a ground-truth corpus.

    A query counts as translated when the pipeline produces a plan, and as
    correct when executing that plan returns exactly the rows the
    ground-truth plan (instantiated from bound slots) returns.
    """
    translated = 0
    correct = 0
    times: list[float] = []
    per_type: dict[str, dict[str, int]] = {
        qt.value: {"n": 0, "translated": 0, "correct": 0} for qt in QueryType}

    for entry in entries:
        bucket = per_type[entry.query_type.value]
        bucket["n"] += 1
        t0 = time.perf_counter()
        try:
            tr = translate(entry.nlq, db, clf)
            result, _ms = execute(tr.plan, db)
        except NlstplanError:
            times.append((time.perf_counter() - t0) * 1000.0)
            continue
        times.append((time.perf_counter() - t0) * 1000.0)
        translated += 1
        bucket["translated"] += 1

        try:
            truth_ex = extraction_from_slots(entry.slots, entry.query_type, db)
            truth_plan = map_query(entry.query_type, truth_ex, db)
            if truth_plan == tr.plan:
                # identical plans execute identically (execution is
                # deterministic over an immutable database)
                expected = result
            else:
                expected, _ = execute(truth_plan, db)
        except NlstplanError:
            continue
        if result == expected:
            correct += 1
            bucket["correct"] += 1

    n = len(entries)
    return EvalReport(
        n=n,
        translated=translated,
        correct=correct,
        translatability=translated / n if n else 0.0,
        precision=correct / translated if translated else 0.0,
        mean_response_ms=statistics.fmean(times) if times else 0.0,
        p95_response_ms=(statistics.quantiles(times, n=20)[-1] if len(times) >= 2
                         else (times[0] if times else 0.0)),
        per_type=per_type,
    )


def cmd_eval(args) -> int:
    db = _open_db(args)
    clf = _load_model(args.model)
    corpus_path = Path(args.corpus)
    if not corpus_path.exists():
        raise FileNotFoundError(f"corpus file {corpus_path} not found")
    entries = read_corpus(corpus_path)
    report = evaluate(db, entries, clf, seed=args.seed)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(f"n={report.n} translatability={report.translatability:.3f} "
              f"precision={report.precision:.3f}")
        print(f"mean={report.mean_response_ms:.1f} ms p95={report.p95_response_ms:.1f} ms")
        for qt, bucket in report.per_type.items():
            print(f"  {qt}: {bucket['correct']}/{bucket['translated']}/{bucket['n']} "
                  "(correct/translated/n)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data, model_path=args.model, seed=args.seed,
                     ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlstplan",
                                     description="natural-language spatio-temporal queries")
    parser.add_argument("--data", help="datasets directory (default: bundled; env NLSTPLAN_DATA)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="load a dataset and print its stats")
    p.add_argument("--db", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_load)

    p = sub.add_parser("query", help="translate and execute one query")
    p.add_argument("--db", required=True)
    p.add_argument("--nlq", required=True)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--model")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("repl", help="interactive query loop")
    p.add_argument("--db", required=True)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--model")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("corpus", help="corpus tools")
    corpus_sub = p.add_subparsers(dest="corpus_command", required=True)
    g = corpus_sub.add_parser("gen", help="generate NLQ corpus entries")
    g.add_argument("--db", required=True)
    g.add_argument("-n", type=int, required=True)
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_corpus_gen)

    p = sub.add_parser("nlu", help="nlu tools")
    nlu_sub = p.add_subparsers(dest="nlu_command", required=True)
    t = nlu_sub.add_parser("train", help="train the type classifier")
    t.add_argument("--corpus", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(fn=cmd_nlu_train)

    p = sub.add_parser("eval", help="run the metrics harness")
    p.add_argument("--db", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--model")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--ui", help="static web console directory")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (NlstplanError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
