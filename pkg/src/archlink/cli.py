"""Command-line driver.

Every command rebuilds engine state from the manifest (persistence is the
re-ingestable dump plus the append-only decision log) and writes its
artifacts into the output directory, so runs are reproducible from files
alone.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig
from .engine import Engine
from .errors import ArchlinkError
from .evaluation import select_model, write_grid_report
from .expansion import to_annotation_records
from .ingest import write_annotations
from .mentions import write_ambiguity_log
from .models import model_to_json


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="archlink",
        description="Relation discovery and review recommendations for archival catalogues",
    )
    parser.add_argument("--version", action="version", version=f"archlink {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="override the run seed")
    parser.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", type=Path, required=True, help="dump manifest path")
        p.add_argument("--out", type=Path, default=Path("out"), help="artifact directory")
        p.add_argument(
            "--decision-log", type=Path, default=None, help="append-only decision log path"
        )

    common(sub.add_parser("ingest", help="load a dump and report counts"))
    common(sub.add_parser("expand", help="write the expanded candidate tables"))
    common(sub.add_parser("eda", help="write the relation statistics report"))

    p_train = sub.add_parser("train", help="train one classifier")
    common(p_train)
    p_train.add_argument("--spec", required=True, help="feature spec name (e.g. inst, bio)")
    p_train.add_argument("--model", default="auto", choices=["lr", "nb", "dt", "auto"])
    p_train.add_argument(
        "--unit", default="historian_pair", choices=["historian_pair", "collection_pair"]
    )

    p_eval = sub.add_parser("evaluate", help="cross-validate the model x feature grid")
    common(p_eval)
    p_eval.add_argument("--grid", action="store_true", help="evaluate the full grid")

    p_rec = sub.add_parser("recommend", help="rank recommendations for an entity")
    common(p_rec)
    p_rec.add_argument("--entity", required=True)
    p_rec.add_argument("--limit", type=int, default=None)

    p_serve = sub.add_parser("serve", help="run the HTTP review service")
    common(p_serve)
    p_serve.add_argument("--port", type=int, default=8040)
    p_serve.add_argument("--host", default="127.0.0.1")

    p_export = sub.add_parser("export", help="write store or dataset snapshots")
    common(p_export)
    p_export.add_argument("--what", default="store", choices=["store", "datasets", "report"])
    return parser


def load_engine(args) -> Engine:
    config = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    log_path = args.decision_log or (args.out / "decisions.jsonl")
    return Engine.from_manifest(args.manifest, config, decision_log_path=log_path)


def cmd_ingest(args) -> int:
    engine = load_engine(args)
    summary = dict(engine.ingest_summary)
    summary["annotations"] = {k: len(v) for k, v in summary["annotations"].items()}
    summary["orphan_annotations"] = len(engine.orphans)
    summary["store"] = engine.store.counts()
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "ingest_summary.json").write_text(json.dumps(summary, indent=2), "utf-8")
    print(json.dumps(summary, indent=2))
    return 0


def cmd_expand(args) -> int:
    engine = load_engine(args)
    args.out.mkdir(parents=True, exist_ok=True)
    write_annotations(to_annotation_records(engine.topics), args.out / "artists_periods.csv")
    write_annotations(to_annotation_records(engine.institutions), args.out / "institutions.csv")
    merged_rows = [
        {
            "pair": list(row.pair),
            "topic": row.shared_subject,
            "institution": row.shared_institution,
            "relation_exists": row.annotation.relation_exists if row.annotation else None,
        }
        for row in engine.merged.rows
    ]
    (args.out / "merged.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in merged_rows), "utf-8"
    )
    print(
        f"expanded: {len(engine.topics.rows)} topic rows, "
        f"{len(engine.institutions.rows)} institution rows, "
        f"{len(engine.merged.rows)} merged rows -> {args.out}"
    )
    return 0


def cmd_eda(args) -> int:
    from .eda import write_report

    engine = load_engine(args)
    report = engine.eda_report()
    write_report(report, args.out)
    for mode in ("topics", "institutions"):
        net = engine.network(mode)
        (args.out / f"network_{mode}.json").write_text(
            json.dumps(net.to_json(), indent=2), "utf-8"
        )
    if engine.ambiguities:
        write_ambiguity_log(engine.ambiguities, args.out / "ambiguities.jsonl")
    print(report.text())
    return 0


def cmd_train(args) -> int:
    engine = load_engine(args)
    kind = args.model
    if kind == "auto":
        kind = select_model(engine.grid(args.unit).column(args.spec))
    model = engine.train_model(args.spec, kind, args.unit)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"model_{args.unit}_{args.spec.replace('+', '_')}_{kind}.json"
    path.write_text(json.dumps(model_to_json(model), indent=2), "utf-8")
    metrics = engine.grid(args.unit).column(args.spec)[kind]
    print(
        f"trained {kind} on {args.spec} ({args.unit}): "
        f"p={metrics.p:.2f} p(1)={metrics.p1:.2f} r(1)={metrics.r1:.2f} a={metrics.a:.2f} "
        f"-> {path}"
    )
    return 0


def cmd_evaluate(args) -> int:
    engine = load_engine(args)
    for unit, stem in (("historian_pair", "grid_historians"), ("collection_pair", "grid_collections")):
        report = engine.grid(unit)
        write_grid_report(report, args.out, stem)
        print(report.to_text())
    return 0


def cmd_recommend(args) -> int:
    engine = load_engine(args)
    recs = engine.recommendations(args.entity, limit=args.limit)
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / f"recommendations_{args.entity.replace('/', '_')}.jsonl"
    with out_path.open("w", encoding="utf-8") as fh:
        for rec in recs:
            fh.write(json.dumps(rec.as_dict()) + "\n")
    for rec in recs:
        print(
            f"{rec.score:0.2f}  {rec.pair[0]} -[{rec.predicate}]- {rec.pair[1]}  "
            f"({rec.source}, {'known' if rec.known else 'unknown'})"
        )
    print(f"{len(recs)} recommendation(s) -> {out_path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    engine = load_engine(args)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_export(args) -> int:
    from .ingest import export_store

    engine = load_engine(args)
    if args.what == "store":
        export_store(engine.store, args.out)
        print(f"store snapshot -> {args.out}")
    elif args.what == "datasets":
        return cmd_expand(args)
    else:
        return cmd_eda(args)
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "expand": cmd_expand,
    "eda": cmd_eda,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "recommend": cmd_recommend,
    "serve": cmd_serve,
    "export": cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ArchlinkError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
