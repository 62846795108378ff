"""``epilog`` command line.

Exit codes: 0 success, 1 domain error (the error name is printed), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from filelock import FileLock, Timeout

from epilog.errors import EmptyProvenance, EpilogError
from epilog.evidence import write_report
from epilog.harness import (
    ScenarioConfig,
    default_session,
    generate_queries,
    generate_scenario,
    run_and_score,
    score_document,
)
from epilog.memory import EngineConfig, Memory
from epilog.query import GRAMMAR, Answer, eval_query, parse_query, to_dsl
from epilog.query.ast import Describe, StateOf, WhereIs
from epilog.store import Store, canonical_json, dump_events, read_events

EVENTS_FILE = "events.jsonl"
LOCK_FILE = ".lock"


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit by itself
        raise _Usage(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epilog", description="Episodic long-term memory engine.",
                     epilog="query grammar:\n" + GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="engine.json with relevance parameters, map, data dir and clock")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="append an event log and update working memory")
    p.add_argument("events")
    p = sub.add_parser("consolidate", help="move closed episodes into the long-term store")
    p.add_argument("--now", type=int)
    p = sub.add_parser("query", help="evaluate a query and print the answer as JSON",
                       epilog="grammar:\n" + GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("dsl")
    p.add_argument("--evidence", metavar="OUT_DIR")
    p.add_argument("--now", type=int)
    p = sub.add_parser("forget", help="prune episodes below the relevance threshold")
    p.add_argument("--now", type=int)
    sub.add_parser("validate", help="check store invariants")
    p = sub.add_parser("report", help="write the evidence report for one episode")
    p.add_argument("episode", type=int)
    p.add_argument("out")
    p.add_argument("--now", type=int)
    p = sub.add_parser("simulate", help="generate a scenario event log with ground truth")
    p.add_argument("scenario")
    p.add_argument("out")
    p.add_argument("--n-per-cat", type=int, default=4)
    p = sub.add_parser("evaluate", help="run the full EpLTM test and write score.json")
    p.add_argument("scenario")
    p.add_argument("out")
    p.add_argument("--n-per-cat", type=int, default=4)
    return parser


def _emit(doc: object) -> None:
    sys.stdout.write(canonical_json(doc))


def _open(config: EngineConfig) -> Memory:
    return Memory.open(config.data_dir, config.arena(), config.params)


def _now(config: EngineConfig, memory: Memory, flag: Optional[int]) -> int:
    return flag if flag is not None else config.now(memory.last_time)


def _ingest(args, config: EngineConfig) -> None:
    memory = _open(config)
    events = list(read_events(args.events))
    memory.ingest(events)
    memory.save(config.data_dir)
    with open(Path(config.data_dir) / EVENTS_FILE, "a", encoding="utf-8") as fh:
        fh.write(dump_events(events))
    _emit({"ingested": len(events), "open": len(memory.wm.open)})


def _consolidate(args, config: EngineConfig) -> None:
    memory = _open(config)
    stats = memory.consolidate(args.now)
    memory.save(config.data_dir)
    _emit(stats.to_json())


def _empty_answer(q, now: int, config: EngineConfig) -> Answer:
    """What an empty memory answers: entity questions get no value instead of UnknownEntity."""
    if isinstance(q, WhereIs):
        return Answer("where_is", to_dsl(q), now, {"entity": q.entity, "location": None}, [], config.params)
    if isinstance(q, StateOf):
        return Answer("state_of", to_dsl(q), now, {"entity": q.entity, "values": {}}, [], config.params)
    return eval_query(q, Store(), now, config.params)


def _query(args, config: EngineConfig) -> None:
    q = parse_query(args.dsl)
    if not Memory.exists(config.data_dir):
        now = args.now if args.now is not None else config.now(None)
        _emit(_empty_answer(q, now, config).to_json())
        return
    memory = _open(config)
    answer = eval_query(q, memory.store, _now(config, memory, args.now), config.params)
    _emit(answer.to_json())
    if args.evidence:
        if answer.empty:
            raise EmptyProvenance("the answer cites no episode, so there is no evidence to write")
        write_report(memory.evidence(answer), args.evidence)


def _forget(args, config: EngineConfig) -> None:
    memory = _open(config)
    pruned = memory.forget(_now(config, memory, args.now))
    memory.save(config.data_dir)
    _emit({"pruned": pruned})


def _validate(args, config: EngineConfig) -> int:
    violations = _open(config).validate()
    _emit({"violations": [v.to_json() for v in violations]})
    return 1 if violations else 0


def _report(args, config: EngineConfig) -> None:
    memory = _open(config)
    answer = eval_query(Describe(args.episode), memory.store, _now(config, memory, args.now), config.params)
    written = write_report(memory.evidence(answer), args.out)
    _emit({"answer": answer.to_json(), "files": [str(p) for p in written]})


def _scenario(args):
    cfg = ScenarioConfig.load(args.scenario)
    s = generate_scenario(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / EVENTS_FILE).write_text(dump_events(s.events), encoding="utf-8")
    (out / "scenario.json").write_text(canonical_json(cfg.to_json()), encoding="utf-8")
    (out / "truth.json").write_text(canonical_json(s.truth_json()), encoding="utf-8")
    items = generate_queries(s, args.n_per_cat)
    (out / "queries.json").write_text(canonical_json({"queries": [i.to_json() for i in items],
                                                      "session": default_session(items)}), encoding="utf-8")
    return s, items, out


def _simulate(args, config: EngineConfig) -> None:
    s, items, out = _scenario(args)
    _emit({"events": len(s.events), "episodes": len(s.episodes), "queries": len(items), "out": str(out)})


def _evaluate(args, config: EngineConfig) -> None:
    s, items, out = _scenario(args)
    session = run_and_score(s, items, config, default_session(items))
    extended = run_and_score(s, items, config)
    doc = score_document(session, extended)
    (out / "score.json").write_text(canonical_json(doc), encoding="utf-8")
    _emit({"pass": doc["pass"], "session": f"{session.correct}/{len(session.results)} correct, "
                                           f"{session.coherent}/{len(session.results)} coherent",
           "extended": f"{sum(r.ok for r in extended.results)}/{len(extended.results)}"})


_COMMANDS = {"ingest": _ingest, "consolidate": _consolidate, "query": _query, "forget": _forget,
             "validate": _validate, "report": _report, "simulate": _simulate, "evaluate": _evaluate}
_NEEDS_DATA_DIR = {"ingest", "consolidate", "forget", "validate", "report"}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        sys.stderr.write(f"{exc}\n\n{parser.format_usage()}\nquery grammar:\n{GRAMMAR}")
        return 2
    try:
        config = EngineConfig.load(args.config)
        handler = _COMMANDS[args.command]
        if args.command in _NEEDS_DATA_DIR or (args.command == "query" and Memory.exists(config.data_dir)):
            Path(config.data_dir).mkdir(parents=True, exist_ok=True)
            with FileLock(str(Path(config.data_dir) / LOCK_FILE), timeout=10):
                code = handler(args, config)
        else:
            code = handler(args, config)
        return code or 0
    except EpilogError as exc:
        sys.stderr.write(f"{exc.code}: {exc}\n")
        if exc.code == "SyntaxError":
            sys.stderr.write(f"\nquery grammar:\n{GRAMMAR}")
        return 1
    except Timeout:
        sys.stderr.write("Locked: another process owns the data directory\n")
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"IoError: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())
