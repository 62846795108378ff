"""Run the EpLTM test against the engine and score the answers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from epilog.errors import EpilogError
from epilog.evidence import EvidenceBundle, assemble, check_coherence
from epilog.harness.queries import CATEGORIES, QueryItem, default_session
from epilog.harness.scenario import Scenario
from epilog.memory import EngineConfig, Memory
from epilog.query import Answer, eval_query, parse_query

Evaluator = Callable[..., Answer]
Tamper = Callable[[int, EvidenceBundle], EvidenceBundle]


def canonical(payload: object) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


@dataclass
class QueryResult:
    index: int
    category: str
    dsl: str
    correct: bool
    coherent: bool
    expected: dict
    answer: Optional[dict] = None
    reasons: list[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.correct and self.coherent

    def to_json(self) -> dict:
        return {"index": self.index, "category": self.category, "dsl": self.dsl, "correct": self.correct,
                "coherent": self.coherent, "expected": self.expected, "answer": self.answer,
                "reasons": self.reasons, "error": self.error}


@dataclass
class ScoreReport:
    results: list[QueryResult]

    @property
    def coverage(self) -> dict[str, bool]:
        return {c: any(r.ok for r in self.results if r.category == c) for c in CATEGORIES}

    @property
    def correct(self) -> int:
        return sum(r.correct for r in self.results)

    @property
    def coherent(self) -> int:
        return sum(r.coherent for r in self.results)

    @property
    def total(self) -> float:
        return sum(r.ok for r in self.results) / len(self.results) if self.results else 0.0

    @property
    def passed(self) -> bool:
        """At least one correct and coherent answer per category."""
        return all(self.coverage.values())

    def to_json(self) -> dict:
        return {"queries": [r.to_json() for r in self.results], "coverage": self.coverage,
                "correct": self.correct, "coherent": self.coherent, "asked": len(self.results),
                "total": self.total, "pass": self.passed}


def run_and_score(s: Scenario, items: Sequence[QueryItem], config: Optional[EngineConfig] = None,
                  select: Optional[Sequence[int]] = None, evaluate: Evaluator = eval_query,
                  tamper: Optional[Tamper] = None) -> ScoreReport:
    """Replay the scenario, then ask the selected items in index order.

    ``evaluate`` stands in for :func:`eval_query` and ``tamper`` may rewrite a
    bundle before it is checked; both exist so referee behaviour can be tested.
    """
    config = config or EngineConfig()
    memory = Memory(s.arena, config.params)
    memory.ingest(s.events)
    memory.consolidate()
    indexes = sorted(select) if select is not None else list(range(len(items)))
    results = []
    for index in indexes:
        item = items[index]
        result = QueryResult(index, item.category, item.dsl, False, False, item.truth)
        try:
            memory.ingest(item.fresh)
            memory.consolidate(item.asked_at)
            answer = evaluate(parse_query(item.dsl), memory.store, item.asked_at, config.params)
            result.answer = answer.payload
            result.correct = canonical(answer.payload) == canonical(item.truth)
            bundle = memory.evidence(answer)
            if tamper is not None:
                bundle = tamper(index, bundle)
            verdict = check_coherence(answer, bundle, memory.store, memory.arena)
            result.coherent = verdict.ok
            result.reasons = list(verdict.reasons)
        except EpilogError as exc:
            result.error = f"{exc.code}: {exc}"
        results.append(result)
    return ScoreReport(results)


def session_and_extended(s: Scenario, items: Sequence[QueryItem],
                         config: Optional[EngineConfig] = None) -> tuple[ScoreReport, ScoreReport]:
    session = run_and_score(s, items, config, default_session(list(items)))
    extended = run_and_score(s, items, config)
    return session, extended


def score_document(session: ScoreReport, extended: ScoreReport) -> dict:
    return {"session": session.to_json(), "extended": extended.to_json(), "pass": session.passed}
