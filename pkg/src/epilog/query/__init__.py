"""Structured episodic queries: parsing, evaluation and narration."""

from epilog.query.ast import Query, to_dsl
from epilog.query.engine import Answer, eval_query, match
from epilog.query.narrate import describe_time, narrate
from epilog.query.parser import GRAMMAR, parse_query

__all__ = ["Answer", "GRAMMAR", "Query", "describe_time", "eval_query", "match", "narrate",
           "parse_query", "to_dsl"]
