"""Recursive-descent parser for the episodic query language.

Keywords and enumerated values (kinds, emotion groups) are case-insensitive;
identifiers keep their case.  Errors report the character offset of the
offending token; a query that ends too early is reported at its last token.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from epilog.errors import QuerySyntaxError
from epilog.model import EmotionGroup, Kind
from epilog.query.ast import (
    Condition,
    Conditions,
    Describe,
    During,
    EmotionAtLeast,
    EntityIs,
    Feeling,
    FindEpisodes,
    KindIs,
    LabelHas,
    Last,
    LocationIs,
    Query,
    StateOf,
    When,
    WhereIs,
)

GRAMMAR = """\
query    = find | when | whereis | state | feeling | describe ;
find     = "FIND" "EPISODES" ["WHERE" conds] ["ORDER" "BY" ("TIME"|"RELEVANCE")] ["LIMIT" integer] ;
when     = "WHEN" conds ;
whereis  = "WHERE-IS" ident ["AT" integer] ;
state    = "STATE" "OF" ident ["FIELD" ident] ["AT" integer] ;
feeling  = "FEELING" ["WHERE" conds] ;
describe = "DESCRIBE" (integer | "LAST" ["WHERE" conds]) ;
conds    = cond {"AND" cond} ;
cond     = "KIND" "=" ("context"|"task"|"capability") | "LABEL" "~" quoted
         | "LOCATION" "=" ident | "ENTITY" "=" ident
         | "EMOTION" "=" group [">=" integer] | "DURING" "[" integer "," integer "]" ;
group    = "joy_trust" | "sadness_fear" | "surprise_anticipation" | "anger_disgust" ;
"""

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>\d+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<op>>=|=|~|\[|\]|,)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # string | int | word | op
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


_GROUPS = {g.value: g for g in EmotionGroup}
_KINDS = {k.value: k for k in Kind}
_COND_KEYWORDS = frozenset({"KIND", "LABEL", "LOCATION", "ENTITY", "EMOTION", "DURING"})


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers --
    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, expected) -> QuerySyntaxError:
        expected = frozenset(expected)
        tok = self.peek()
        wanted = " or ".join(sorted(expected))
        if tok is None:
            pos = self.tokens[-1].pos if self.tokens else 0
            after = f" after {self.tokens[-1].text!r}" if self.tokens else ""
            return QuerySyntaxError(f"unexpected end of query{after}, expected {wanted}", pos, expected)
        return QuerySyntaxError(f"unexpected {tok.text!r}, expected {wanted}", tok.pos, expected)

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "word" and tok.text.upper() in words

    def accept_keyword(self, *words: str) -> Optional[str]:
        if self.at_keyword(*words):
            self.i += 1
            return self.tokens[self.i - 1].text.upper()
        return None

    def keyword(self, *words: str) -> str:
        word = self.accept_keyword(*words)
        if word is None:
            raise self.error(words)
        return word

    def op(self, symbol: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != symbol:
            raise self.error({symbol})
        self.i += 1

    def accept_op(self, symbol: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == symbol:
            self.i += 1
            return True
        return False

    def integer(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "int":
            raise self.error({"integer"})
        self.i += 1
        return int(tok.text)

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word":
            raise self.error({"identifier"})
        self.i += 1
        return tok.text

    def choice(self, table: dict, what: str):
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text.lower() not in table:
            raise self.error(set(table) if len(table) < 8 else {what})
        self.i += 1
        return table[tok.text.lower()]

    # -- grammar --
    def query(self) -> Query:
        head = self.keyword("FIND", "WHEN", "WHERE-IS", "STATE", "FEELING", "DESCRIBE")
        q = getattr(self, "_" + head.lower().replace("-", "_"))()
        if self.peek() is not None:
            raise self.error({"end of query"})
        return q

    def _find(self) -> FindEpisodes:
        self.keyword("EPISODES")
        conds: Conditions = ()
        order, limit = "time", None
        if self.accept_keyword("WHERE"):
            conds = self.conds()
        if self.accept_keyword("ORDER"):
            self.keyword("BY")
            order = self.keyword("TIME", "RELEVANCE").lower()
        if self.accept_keyword("LIMIT"):
            limit = self.integer()
        return FindEpisodes(conds, order, limit)

    def _when(self) -> When:
        return When(self.conds())

    def _where_is(self) -> WhereIs:
        entity = self.ident()
        at = self.integer() if self.accept_keyword("AT") else None
        return WhereIs(entity, at)

    def _state(self) -> StateOf:
        self.keyword("OF")
        entity = self.ident()
        field = self.ident() if self.accept_keyword("FIELD") else None
        at = self.integer() if self.accept_keyword("AT") else None
        return StateOf(entity, field, at)

    def _feeling(self) -> Feeling:
        return Feeling(self.conds() if self.accept_keyword("WHERE") else ())

    def _describe(self) -> Describe:
        tok = self.peek()
        if tok is not None and tok.kind == "int":
            return Describe(self.integer())
        if not self.accept_keyword("LAST"):
            raise self.error({"integer", "LAST"})
        return Describe(Last(self.conds() if self.accept_keyword("WHERE") else ()))

    def conds(self) -> Conditions:
        out = [self.cond()]
        while self.accept_keyword("AND"):
            out.append(self.cond())
        return tuple(out)

    def cond(self) -> Condition:
        word = self.keyword(*_COND_KEYWORDS)
        if word == "KIND":
            self.op("=")
            return KindIs(self.choice(_KINDS, "kind"))
        if word == "LABEL":
            self.op("~")
            tok = self.peek()
            if tok is None or tok.kind != "string":
                raise self.error({"quoted string"})
            self.i += 1
            return LabelHas(json.loads(tok.text))
        if word == "LOCATION":
            self.op("=")
            return LocationIs(self.ident())
        if word == "ENTITY":
            self.op("=")
            return EntityIs(self.ident())
        if word == "EMOTION":
            self.op("=")
            group = self.choice(_GROUPS, "emotion group")
            level = 1
            if self.accept_op(">="):
                at = self.peek()
                level = self.integer()
                if level > 3:
                    raise QuerySyntaxError("emotion level must be 0..3", at.pos, frozenset({"0", "1", "2", "3"}))
            return EmotionAtLeast(group, level)
        # DURING
        self.op("[")
        start = self.integer()
        self.op(",")
        end = self.integer()
        self.op("]")
        return During(start, end)


def parse_query(text: str) -> Query:
    try:
        return _Parser(text).query()
    except json.JSONDecodeError as exc:  # malformed escape inside a quoted label
        raise QuerySyntaxError(f"bad string literal: {exc.msg}", exc.pos) from exc
