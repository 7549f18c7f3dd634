"""Canonical plan text: rendering and parsing.

Grammar (one line, whitespace-normalized):

    plan     := "query" source (op)* terminal ";"
    source   := REL "feed"
              | INDEX REL "windowintersects[" xmin ymin xmax ymax "]"
    op       := source                      -- pushes a second input stream
              | "filter [(" pred ")]"
              | "knearest[" ATTR "," OBJ "," INT ("," period)? "]"
              | "spatialjoin[" ATTR "," ATTR "," PREDNAME "]"
              | "similarity[" ATTR "," OBJ "," INT "]"
              | "project[" ATTR ("," ATTR)* "]"
    terminal := "consume" | "count" | "aggregate[" FN "," ATTR "]"

Operators act on a stack of streams: sources push, unary ops replace the
top, spatialjoin pops two. Periods print as "[start, end)" in ms; geometry
literals print as WKT.
"""

from __future__ import annotations

import re

from ..errors import BadGeometry, PlanSyntaxError
from ..geo import Period, Rect, from_wkt, to_wkt
from .ops import (
    Aggregate,
    And,
    AttrRef,
    Consume,
    Contains,
    Count,
    DeftimeIntersects,
    DistanceLe,
    Feed,
    Filter,
    GeomLit,
    Intersects,
    KNearest,
    Or,
    PhysicalOp,
    PhysicalPlan,
    Predicate,
    PredArg,
    Project,
    SimilarityOp,
    SpatialJoin,
    WindowIntersects,
    plan_of,
)


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _period(p: Period) -> str:
    return f"[{p.start}, {p.end})"


def _arg(a: PredArg) -> str:
    if isinstance(a, AttrRef):
        return f".{a.name}"
    return to_wkt(a.value)


def render_predicate(pred: Predicate) -> str:
    if isinstance(pred, Contains):
        return f"contains({_arg(pred.a)}, {_arg(pred.b)})"
    if isinstance(pred, Intersects):
        return f"intersects({_arg(pred.a)}, {_arg(pred.b)})"
    if isinstance(pred, DeftimeIntersects):
        return f"deftime(.{pred.attr}) intersects {_period(pred.period)}"
    if isinstance(pred, DistanceLe):
        return f"distance({_arg(pred.a)}, {_arg(pred.b)}) <= {_num(pred.limit)}"
    if isinstance(pred, (And, Or)):
        word = "and" if isinstance(pred, And) else "or"

        def wrap(side: Predicate) -> str:
            text = render_predicate(side)
            return f"({text})" if isinstance(side, (And, Or)) else text

        return f"{wrap(pred.left)} {word} {wrap(pred.right)}"
    raise TypeError(f"cannot render predicate {pred!r}")


def _render_op(op: PhysicalOp) -> str:
    if isinstance(op, Feed):
        return f"{op.relation} feed"
    if isinstance(op, WindowIntersects):
        w = op.window
        rect = f"{_num(w.xmin)} {_num(w.ymin)} {_num(w.xmax)} {_num(w.ymax)}"
        return f"{op.index_id} {op.relation} windowintersects[{rect}]"
    if isinstance(op, Filter):
        return f"{_render_op(op.child)} filter [({render_predicate(op.predicate)})]"
    if isinstance(op, KNearest):
        suffix = f", {_period(op.period)}" if op.period is not None else ""
        return f"{_render_op(op.child)} knearest[{op.attr}, {op.obj}, {op.k}{suffix}]"
    if isinstance(op, SpatialJoin):
        return (f"{_render_op(op.left)} {_render_op(op.right)} "
                f"spatialjoin[{op.left_attr}, {op.right_attr}, {op.predicate}]")
    if isinstance(op, SimilarityOp):
        return f"{_render_op(op.child)} similarity[{op.attr}, {op.obj}, {op.n}]"
    if isinstance(op, Project):
        return f"{_render_op(op.child)} project[{', '.join(op.attrs)}]"
    if isinstance(op, Consume):
        return f"{_render_op(op.child)} consume"
    if isinstance(op, Count):
        return f"{_render_op(op.child)} count"
    if isinstance(op, Aggregate):
        return f"{_render_op(op.child)} aggregate[{op.fn}, {op.attr}]"
    raise TypeError(f"cannot render operator {op!r}")


def render_plan(plan: PhysicalPlan) -> str:
    """Single-line canonical text, deterministic for a given plan."""
    return f"query {_render_op(plan.root)};"


# ------------------------------------------------------------------- parsing

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_NUM_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_PERIOD_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*\)")
_WKT_HEADS = ("POINT", "LINESTRING", "POLYGON", "MPOINT")

_UNARY_OPS = ("knearest", "similarity", "project")
_TERMINAL_WORDS = ("consume", "count")


class _Cursor:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, message: str) -> PlanSyntaxError:
        return PlanSyntaxError(message, self.offset + self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek_word(self) -> str | None:
        self.skip_ws()
        m = _WORD_RE.match(self.text, self.pos)
        return m.group(0) if m else None

    def take_word(self) -> str:
        self.skip_ws()
        m = _WORD_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a word")
        self.pos = m.end()
        return m.group(0)

    def take_char(self, ch: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def try_char(self, ch: str) -> bool:
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == ch:
            self.pos += 1
            return True
        return False

    def take_number(self) -> float:
        self.skip_ws()
        m = _NUM_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a number")
        self.pos = m.end()
        return float(m.group(0))

    def take_until(self, marker: str) -> str:
        """Consume text up to (and including) marker; return the body."""
        idx = self.text.find(marker, self.pos)
        if idx < 0:
            raise self.error(f"missing {marker!r}")
        body = self.text[self.pos:idx]
        self.pos = idx + len(marker)
        return body


def _split_args(body: str) -> list[str]:
    """Split on commas at paren depth zero; WKT args and period literals
    ("[start, end)") keep their inner commas."""
    def shield(m: re.Match) -> str:
        return m.group(0).replace(",", "\x00").replace(")", "\x01")

    def unshield(s: str) -> str:
        return s.replace("\x00", ",").replace("\x01", ")")

    protected = _PERIOD_RE.sub(shield, body)
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(protected):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(unshield(protected[start:i]).strip())
            start = i + 1
    parts.append(unshield(protected[start:]).strip())
    return parts


def _parse_pred_arg(cur: _Cursor) -> PredArg:
    cur.skip_ws()
    if cur.try_char("."):
        return AttrRef(cur.take_word())
    for head in _WKT_HEADS:
        if cur.text.startswith(head, cur.pos):
            start = cur.pos
            cur.pos += len(head)
            cur.skip_ws()
            if not cur.try_char("("):
                raise cur.error(f"expected '(' after {head}")
            depth = 1
            while depth and cur.pos < len(cur.text):
                ch = cur.text[cur.pos]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                cur.pos += 1
            if depth:
                raise cur.error("unbalanced WKT parentheses")
            try:
                return GeomLit(from_wkt(cur.text[start:cur.pos]))
            except BadGeometry as exc:
                raise PlanSyntaxError(str(exc), cur.offset + start) from exc
    raise cur.error("expected an attribute reference or geometry literal")


def _parse_period(cur: _Cursor) -> Period:
    cur.skip_ws()
    m = _PERIOD_RE.match(cur.text, cur.pos)
    if not m:
        raise cur.error("expected a period literal [start, end)")
    cur.pos = m.end()
    return Period(int(m.group(1)), int(m.group(2)))


def _parse_pred_atom(cur: _Cursor) -> Predicate:
    cur.skip_ws()
    if cur.try_char("("):
        inner = _parse_predicate(cur)
        cur.take_char(")")
        return inner
    word = cur.take_word()
    if word in ("contains", "intersects"):
        cur.take_char("(")
        a = _parse_pred_arg(cur)
        cur.take_char(",")
        b = _parse_pred_arg(cur)
        cur.take_char(")")
        return Contains(a, b) if word == "contains" else Intersects(a, b)
    if word == "deftime":
        cur.take_char("(")
        cur.take_char(".")
        attr = cur.take_word()
        cur.take_char(")")
        kw = cur.take_word()
        if kw != "intersects":
            raise cur.error("expected 'intersects' after deftime(...)")
        return DeftimeIntersects(attr, _parse_period(cur))
    if word == "distance":
        cur.take_char("(")
        a = _parse_pred_arg(cur)
        cur.take_char(",")
        b = _parse_pred_arg(cur)
        cur.take_char(")")
        cur.skip_ws()
        if not cur.text.startswith("<=", cur.pos):
            raise cur.error("expected '<=' after distance(...)")
        cur.pos += 2
        return DistanceLe(a, b, cur.take_number())
    raise cur.error(f"unknown predicate {word!r}")


def _parse_predicate(cur: _Cursor) -> Predicate:
    left = _parse_pred_atom(cur)
    while True:
        word = cur.peek_word()
        if word == "and":
            cur.take_word()
            left = And(left, _parse_pred_atom(cur))
        elif word == "or":
            cur.take_word()
            left = Or(left, _parse_pred_atom(cur))
        else:
            return left


def parse_predicate(text: str, offset: int = 0) -> Predicate:
    cur = _Cursor(text, offset)
    pred = _parse_predicate(cur)
    if not cur.eof():
        raise cur.error("trailing content in predicate")
    return pred


def _bracket_body(cur: _Cursor, opname: str) -> str:
    if not cur.try_char("["):
        raise cur.error(f"expected '[' after {opname}")
    return cur.take_until("]")


def parse_plan(text: str) -> PhysicalPlan:
    """Parse canonical plan text; inverse of render_plan."""
    cur = _Cursor(text)
    if cur.take_word() != "query":
        raise PlanSyntaxError("plan must start with 'query'", 0)

    stack: list[PhysicalOp] = []
    terminal: PhysicalOp | None = None

    while terminal is None:
        cur.skip_ws()
        word_pos = cur.pos
        word = cur.take_word()

        if word == "filter":
            if not stack:
                raise PlanSyntaxError("filter needs an input stream", word_pos)
            cur.skip_ws()
            if not cur.text.startswith("[(", cur.pos):
                raise cur.error("expected '[(' after filter")
            cur.pos += 2
            body_start = cur.pos
            body = cur.take_until(")]")
            stack.append(Filter(parse_predicate(body, body_start), stack.pop()))
        elif word == "knearest":
            if not stack:
                raise PlanSyntaxError("knearest needs an input stream", word_pos)
            args = _split_args(_bracket_body(cur, word))
            if len(args) not in (3, 4):
                raise PlanSyntaxError("knearest takes [attr, object, k] or [attr, object, k, period]", word_pos)
            period = None
            if len(args) == 4:
                m = _PERIOD_RE.fullmatch(args[3])
                if not m:
                    raise PlanSyntaxError("bad period in knearest", word_pos)
                period = Period(int(m.group(1)), int(m.group(2)))
            try:
                k = int(args[2])
            except ValueError as exc:
                raise PlanSyntaxError(f"bad k {args[2]!r}", word_pos) from exc
            stack.append(KNearest(args[0], args[1], k, stack.pop(), period))
        elif word == "similarity":
            if not stack:
                raise PlanSyntaxError("similarity needs an input stream", word_pos)
            args = _split_args(_bracket_body(cur, word))
            if len(args) != 3:
                raise PlanSyntaxError("similarity takes [attr, object, n]", word_pos)
            try:
                n = int(args[2])
            except ValueError as exc:
                raise PlanSyntaxError(f"bad n {args[2]!r}", word_pos) from exc
            stack.append(SimilarityOp(args[0], args[1], n, stack.pop()))
        elif word == "spatialjoin":
            if len(stack) < 2:
                raise PlanSyntaxError("spatialjoin needs two input streams", word_pos)
            args = _split_args(_bracket_body(cur, word))
            if len(args) != 3:
                raise PlanSyntaxError("spatialjoin takes [attr, attr, predicate]", word_pos)
            predname = args[2]
            if predname not in ("intersects", "contains") and not re.fullmatch(
                    r"dist<=\d+(?:\.\d+)?", predname):
                raise PlanSyntaxError(f"unknown join predicate {predname!r}", word_pos)
            right = stack.pop()
            left = stack.pop()
            stack.append(SpatialJoin(args[0], args[1], predname, left, right))
        elif word == "project":
            if not stack:
                raise PlanSyntaxError("project needs an input stream", word_pos)
            attrs = tuple(_split_args(_bracket_body(cur, word)))
            stack.append(Project(attrs, stack.pop()))
        elif word in _TERMINAL_WORDS or word == "aggregate":
            if len(stack) != 1:
                raise PlanSyntaxError(f"{word} expects exactly one open stream", word_pos)
            child = stack.pop()
            if word == "consume":
                terminal = Consume(child)
            elif word == "count":
                terminal = Count(child)
            else:
                args = _split_args(_bracket_body(cur, word))
                if len(args) != 2 or args[0] not in ("avg", "max", "min"):
                    raise PlanSyntaxError("aggregate takes [fn, attr] with fn in avg/max/min", word_pos)
                terminal = Aggregate(args[0], args[1], child)
        else:
            # a source: either "REL feed" or "INDEX REL windowintersects[...]"
            cur.skip_ws()
            follow_pos = cur.pos
            follow = cur.peek_word()
            if follow == "feed":
                cur.take_word()
                stack.append(Feed(word))
                continue
            if follow is not None:
                saved = cur.pos
                rel = cur.take_word()
                if cur.peek_word() == "windowintersects":
                    cur.take_word()
                    nums = _bracket_body(cur, "windowintersects").split()
                    if len(nums) != 4:
                        raise PlanSyntaxError("windowintersects takes [xmin ymin xmax ymax]", word_pos)
                    try:
                        rect = Rect(*(float(v) for v in nums))
                    except ValueError as exc:
                        raise PlanSyntaxError(f"bad window: {exc}", word_pos) from exc
                    stack.append(WindowIntersects(word, rel, rect))
                    continue
                cur.pos = saved
            raise PlanSyntaxError(f"unknown token {follow!r} after {word!r}", follow_pos)

    cur.skip_ws()
    if not cur.try_char(";"):
        raise cur.error("plan must end with ';'")
    if not cur.eof():
        raise cur.error("trailing content after ';'")
    return plan_of(terminal)
