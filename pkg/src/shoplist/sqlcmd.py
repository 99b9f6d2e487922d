"""Parser and executor for the four-statement SQL subset.

Supported: INSERT INTO t(a, b) VALUES (...), SELECT cols|* FROM t [WHERE],
UPDATE t SET a = lit [WHERE], DELETE FROM t [WHERE].  The WHERE clause is a
single "column op literal" comparison.  render() emits the canonical form
(uppercase keywords, single spaces) used on the submit-SQL wire.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, List, Optional, Tuple, Union

from .errors import ApplyError, NotAQuery, SqlSyntaxError, UnsupportedStatement
from .store import Store

STAR = "*"

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<string>'(?:[^']|'')*')"
    r"|(?P<number>-?\d+(?:\.\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><>|<=|>=|=|<|>)"
    r"|(?P<punct>[(),*])"
    r")"
)

Literal = Union[int, Decimal, str, bool, None]
Predicate = Tuple[str, str, Literal]


@dataclass(frozen=True)
class Insert:
    table: str
    columns: Tuple[str, ...]
    values: Tuple[Literal, ...]


@dataclass(frozen=True)
class Select:
    columns: Union[str, Tuple[str, ...]]  # STAR or column names
    table: str
    where: Optional[Predicate] = None


@dataclass(frozen=True)
class Update:
    table: str
    assignments: Tuple[Tuple[str, Literal], ...]
    where: Optional[Predicate] = None


@dataclass(frozen=True)
class Delete:
    table: str
    where: Optional[Predicate] = None


Command = Union[Insert, Select, Update, Delete]


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            at = len(text) - len(rest)
            raise SqlSyntaxError(at, "a token", f"unexpected character at {at}: {rest[0]!r}")
        tokens.append(_Token(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def _pos(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i].pos
        return len(self.text)

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise SqlSyntaxError(len(self.text), "more input")
        self.i += 1
        return tok

    def expect_keyword(self, word: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "ident" or tok.text.upper() != word:
            raise SqlSyntaxError(self._pos(), word)
        self.i += 1

    def expect_punct(self, ch: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "punct" or tok.text != ch:
            raise SqlSyntaxError(self._pos(), repr(ch))
        self.i += 1

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "ident" and tok.text.upper() == word

    def identifier(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            raise SqlSyntaxError(self._pos(), what)
        if tok.text.upper() in _RESERVED:
            raise SqlSyntaxError(tok.pos, what, f"keyword {tok.text!r} used as {what}")
        self.i += 1
        return tok.text

    def literal(self) -> Literal:
        tok = self.take()
        if tok.kind == "string":
            return tok.text[1:-1].replace("''", "'")
        if tok.kind == "number":
            if "." in tok.text:
                return Decimal(tok.text)
            return int(tok.text)
        if tok.kind == "ident":
            upper = tok.text.upper()
            if upper == "TRUE":
                return True
            if upper == "FALSE":
                return False
            if upper == "NULL":
                return None
        raise SqlSyntaxError(tok.pos, "a literal")

    def predicate_opt(self) -> Optional[Predicate]:
        if not self.at_keyword("WHERE"):
            if self.peek() is not None:
                raise SqlSyntaxError(self._pos(), "WHERE or end of statement")
            return None
        self.i += 1
        col = self.identifier("column name")
        tok = self.take()
        if tok.kind != "op":
            raise SqlSyntaxError(tok.pos, "comparison operator")
        lit = self.literal()
        self.end()
        return (col, tok.text, lit)

    def end(self) -> None:
        if self.peek() is not None:
            raise SqlSyntaxError(self._pos(), "end of statement")


_RESERVED = {
    "INSERT", "INTO", "VALUES", "SELECT", "FROM", "WHERE",
    "UPDATE", "SET", "DELETE", "TRUE", "FALSE", "NULL",
}


def parse(text: str) -> Command:
    if not text or not text.strip():
        raise SqlSyntaxError(0, "a statement")
    p = _Parser(text)
    head = p.peek()
    if head is None or head.kind != "ident":
        raise SqlSyntaxError(p._pos(), "INSERT, SELECT, UPDATE or DELETE")
    word = head.text.upper()
    if word == "INSERT":
        return _parse_insert(p)
    if word == "SELECT":
        return _parse_select(p)
    if word == "UPDATE":
        return _parse_update(p)
    if word == "DELETE":
        return _parse_delete(p)
    raise UnsupportedStatement(f"unsupported statement {head.text!r}")


def _parse_insert(p: _Parser) -> Insert:
    p.expect_keyword("INSERT")
    p.expect_keyword("INTO")
    table = p.identifier("table name")
    p.expect_punct("(")
    columns = [p.identifier("column name")]
    while p.peek() is not None and p.peek().text == ",":
        p.take()
        columns.append(p.identifier("column name"))
    p.expect_punct(")")
    p.expect_keyword("VALUES")
    p.expect_punct("(")
    values = [p.literal()]
    while p.peek() is not None and p.peek().text == ",":
        p.take()
        values.append(p.literal())
    p.expect_punct(")")
    p.end()
    if len(columns) != len(values):
        raise SqlSyntaxError(
            len(p.text), f"{len(columns)} values",
            f"{len(columns)} columns but {len(values)} values",
        )
    return Insert(table, tuple(columns), tuple(values))


def _parse_select(p: _Parser) -> Select:
    p.expect_keyword("SELECT")
    tok = p.peek()
    if tok is not None and tok.kind == "punct" and tok.text == "*":
        p.take()
        columns: Union[str, Tuple[str, ...]] = STAR
    else:
        cols = [p.identifier("column name")]
        while p.peek() is not None and p.peek().text == ",":
            p.take()
            cols.append(p.identifier("column name"))
        columns = tuple(cols)
    p.expect_keyword("FROM")
    table = p.identifier("table name")
    where = p.predicate_opt()
    return Select(columns, table, where)


def _parse_update(p: _Parser) -> Update:
    p.expect_keyword("UPDATE")
    table = p.identifier("table name")
    p.expect_keyword("SET")
    assignments = []
    while True:
        col = p.identifier("column name")
        tok = p.take()
        if tok.kind != "op" or tok.text != "=":
            raise SqlSyntaxError(tok.pos, "'='")
        assignments.append((col, p.literal()))
        nxt = p.peek()
        if nxt is not None and nxt.text == ",":
            p.take()
            continue
        break
    where = p.predicate_opt()
    return Update(table, tuple(assignments), where)


def _parse_delete(p: _Parser) -> Delete:
    p.expect_keyword("DELETE")
    p.expect_keyword("FROM")
    table = p.identifier("table name")
    where = p.predicate_opt()
    return Delete(table, where)


# ---------------------------------------------------------------------------
# Rendering (canonical form)
# ---------------------------------------------------------------------------

def render_literal(value: Literal) -> str:
    if value is None:
        return "NULL"
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, Decimal):
        return format(value, "f")
    if isinstance(value, int):
        return str(value)
    return "'" + value.replace("'", "''") + "'"


def _render_where(where: Optional[Predicate]) -> str:
    if where is None:
        return ""
    col, op, lit = where
    return f" WHERE {col} {op} {render_literal(lit)}"


def render(cmd: Command) -> str:
    if isinstance(cmd, Insert):
        cols = ", ".join(cmd.columns)
        vals = ", ".join(render_literal(v) for v in cmd.values)
        return f"INSERT INTO {cmd.table} ({cols}) VALUES ({vals})"
    if isinstance(cmd, Select):
        cols = "*" if cmd.columns == STAR else ", ".join(cmd.columns)
        return f"SELECT {cols} FROM {cmd.table}{_render_where(cmd.where)}"
    if isinstance(cmd, Update):
        sets = ", ".join(f"{c} = {render_literal(v)}" for c, v in cmd.assignments)
        return f"UPDATE {cmd.table} SET {sets}{_render_where(cmd.where)}"
    if isinstance(cmd, Delete):
        return f"DELETE FROM {cmd.table}{_render_where(cmd.where)}"
    raise UnsupportedStatement(f"cannot render {cmd!r}")


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

ROW_UNCHANGED = "unchanged"
ROW_ADDED = "added"
ROW_MODIFIED = "modified"
ROW_DELETED = "deleted"


@dataclass
class ResultSet:
    """Detached rows plus per-row edit state, applied back by apply_changes."""

    columns: List[str]
    source_table: str
    rows: List[List[Any]]
    row_states: List[str]
    pks: List[Optional[int]]

    def add_row(self, values: List[Any]) -> int:
        self.rows.append(list(values))
        self.row_states.append(ROW_ADDED)
        self.pks.append(None)
        return len(self.rows) - 1

    def set_value(self, index: int, column: str, value: Any) -> None:
        ci = [c.lower() for c in self.columns].index(column.lower())
        self.rows[index][ci] = value
        if self.row_states[index] == ROW_UNCHANGED:
            self.row_states[index] = ROW_MODIFIED

    def mark_deleted(self, index: int) -> None:
        self.row_states[index] = ROW_DELETED


def _resolve_predicate(store: Store, table: str, where: Optional[Predicate]):
    if where is None:
        return None
    col, op, lit = where
    tdef = store.table_def(table)
    return (tdef.column_named(col).name, op, lit)


def execute_non_query(store: Store, cmd: Command) -> int:
    if isinstance(cmd, Select):
        raise NotAQuery("SELECT returns rows; use fill()")
    if isinstance(cmd, Insert):
        values = dict(zip(cmd.columns, cmd.values))
        store.insert_row(cmd.table, values)
        return 1
    if isinstance(cmd, Update):
        tdef = store.table_def(cmd.table)
        pk_name = tdef.pk_column.name
        matched = store.scan(cmd.table, _resolve_predicate(store, cmd.table, cmd.where))
        assignments = dict(cmd.assignments)
        count = 0
        for row in matched:
            if store.update_row(cmd.table, row[pk_name], assignments):
                count += 1
        return count
    if isinstance(cmd, Delete):
        tdef = store.table_def(cmd.table)
        pk_name = tdef.pk_column.name
        matched = store.scan(cmd.table, _resolve_predicate(store, cmd.table, cmd.where))
        count = 0
        for row in matched:
            if store.delete_row(cmd.table, row[pk_name]):
                count += 1
        return count
    raise UnsupportedStatement(f"cannot execute {cmd!r}")


def fill(store: Store, cmd: Select) -> ResultSet:
    if not isinstance(cmd, Select):
        raise NotAQuery("fill() takes a SELECT")
    tdef = store.table_def(cmd.table)
    if cmd.columns == STAR:
        columns = [c.name for c in tdef.columns]
    else:
        columns = [tdef.column_named(c).name for c in cmd.columns]
    pk_name = tdef.pk_column.name
    rows = store.scan(cmd.table, _resolve_predicate(store, cmd.table, cmd.where))
    return ResultSet(
        columns=columns,
        source_table=tdef.name,
        rows=[[row[c] for c in columns] for row in rows],
        row_states=[ROW_UNCHANGED] * len(rows),
        pks=[row[pk_name] for row in rows],
    )


def apply_changes(store: Store, rs: ResultSet) -> int:
    """Apply edited ResultSet rows back: deletes, then updates, then inserts.

    Best-effort ordered application; the first failure stops everything
    after it and is re-raised with the failing row index.
    """
    tdef = store.table_def(rs.source_table)
    applied = 0
    order = (ROW_DELETED, ROW_MODIFIED, ROW_ADDED)
    for wanted in order:
        for i, state in enumerate(rs.row_states):
            if state != wanted:
                continue
            try:
                if state == ROW_DELETED:
                    if rs.pks[i] is None:
                        raise NotAQuery("cannot delete a row without its primary key")
                    if store.delete_row(rs.source_table, rs.pks[i]):
                        applied += 1
                elif state == ROW_MODIFIED:
                    if rs.pks[i] is None:
                        raise NotAQuery("cannot update a row without its primary key")
                    values = {c: v for c, v in zip(rs.columns, rs.rows[i])
                              if not tdef.column_named(c).primary_key}
                    if store.update_row(rs.source_table, rs.pks[i], values):
                        applied += 1
                else:
                    values = dict(zip(rs.columns, rs.rows[i]))
                    pk = store.insert_row(rs.source_table, values)
                    rs.pks[i] = pk
                    applied += 1
            except Exception as e:
                raise ApplyError(i, e) from e
    return applied
