"""Plain-text persistence for instances, reference costs and suite manifests.

Instance format (whitespace-separated tokens, ``#`` starts a comment)::

    clsp v1
    items 2
    periods 3
    K 1 2
    S 10 20
    h 1 1
    C 50 50 50
    3 4 0
    5 0 2

The last N rows are the demand matrix.  ``format_instance`` emits the
canonical form above; ``parse_instance(format_instance(x))`` reproduces x
exactly (all values are integers, so round-trips are bit-exact).

Reference files hold one ``instance-id cost`` pair per line; manifests hold
one ``instance-id factor-letters relative-path`` triple per line.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Union

import numpy as np

from .model import Instance

__all__ = [
    "format_instance",
    "parse_instance",
    "read_instance",
    "write_instance",
    "read_reference",
    "write_reference",
    "read_manifest",
    "write_manifest",
]

_MAGIC = ("clsp", "v1")


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    return tokens


class _TokenReader:
    def __init__(self, tokens: list[str], source: str):
        self.tokens = tokens
        self.pos = 0
        self.source = source

    def next(self) -> str:
        if self.pos >= len(self.tokens):
            raise ValueError(f"{self.source}: unexpected end of file")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, literal: str) -> None:
        tok = self.next()
        if tok != literal:
            raise ValueError(f"{self.source}: expected {literal!r}, got {tok!r}")

    def next_int(self, what: str) -> int:
        tok = self.next()
        try:
            return int(tok)
        except ValueError:
            raise ValueError(f"{self.source}: bad {what} value {tok!r}") from None

    def ints(self, count: int, what: str) -> list[int]:
        return [self.next_int(what) for _ in range(count)]

    def done(self) -> None:
        if self.pos != len(self.tokens):
            raise ValueError(
                f"{self.source}: trailing data starting at {self.tokens[self.pos]!r}"
            )


def parse_instance(text: str, name: str = "", source: str = "<string>") -> Instance:
    r = _TokenReader(_tokenize(text), source)
    r.expect(_MAGIC[0])
    r.expect(_MAGIC[1])
    r.expect("items")
    n = r.next_int("items")
    r.expect("periods")
    t = r.next_int("periods")
    if n < 1 or t < 1:
        raise ValueError(f"{source}: items and periods must be >= 1")
    r.expect("K")
    k = r.ints(n, "K")
    r.expect("S")
    s = r.ints(n, "S")
    r.expect("h")
    h = r.ints(n, "h")
    r.expect("C")
    c = r.ints(t, "C")
    demand = np.array(r.ints(n * t, "demand"), dtype=np.int64).reshape(n, t)
    r.done()
    return Instance(
        demand=demand,
        capacity=np.array(c, dtype=np.int64),
        setup_cost=np.array(s, dtype=np.int64),
        holding_cost=np.array(h, dtype=np.int64),
        capacity_usage=np.array(k, dtype=np.int64),
        name=name,
    )


def format_instance(instance: Instance) -> str:
    def row(values) -> str:
        return " ".join(str(int(v)) for v in values)

    lines = [
        "clsp v1",
        f"items {instance.n_items}",
        f"periods {instance.n_periods}",
        f"K {row(instance.capacity_usage)}",
        f"S {row(instance.setup_cost)}",
        f"h {row(instance.holding_cost)}",
        f"C {row(instance.capacity)}",
    ]
    lines.extend(row(instance.demand[i]) for i in range(instance.n_items))
    return "\n".join(lines) + "\n"


def read_instance(path: Union[str, os.PathLike]) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(), name=path.stem, source=str(path))


def write_instance(instance: Instance, path: Union[str, os.PathLike]) -> None:
    Path(path).write_text(format_instance(instance))


def _format_cost(cost: float) -> str:
    if float(cost) == int(cost):
        return str(int(cost))
    return repr(float(cost))


def read_reference(path: Union[str, os.PathLike]) -> dict[str, float]:
    """Reference costs keyed by instance id (one ``id cost`` pair per line)."""
    refs: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'instance-id cost'")
        try:
            refs[parts[0]] = float(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad cost {parts[1]!r}") from None
    return refs


def write_reference(refs: dict[str, float], path: Union[str, os.PathLike]) -> None:
    lines = [f"{key} {_format_cost(value)}" for key, value in refs.items()]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_manifest(path: Union[str, os.PathLike]) -> list[tuple[str, str, str]]:
    """Suite manifest rows: (instance-id, factor letters, relative path)."""
    rows: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'id letters path'")
        rows.append((parts[0], parts[1], parts[2]))
    return rows


def write_manifest(rows: list[tuple[str, str, str]], path: Union[str, os.PathLike]) -> None:
    lines = [f"{ident} {letters} {rel}" for ident, letters, rel in rows]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
