"""Line-based operation scripts, used by ``dyndbg batch`` and by fuzz repros.

One operation per line, ``#`` starts a comment::

    init k=8 symbols=ACGT seed=1
    seq ACGTACGTTGCA          # bulk-load before the first update
    addnode ACGTACGT
    addedge ACGTACGT CGTACGTA
    deledge ACGTACGT CGTACGTA
    delnode ACGTACGT
    query ACGTACGT = 1        # optional expected value
    hasedge ACGTACGT CGTACGTA = 0
    succ ACGTACGT
    pred ACGTACGT
    check
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DbgError

MUTATIONS = ("addnode", "delnode", "addedge", "deledge")
QUERIES = ("query", "hasedge", "succ", "pred")
_ARITY = {"addnode": 1, "delnode": 1, "addedge": 2, "deledge": 2, "query": 1,
          "hasedge": 2, "succ": 1, "pred": 1, "check": 0, "seq": None}


class ScriptError(DbgError, ValueError):
    pass


@dataclass(frozen=True)
class Op:
    name: str
    args: tuple = ()
    expect: Optional[int] = None

    def __str__(self) -> str:
        s = " ".join((self.name,) + tuple(self.args))
        return s if self.expect is None else f"{s} = {self.expect}"


@dataclass
class Script:
    k: Optional[int] = None
    symbols: str = "ACGT"
    seed: int = 0
    seqs: list = field(default_factory=list)
    ops: list = field(default_factory=list)

    def render(self) -> str:
        lines = [f"init k={self.k} symbols={self.symbols} seed={self.seed}"]
        lines += [f"seq {s}" for s in self.seqs]
        lines += [str(op) for op in self.ops]
        return "\n".join(lines) + "\n"


def parse_line(line: str, lineno: int = 0) -> Optional[Op]:
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    parts = shlex.split(line)
    name, args = parts[0].lower(), parts[1:]
    expect = None
    if "=" in args:
        i = args.index("=")
        if i != len(args) - 2 or args[-1] not in ("0", "1"):
            raise ScriptError(f"line {lineno}: expected '= 0' or '= 1' at the end")
        expect = int(args[-1])
        args = args[:i]
    if name == "init":
        return Op(name, tuple(args))
    if name not in _ARITY:
        raise ScriptError(f"line {lineno}: unknown operation {name!r}")
    arity = _ARITY[name]
    if arity is not None and len(args) != arity:
        raise ScriptError(f"line {lineno}: {name} takes {arity} argument(s), got {len(args)}")
    if expect is not None and name not in ("query", "hasedge"):
        raise ScriptError(f"line {lineno}: only query/hasedge accept an expected value")
    return Op(name, tuple(args), expect)


def parse_script(lines: Iterable[str]) -> Script:
    sc = Script()
    for i, raw in enumerate(lines, 1):
        op = parse_line(raw, i)
        if op is None:
            continue
        if op.name == "init":
            for kv in op.args:
                key, _, val = kv.partition("=")
                if key == "k":
                    sc.k = int(val)
                elif key == "symbols":
                    sc.symbols = val
                elif key == "seed":
                    sc.seed = int(val)
                else:
                    raise ScriptError(f"line {i}: unknown init option {key!r}")
        elif op.name == "seq":
            if sc.ops:
                raise ScriptError(f"line {i}: seq must precede all operations")
            sc.seqs.extend(op.args)
        else:
            sc.ops.append(op)
    return sc


def apply_op(g, op: Op):
    """Run one operation on a graph (dynamic or naive); returns its result."""
    a = op.args
    if op.name == "addnode":
        return g.add_node(a[0])
    if op.name == "delnode":
        return g.remove_node(a[0])
    if op.name == "addedge":
        return g.add_edge(a[0], a[1])
    if op.name == "deledge":
        return g.remove_edge(a[0], a[1])
    if op.name == "query":
        return g.is_node(a[0])
    if op.name == "hasedge":
        return g.has_edge(a[0], a[1])
    if op.name == "succ":
        return sorted(g.successors(a[0]))
    if op.name == "pred":
        return sorted(g.predecessors(a[0]))
    if op.name == "check":
        return g.check_invariants()
    raise ScriptError(f"cannot apply {op.name!r}")


def outcome(g, op: Op):
    """Result of an operation, or the name of the error it raised."""
    try:
        return ("ok", apply_op(g, op))
    except DbgError as exc:
        return ("error", type(exc).__name__)
