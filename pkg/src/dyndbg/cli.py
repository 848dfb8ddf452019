"""Command-line interface (``dyndbg``).

Usage errors exit with status 2 (argparse), data errors with status 1 and a
message on stderr.
"""
from __future__ import annotations

import argparse
import secrets
import sys
from typing import Optional, Sequence

from . import bench
from .errors import DbgError
from .graph import build_static_graph, empty_graph
from .jumbled import JumbledIndex, build_jumbled
from .kmer import PRESETS, Alphabet
from .oracle import FuzzResult, fuzz_run, replay
from .ops import outcome, parse_script
from .snapshot import load_snapshot, save_snapshot, serialize


class CliError(Exception):
    pass


def read_sequences(path: str, alphabet_name: str) -> list[str]:
    """Plain lines or FASTA; k-mers never span records. Byte mode reads raw bytes."""
    if alphabet_name == "byte":
        with open(path, "rb") as fh:
            return [fh.read().decode("latin-1")]
    seqs, cur, fasta = [], [], False
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith(">"):
                fasta = True
                if cur:
                    seqs.append("".join(cur))
                cur = []
            elif line:
                if fasta:
                    cur.append(line)
                else:
                    seqs.append(line)
    if cur:
        seqs.append("".join(cur))
    return seqs


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed={args.seed}", file=sys.stderr)
    return args.seed


def _bits_per_node(obj) -> float:
    return 8 * len(serialize(obj)) / max(obj.n, 1)


def cmd_build(args) -> int:
    seed = _seed(args)
    alphabet = PRESETS[args.alphabet]
    seqs = read_sequences(args.input, args.alphabet)
    if args.mode == "jumbled":
        obj = build_jumbled(seqs, args.k, alphabet, seed=seed)
    else:
        obj = build_static_graph(seqs, args.k, alphabet, seed=seed, dynamic=args.dynamic,
                                 strict=args.strict)
    if args.out:
        save_snapshot(obj, args.out)
    print(f"n={obj.n} e={obj.e} trees={obj.forest.root_count} restarts={obj.restarts} "
          f"bits/node={_bits_per_node(obj):.2f}")
    return 0


def _answer(obj, q: str) -> bool:
    if isinstance(obj, JumbledIndex):
        return obj.has_match(q)
    return obj.is_node(q)


def cmd_query(args) -> int:
    obj = load_snapshot(args.snapshot)
    if args.stdin:
        lines = [ln.strip() for ln in sys.stdin if ln.strip()]
        if isinstance(obj, JumbledIndex):
            answers = [obj.has_match(q) for q in lines]
        else:
            answers = obj.is_node_batch(lines).tolist()
        for q, a in zip(lines, answers):
            print(f"{q}\t{int(a)}")
        return 0
    q = args.kmer if args.kmer is not None else args.pattern
    if q is None:
        raise CliError("one of --kmer, --pattern or --stdin is required")
    hit = _answer(obj, q)
    print(int(hit))
    return 0 if hit else 1


def cmd_neighbors(args) -> int:
    g = load_snapshot(args.snapshot)
    if isinstance(g, JumbledIndex):
        raise CliError("neighbors needs a dbg snapshot")
    if args.dir in ("out", "both"):
        for sym, v in g.successors(args.kmer):
            print(f"out\t{sym}\t{v}")
    if args.dir in ("in", "both"):
        for sym, u in g.predecessors(args.kmer):
            print(f"in\t{sym}\t{u}")
    return 0


def _format(op, res) -> str:
    kind, val = res
    if kind == "error":
        return f"error {val}"
    if isinstance(val, bool):
        return str(int(val))
    if op.name == "check":
        return "; ".join(val) if val else "ok"
    if op.name in ("succ", "pred"):
        return " ".join(f"{sym}:{x}" for sym, x in val) if val else "-"
    return "ok"


def cmd_batch(args) -> int:
    with open(args.script, encoding="utf-8") as fh:
        script = parse_script(fh)
    if args.oracle:
        if args.snapshot:
            raise CliError("--oracle replays a self-contained script; drop --snapshot")
        if script.k is None:
            raise CliError("--oracle needs an 'init k=...' line")
        fail, checks = replay(script, check=not args.no_check)
        if fail is None:
            print(f"PASS ops={len(script.ops)} checks={checks}")
            return 0
        print(f"FAIL step={fail.step} op={fail.op} expected={fail.expected} got={fail.got}")
        return 1

    if args.snapshot:
        g = load_snapshot(args.snapshot)
        if isinstance(g, JumbledIndex):
            raise CliError("jumbled snapshots are static; batch needs a dbg snapshot")
        if not g.dynamic:
            if not args.thaw:
                raise CliError("snapshot is static; pass --thaw to convert it first")
            g = g.thaw()
    else:
        if script.k is None:
            raise CliError("no --snapshot and no 'init k=...' line in the script")
        alpha = Alphabet(script.symbols)
        if script.seqs:
            g = build_static_graph(script.seqs, script.k, alpha, seed=script.seed, dynamic=True)
        else:
            g = empty_graph(script.k, alpha, seed=script.seed)
    mismatches = 0
    for op in script.ops:
        if args.auto_add and op.name == "addedge":
            for x in op.args:
                if not g.is_node(x):
                    g.add_node(x)
        res = outcome(g, op)
        line = f"{op}\t{_format(op, res)}"
        if op.expect is not None and res != ("ok", bool(op.expect)):
            mismatches += 1
            line += "\tMISMATCH"
        if op.name == "check" and res[1]:
            mismatches += 1
        print(line)
    if args.out:
        save_snapshot(g, args.out)
    print(f"n={g.n} e={g.e} trees={g.forest.root_count} mismatches={mismatches}")
    return 1 if mismatches else 0


def cmd_verify(args) -> int:
    obj = load_snapshot(args.snapshot)
    bad = obj.check_invariants()
    for v in bad:
        print(v)
    print(f"{len(bad)} violation(s)")
    return 1 if bad else 0


def cmd_fuzz(args) -> int:
    seed = _seed(args)
    symbols = Alphabet.for_sigma(args.sigma).symbols
    res: FuzzResult = fuzz_run(seed, args.ops, k=args.k, symbols=symbols,
                               init_len=args.init_len, check=not args.no_check)
    if res.ok:
        print(f"PASS seed={seed} ops={args.ops} checks={res.checks}")
        return 0
    f = res.failure
    print(f"FAIL seed={seed} step={f.step} op={f.op} expected={f.expected} got={f.got}")
    if args.repro:
        with open(args.repro, "w", encoding="utf-8") as fh:
            fh.write(res.repro)
        print(f"repro ({len(res.shrunk.ops)} ops) written to {args.repro}")
    else:
        sys.stdout.write(res.repro)
    return 1


def cmd_bench(args) -> int:
    seed = _seed(args)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    print(bench.CSV_HEADER)
    for row in bench.run(args.mode, sizes, k=args.k, alphabet=PRESETS[args.alphabet],
                         queries=args.queries, seed=seed):
        print(row.csv(), flush=True)
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyndbg", description="Dynamic de Bruijn graph engine")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a static graph or jumbled index")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alphabet", choices=sorted(PRESETS), default="dna")
    p.add_argument("--mode", choices=["dbg", "jumbled"], default="dbg")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--dynamic", action="store_true", help="store a mutable graph")
    p.add_argument("--strict", action="store_true", help="reject sequences shorter than k")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="membership or jumbled-match queries")
    p.add_argument("--snapshot", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--kmer")
    g.add_argument("--pattern")
    g.add_argument("--stdin", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("neighbors", help="list in/out neighbours of a k-mer")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--kmer", required=True)
    p.add_argument("--dir", choices=["in", "out", "both"], default="both")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("batch", help="apply an op script")
    p.add_argument("--snapshot")
    p.add_argument("--script", required=True)
    p.add_argument("--out")
    p.add_argument("--thaw", action="store_true", help="convert a static snapshot first")
    p.add_argument("--auto-add", action="store_true", help="addedge inserts missing endpoints")
    p.add_argument("--oracle", action="store_true", help="replay against the naive graph")
    p.add_argument("--no-check", action="store_true", help="skip invariant scans with --oracle")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("verify", help="run the invariant scan")
    p.add_argument("--snapshot", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="differential run against the naive graph")
    p.add_argument("--seed", type=int)
    p.add_argument("--ops", type=int, default=1000)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--sigma", type=int, default=4)
    p.add_argument("--init-len", type=int, default=0, help="bulk-load a random text first")
    p.add_argument("--no-check", action="store_true", help="skip per-mutation invariant scans")
    p.add_argument("--repro", help="write the shrunk failing script here")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="CSV timings")
    p.add_argument("--mode", choices=["membership", "update"], default="membership")
    p.add_argument("--sizes", default="10000,100000")
    p.add_argument("--k", type=int, default=15)
    p.add_argument("--alphabet", choices=sorted(PRESETS), default="dna")
    p.add_argument("--queries", type=int, default=2000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DbgError, CliError, OSError) as exc:
        print(f"dyndbg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
