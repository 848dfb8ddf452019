"""dyndbg: dynamic, space-efficient de Bruijn graphs.

Membership and navigation go through a fingerprint index, IN/OUT bit
matrices and a covering forest of shallow trees whose roots store their
k-mers in plain form. Static graphs are built in bulk; dynamic graphs accept
node and edge insertions and deletions. A histogram-keyed variant answers
fixed-length jumbled pattern queries.
"""
from .errors import DbgError
from .graph import DeBruijnGraph, build_static_graph, empty_graph
from .jumbled import JumbledIndex, build_jumbled, has_jumbled_match
from .kmer import BINARY, BYTE, DNA, PROTEIN, Alphabet, Kmer
from .oracle import NaiveGraph, fuzz_run, naive_jumbled_match
from .snapshot import load_snapshot, save_snapshot

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "BINARY", "BYTE", "DNA", "DbgError", "DeBruijnGraph", "JumbledIndex",
    "Kmer", "NaiveGraph", "PROTEIN", "build_jumbled", "build_static_graph", "empty_graph",
    "fuzz_run", "has_jumbled_match", "load_snapshot", "naive_jumbled_match", "save_snapshot",
]
