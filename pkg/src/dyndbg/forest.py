"""Covering forest over the undirected graph underlying a de Bruijn graph.

Every slot carries a parent spec saying which incident edge leads to its
parent; roots store their key in plain form. A key claimed to be in the graph
is verified by ascending to the root, re-deriving the key hop by hop, and
comparing with the sample.

The forest is agnostic of what a key is. Graph-specific behaviour comes from
a *context* object providing:

``follow(h, tag, sym, sym2)``
    cross the edge named by a spec from handle ``h``; None unless the edge is
    confirmed and the target slot exists.
``neighbors(h)``
    confirmed undirected neighbours as ``(handle, tag, sym, sym2)``, where the
    spec is the one ``h`` would hold if that neighbour were its parent.
``reverse_spec(child_key, tag, sym, sym2)``
    the spec the parent must hold to point back at the child.
``fingerprint(key)`` / ``lookup_slot(fp)`` and a boolean ``dynamic``.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import AlreadyRoot, CorruptForest, EdgeNotConfirmed, NotARoot

UNASSIGNED, ROOT, VIA_OUT, VIA_IN = 0, 1, 2, 3
VIA_SWAP = VIA_OUT  # jumbled mode reuses the single-edge tag

Handle = namedtuple("Handle", "key fp slot")


@dataclass(frozen=True)
class ForestParams:
    k: int
    lam: int

    @property
    def s_min(self) -> int:
        return self.k * self.lam

    @property
    def h_max(self) -> int:
        return 3 * self.k * self.lam

    @property
    def d_attach(self) -> int:
        return 2 * self.k * self.lam


class Forest:
    def __init__(self, m: int, params: ForestParams, jumbled: bool = False):
        self.params = params
        self.jumbled = jumbled
        self.tags = np.zeros(m, dtype=np.uint8)
        self.syms = np.zeros(m, dtype=np.uint16)
        self.syms2 = np.zeros(m, dtype=np.uint16) if jumbled else None
        self.samples: dict[int, object] = {}

    @property
    def m(self) -> int:
        return self.tags.shape[0]

    def spec(self, slot: int) -> tuple[int, int, int]:
        s2 = int(self.syms2[slot]) if self.jumbled else 0
        return int(self.tags[slot]), int(self.syms[slot]), s2

    def set_spec(self, slot: int, tag: int, sym: int = 0, sym2: int = 0) -> None:
        self.tags[slot] = tag
        self.syms[slot] = sym
        if self.jumbled:
            self.syms2[slot] = sym2

    def is_root(self, slot: int) -> bool:
        return self.tags[slot] == ROOT

    @property
    def root_count(self) -> int:
        return int(np.count_nonzero(self.tags == ROOT))

    def remap(self, old_to_new: np.ndarray, new_m: int) -> None:
        keep = old_to_new >= 0
        dst = old_to_new[keep]
        for name in ("tags", "syms", "syms2"):
            arr = getattr(self, name)
            if arr is None:
                continue
            new = np.zeros(new_m, dtype=arr.dtype)
            new[dst] = arr[keep]
            setattr(self, name, new)
        self.samples = {int(old_to_new[s]): key for s, key in self.samples.items()}

    def clear_slot(self, slot: int) -> None:
        self.set_spec(slot, UNASSIGNED)
        self.samples.pop(slot, None)


@dataclass
class Ascent:
    verified: bool
    root: Optional[Handle]
    depth: int
    path: Optional[list] = None
    reason: str = ""


@dataclass
class TreeScan:
    nodes: list = field(default_factory=list)  # (Handle, depth) in BFS order
    height: int = 0
    deepest: Optional[Handle] = None
    truncated: bool = False

    @property
    def size(self) -> int:
        return len(self.nodes)


def ascend(ctx, forest: Forest, h: Handle, record_path: bool = False) -> Ascent:
    """Climb from ``h`` to its root and compare the re-derived key with the sample.

    Refuted (``verified`` False) when a hop is not confirmed, a slot lookup
    fails, the sample differs, or the hop budget runs out on a static index.
    On a dynamic index an exhausted budget means a parent cycle and raises
    CorruptForest.
    """
    path = [h] if record_path else None
    h_max = forest.params.h_max
    tags, syms, syms2 = forest.tags, forest.syms, forest.syms2
    for depth in range(h_max + 1):
        slot = h.slot
        tag = tags[slot]
        if tag == ROOT:
            if forest.samples.get(slot) == h.key:
                return Ascent(True, h, depth, path)
            return Ascent(False, None, depth, path, "root sample mismatch")
        if depth == h_max:
            break
        if tag == UNASSIGNED:
            return Ascent(False, None, depth, path, "unassigned slot")
        nxt = ctx.follow(h, tag, int(syms[slot]), int(syms2[slot]) if syms2 is not None else 0)
        if nxt is None:
            return Ascent(False, None, depth, path, "hop not confirmed")
        h = nxt
        if record_path:
            path.append(h)
    if ctx.dynamic:
        raise CorruptForest(f"no root within {h_max} hops (parent cycle?)")
    return Ascent(False, None, h_max, path, "hop budget exhausted")


def climb(ctx, forest: Forest, h: Handle, steps: int) -> Handle:
    """Follow parent specs exactly ``steps`` times (no root check)."""
    for _ in range(steps):
        tag, sym, sym2 = forest.spec(h.slot)
        if tag in (ROOT, UNASSIGNED):
            raise CorruptForest(f"slot {h.slot} has no parent to climb to")
        nxt = ctx.follow(h, tag, sym, sym2)
        if nxt is None:
            raise CorruptForest(f"parent edge of slot {h.slot} is not confirmed")
        h = nxt
    return h


def evert(ctx, forest: Forest, path: list) -> int:
    """Re-root the tree at ``path[0]`` by reversing every spec along the path.

    ``path`` runs from the new root to the current root. Returns the number of
    specs rewritten. The old root's sample is dropped; the new root is left
    unsampled for the caller to attach or sample.
    """
    if len(path) <= 1:
        return 0
    specs = [forest.spec(h.slot) for h in path[:-1]]
    for i, (tag, sym, sym2) in enumerate(specs):
        nxt = ctx.follow(path[i], tag, sym, sym2)
        if nxt is None or nxt.slot != path[i + 1].slot:
            raise CorruptForest(f"path is not a parent chain at slot {path[i].slot}")
    if not forest.is_root(path[-1].slot):
        raise CorruptForest("path does not end at a root")
    for i, (tag, sym, sym2) in enumerate(specs):
        forest.set_spec(path[i + 1].slot, *ctx.reverse_spec(path[i].key, tag, sym, sym2))
    forest.samples.pop(path[-1].slot, None)
    forest.set_spec(path[0].slot, ROOT)
    return len(path)


def attach(ctx, forest: Forest, u: Handle, v: Handle, spec: tuple) -> None:
    """Make root ``u`` a child of ``v`` through the edge named by ``spec``."""
    if not forest.is_root(u.slot):
        raise NotARoot(f"slot {u.slot} is not a root")
    nxt = ctx.follow(u, *spec)
    if nxt is None or nxt.slot != v.slot:
        raise EdgeNotConfirmed(f"no confirmed edge from slot {u.slot} to slot {v.slot}")
    forest.set_spec(u.slot, *spec)
    forest.samples.pop(u.slot, None)


def cut(forest: Forest, w: Handle) -> None:
    """Detach ``w`` from its parent; it becomes a sampled root."""
    if forest.is_root(w.slot):
        raise AlreadyRoot(f"slot {w.slot} is already a root")
    forest.set_spec(w.slot, ROOT)
    forest.samples[w.slot] = w.key


def is_child(ctx, forest: Forest, y: Handle, x: Handle) -> bool:
    tag, sym, sym2 = forest.spec(y.slot)
    if tag in (ROOT, UNASSIGNED):
        return False
    p = ctx.follow(y, tag, sym, sym2)
    return p is not None and p.slot == x.slot


def collect_tree(ctx, forest: Forest, root: Handle, limit: int) -> TreeScan:
    """Breadth-first discovery of the tree below ``root``, at most limit+1 nodes."""
    if not forest.is_root(root.slot):
        raise NotARoot(f"slot {root.slot} is not a root")
    scan = TreeScan(nodes=[(root, 0)], deepest=root)
    seen = {root.slot}
    head = 0
    while head < len(scan.nodes):
        x, d = scan.nodes[head]
        head += 1
        for y, _, _, _ in ctx.neighbors(x):
            if not is_child(ctx, forest, y, x):
                continue
            if y.slot in seen:
                raise CorruptForest(f"slot {y.slot} reached twice below root {root.slot}")
            seen.add(y.slot)
            scan.nodes.append((y, d + 1))
            if d + 1 > scan.height:
                scan.height, scan.deepest = d + 1, y
            if len(scan.nodes) > limit:
                scan.truncated = True
                return scan
    return scan


# ---------------------------------------------------------------------------
# static construction


def spanning_forest(n: int, src: np.ndarray, dst: np.ndarray, s_min: int) -> np.ndarray:
    """Parent array (-1 at roots) of a covering forest of the undirected graph.

    BFS spanning trees, then a post-order pass cuts a subtree whenever its
    residual height reaches ``s_min``; if a tree's leftover top part ends up
    smaller than ``s_min`` the shallowest cut is undone.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    keep = src != dst
    u = np.concatenate((src[keep], dst[keep]))
    v = np.concatenate((dst[keep], src[keep]))
    if u.size:
        pair = np.unique(u * n + v)
        u, v = pair // n, pair % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(u, minlength=n), out=indptr[1:])
    order, parent, tree = kernels.bfs_forest(indptr, v, n)
    is_root = kernels.cut_pass(order, parent, tree, s_min)
    parent = parent.copy()
    parent[is_root] = -1
    return parent


# ---------------------------------------------------------------------------
# invariant scan


@dataclass
class ForestReport:
    violations: list = field(default_factory=list)
    keys: dict = field(default_factory=dict)  # slot -> reconstructed key
    trees: int = 0
    components: int = 0
    max_height: int = 0


def scan_forest(ctx, forest: Forest, assigned: set) -> ForestReport:
    """Full structural check of the forest over the ``assigned`` slots."""
    rep = ForestReport()
    v = rep.violations
    prm = forest.params
    tags = forest.tags
    roots = [s for s in assigned if tags[s] == ROOT]
    for s in range(forest.m):
        if s not in assigned and tags[s] != UNASSIGNED:
            v.append(f"slot {s}: unassigned slot carries tag {int(tags[s])}")
        if s in assigned and tags[s] == UNASSIGNED:
            v.append(f"slot {s}: assigned slot has no parent spec")
    if set(forest.samples) != set(roots):
        extra = sorted(set(forest.samples) - set(roots))
        missing = sorted(set(roots) - set(forest.samples))
        v.append(f"root samples out of sync: extra={extra[:5]} missing={missing[:5]}")

    handles: dict[int, Handle] = {}
    tree_of: dict[int, int] = {}
    tree_nodes: dict[int, list] = {}
    for r in roots:
        key = forest.samples.get(r)
        if key is None:
            continue
        f = ctx.fingerprint(key)
        if ctx.lookup_slot(f) != r:
            v.append(f"slot {r}: root sample does not map back to its slot")
            continue
        try:
            scan = collect_tree(ctx, forest, Handle(key, f, r), limit=len(assigned))
        except CorruptForest as exc:
            v.append(f"slot {r}: {exc}")
            continue
        if scan.height > prm.h_max:
            v.append(f"slot {r}: tree height {scan.height} exceeds {prm.h_max}")
        rep.max_height = max(rep.max_height, scan.height)
        tree_nodes[r] = []
        for h, _ in scan.nodes:
            if h.slot in handles:
                v.append(f"slot {h.slot}: belongs to two trees")
            handles[h.slot] = h
            tree_of[h.slot] = r
            tree_nodes[r].append(h.slot)
    rep.trees = len(tree_nodes)
    for s in sorted(assigned - set(handles)):
        v.append(f"slot {s}: ascent does not reach a sampled root")
        if len(v) > 50:
            break

    comp_of: dict[int, int] = {}
    comp_size: dict[int, int] = {}
    for s, h in handles.items():
        if s in comp_of:
            continue
        cid = len(comp_size)
        comp_of[s] = cid
        stack = [h]
        count = 0
        while stack:
            x = stack.pop()
            count += 1
            for y, _, _, _ in ctx.neighbors(x):
                if y.slot not in handles:
                    v.append(f"slot {x.slot}: confirmed neighbour slot {y.slot} is not in the forest")
                    continue
                if y.slot not in comp_of:
                    comp_of[y.slot] = cid
                    stack.append(handles[y.slot])
        comp_size[cid] = count
    rep.components = len(comp_size)
    for r, members in tree_nodes.items():
        if len(members) < prm.s_min and comp_size[comp_of[r]] != len(members):
            v.append(
                f"slot {r}: tree of size {len(members)} < {prm.s_min} "
                f"does not cover its component of size {comp_size[comp_of[r]]}"
            )
    n = len(assigned)
    if rep.trees > n / prm.s_min + rep.components:
        v.append(f"{rep.trees} roots exceed n/S_min + components = {n / prm.s_min + rep.components:.1f}")
    rep.keys = {s: h.key for s, h in handles.items()}
    return rep
