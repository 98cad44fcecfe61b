"""Variability information: mandatory edges and mutex / or / xor groups.

Mutex groups are the maximal cliques of the mutex graph restricted to one
parent's non-mandatory children.  Or-groups are minimal sibling subsets whose
disjunction the parent implies; finding all of them is a covering problem
solved by branch-and-bound over sibling subsets, with a wall-clock budget
because the search is worst-case exponential (off by default for that
reason).  Xor groups are the groups that are both.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import IllegalGroupChoice
from .extraction import VariableModel
from .implications import BinaryImplicationGraph, MutexGraph
from .knowledge import DecisionProvider
from .matrix import ConfigurationMatrix
from .structure import Hierarchy

MUTEX, OR, XOR = "mutex", "or", "xor"


@dataclass(frozen=True)
class FeatureGroup:
    parent: str
    children: tuple  # sorted feature names, len >= 2
    kind: str

    @staticmethod
    def make(parent, children, kind):
        return FeatureGroup(parent, tuple(sorted(children)), kind)

    def same_edges(self, other) -> bool:
        return self.parent == other.parent and self.children == other.children

    def overlaps(self, other) -> bool:
        return (self.parent == other.parent
                and bool(set(self.children) & set(other.children)))


class TimedOut:
    """Marker value: the or-group search exhausted its budget."""

    def __repr__(self):
        return "TimedOut()"


@dataclass
class MandatorySet:
    edges: set  # of (child, parent) hierarchy edges

    def __contains__(self, edge):
        return edge in self.edges


def compute_mandatory(h: Hierarchy, big: BinaryImplicationGraph) -> MandatorySet:
    """Hierarchy edges whose parent-to-child implication also holds."""
    return MandatorySet({(c, p) for c, p in h.parent.items() if big.has_edge(p, c)})


def _non_mandatory_children(h: Hierarchy, em: MandatorySet, parent: str) -> list:
    return [c for c in h.children(parent) if (c, parent) not in em]


def _bron_kerbosch(adj, r, p, x, out):
    if not p and not x:
        if len(r) >= 2:
            out.append(tuple(sorted(r)))
        return
    pivot, best = None, -1
    for v in sorted(p | x):
        k = len(p & adj[v])
        if k > best:
            pivot, best = v, k
    for v in sorted(p - adj[pivot]):
        _bron_kerbosch(adj, r | {v}, p & adj[v], x & adj[v], out)
        p = p - {v}
        x = x | {v}


def compute_mutex_groups(mutex: MutexGraph, h: Hierarchy,
                         em: MandatorySet) -> list:
    """Per parent, the maximal cliques (size >= 2) among its optional children."""
    groups = []
    for parent in h.preorder():
        kids = _non_mandatory_children(h, em, parent)
        if len(kids) < 2:
            continue
        kidset = set(kids)
        adj = {k: (mutex.neighbors(k) & kidset) for k in kids}
        found = []
        _bron_kerbosch(adj, set(), set(kids), set(), found)
        groups.extend(FeatureGroup.make(parent, c, MUTEX) for c in sorted(found))
    return groups


class _BudgetExhausted(Exception):
    pass


def _minimal_covers(row_masks: list, n: int, deadline: float | None):
    """All minimal hitting sets of the row masks, as bitmasks; None on timeout.

    Branch on the members of the first uncovered row, banning each tried
    member for later branches so every minimal set is produced once.  The
    necessity post-check filters the occasional non-minimal candidate.
    """
    rows = sorted(set(row_masks), key=lambda m: bin(m).count("1"))
    minimal_rows = []
    for m in rows:
        if not any(r & m == r for r in minimal_rows):
            minimal_rows.append(m)
    rows = minimal_rows
    if any(m == 0 for m in rows):
        return []

    out, seen = [], set()
    ticker = [0]

    def necessary(mask):
        for bit_i in range(n):
            b = 1 << bit_i
            if mask & b and all(r & (mask & ~b) for r in rows):
                return False
        return True

    def dfs(chosen, banned):
        ticker[0] += 1
        if deadline is not None and ticker[0] % 256 == 0 and time.perf_counter() > deadline:
            raise _BudgetExhausted
        pending = None
        for r in rows:
            if not (r & chosen):
                pending = r
                break
        if pending is None:
            if chosen not in seen:
                seen.add(chosen)
                if necessary(chosen):
                    out.append(chosen)
            return
        options = pending & ~banned
        bit = 0
        while options >> bit:
            b = 1 << bit
            if options & b:
                dfs(chosen | b, banned)
                banned |= b
            bit += 1

    try:
        dfs(0, 0)
    except _BudgetExhausted:
        return None
    return out


def compute_or_groups(matrix: ConfigurationMatrix, vm: VariableModel, h: Hierarchy,
                      em: MandatorySet, budget_ms: int | None = None):
    """Minimal sibling subsets covering every configuration that selects the parent.

    Returns a list of or-groups, or a TimedOut marker when the budget runs
    out.  Members come from non-mandatory children only; minimality means no
    proper subset also covers.
    """
    deadline = None
    if budget_ms is not None:
        deadline = time.perf_counter() + budget_ms / 1000.0
    groups = []
    for parent in h.preorder():
        kids = _non_mandatory_children(h, em, parent)
        if len(kids) < 2:
            continue
        prows = vm.selected_rows(parent)
        if not prows.any():
            continue
        sel = np.stack([vm.selected_rows(k) for k in kids], axis=1)[prows]
        weights = (1 << np.arange(len(kids), dtype=np.int64))
        masks = [int(m) for m in (sel * weights).sum(axis=1)]
        covers = _minimal_covers(masks, len(kids), deadline)
        if covers is None:
            return TimedOut()
        for mask in covers:
            members = [kids[b] for b in range(len(kids)) if mask >> b & 1]
            if len(members) >= 2:
                groups.append(FeatureGroup.make(parent, members, OR))
    groups.sort(key=lambda g: (g.parent, g.children))
    return groups


def _parent_implies_disjunction(group: FeatureGroup, vm: VariableModel) -> bool:
    prows = vm.selected_rows(group.parent)
    any_child = np.zeros(len(prows), dtype=bool)
    for c in group.children:
        any_child |= vm.selected_rows(c)
    return bool((any_child | ~prows).all())


def compute_xor_groups(mutex_groups: list, or_groups, matrix: ConfigurationMatrix,
                       vm: VariableModel, h: Hierarchy) -> list:
    """Groups that are simultaneously mutex and or.

    With or-groups available, intersect the two lists.  Without them, keep
    the mutex groups whose parent implies the disjunction of the children;
    for a mutex clique that condition makes the clique a minimal cover, so
    the two modes agree.
    """
    if isinstance(or_groups, list):
        or_keys = {(g.parent, g.children) for g in or_groups}
        xors = [g for g in mutex_groups if (g.parent, g.children) in or_keys]
    else:
        xors = [g for g in mutex_groups if _parent_implies_disjunction(g, vm)]
    return [FeatureGroup.make(g.parent, g.children, XOR) for g in xors]


def finalize_groups(mutex_groups: list, or_groups, xor_groups: list,
                    provider: DecisionProvider):
    """Resolve the candidate groups into disjoint final sets.

    An xor group absorbs its coextensive mutex and or candidates.  Remaining
    candidates that share a child under the same parent form overlap clusters;
    the provider keeps a non-overlapping subset of each cluster, everything
    else is discarded (and reported, for provenance).
    """
    xor_keys = {(g.parent, g.children) for g in xor_groups}
    absorbed = []
    pool = list(xor_groups)
    for g in mutex_groups + (or_groups if isinstance(or_groups, list) else []):
        if (g.parent, g.children) in xor_keys:
            absorbed.append(g)
        else:
            pool.append(g)
    pool.sort(key=lambda g: (g.parent, g.children, g.kind))

    # Overlap clusters: connected components of the pairwise-overlap relation.
    comp = list(range(len(pool)))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for a in range(len(pool)):
        for b in range(a + 1, len(pool)):
            if pool[a].overlaps(pool[b]):
                comp[find(a)] = find(b)

    clusters = {}
    for idx, g in enumerate(pool):
        clusters.setdefault(find(idx), []).append(g)

    kept, discarded = [], list(absorbed)
    for _, cluster in sorted(clusters.items(), key=lambda kv: (kv[1][0].parent, kv[1][0].children)):
        if len(cluster) == 1:
            kept.extend(cluster)
            continue
        cluster = sorted(cluster, key=lambda g: (g.parent, g.children, g.kind))
        offered = {(g.parent, g.children, g.kind) for g in cluster}
        chosen = provider.choose_group(cluster)
        for g in chosen:
            if (g.parent, g.children, g.kind) not in offered:
                raise IllegalGroupChoice(f"group {g} was not among the offered candidates")
        for a in chosen:
            for b in chosen:
                if a is not b and a.overlaps(b):
                    raise IllegalGroupChoice("chosen groups overlap")
        chosen_keys = {(g.parent, g.children, g.kind) for g in chosen}
        kept.extend(sorted(chosen, key=lambda g: (g.parent, g.children, g.kind)))
        discarded.extend(g for g in cluster
                         if (g.parent, g.children, g.kind) not in chosen_keys)

    keyfn = lambda g: (g.parent, g.children)
    g_mtx = tuple(sorted((g for g in kept if g.kind == MUTEX), key=keyfn))
    g_xor = tuple(sorted((g for g in kept if g.kind == XOR), key=keyfn))
    g_or = tuple(sorted((g for g in kept if g.kind == OR), key=keyfn))
    return g_mtx, g_xor, g_or, discarded
