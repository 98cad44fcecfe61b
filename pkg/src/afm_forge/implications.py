"""Binary implications and the graphs derived from them.

A binary implication <i, j, u, S> states: whenever column i holds value u,
column j holds one of the values in S.  The set of all such implications over
a matrix drives everything downstream: the feature implication digraph, the
mutex graph, attribute placement and the readable constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extraction import VariableModel
from .kernels import CoocTables
from .matrix import ConfigurationMatrix


@dataclass(frozen=True)
class BinaryImplication:
    i: int
    j: int
    u: object
    s: frozenset


class BISet:
    """All binary implications of a matrix, keyed by (i, j, u).

    Backed by the co-occurrence tables: the S-set of (i, j, u) is exactly the
    set of column-j values whose co-occurrence bit with u is on.  There is one
    entry per ordered column pair and per occurring value of the left column,
    so the BISet is comprehensive by construction.
    """

    def __init__(self, matrix: ConfigurationMatrix, tables: CoocTables):
        self.matrix = matrix
        self.tables = tables

    def __len__(self):
        n = self.matrix.n_cols
        return int(sum(c.domain_size for c in self.matrix.columns) * (n - 1))

    def s_codes(self, i: int, j: int, u_code: int) -> np.ndarray:
        return self.tables.row(i, j, u_code)

    def get(self, i: int, j: int, u) -> frozenset | None:
        """S for entry (i, j, u), or None when no such entry exists."""
        ci, cj = self.matrix.columns[i], self.matrix.columns[j]
        u_code = ci.code_of(u)
        if i == j or u_code is None:
            return None
        mask = self.tables.row(i, j, u_code)
        return frozenset(cj.values[c] for c in np.flatnonzero(mask))

    def __iter__(self):
        n = self.matrix.n_cols
        for i in range(n):
            ci = self.matrix.columns[i]
            for j in range(n):
                if i == j:
                    continue
                cj = self.matrix.columns[j]
                block = self.tables.block(i, j)
                for u_code, u in enumerate(ci.values):
                    s = frozenset(cj.values[c] for c in np.flatnonzero(block[u_code]))
                    yield BinaryImplication(i, j, u, s)

    def to_dict(self) -> dict:
        return {(b.i, b.j, b.u): b.s for b in self}

    def dump_text(self) -> str:
        """Line-oriented debug dump: i<TAB>j<TAB>u<TAB>{s1,s2,...}, sorted."""
        lines = []
        for b in self:
            body = ",".join(sorted(str(v) for v in b.s))
            lines.append(f"{b.i}\t{b.j}\t{b.u}\t{{{body}}}")
        return "\n".join(sorted(lines)) + "\n"


def compute_binary_implications(matrix: ConfigurationMatrix,
                                backend: str | None = None) -> BISet:
    """Compute the full implication set of a matrix (the pipeline hot spot)."""
    tables = CoocTables(matrix.codes_t(), matrix.domain_sizes(), backend=backend)
    return BISet(matrix, tables)


def _entries(bi) -> dict:
    return bi if isinstance(bi, dict) else bi.to_dict()


def bi_valid(bi, matrix: ConfigurationMatrix) -> bool:
    """Does every entry hold on every configuration (full matrix scan)."""
    for (i, j, u), s in _entries(bi).items():
        ci, cj = matrix.columns[i], matrix.columns[j]
        u_code = ci.code_of(u)
        if u_code is None:
            continue  # vacuous: the antecedent value never occurs
        rows = ci.codes == u_code
        seen = {cj.values[c] for c in np.unique(cj.codes[rows])}
        if not seen <= set(s):
            return False
    return True


def bi_comprehensive(bi, matrix: ConfigurationMatrix) -> bool:
    """Is there an entry for every (i, j, u) combination occurring in the matrix."""
    entries = _entries(bi)
    n = matrix.n_cols
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for u in matrix.columns[i].values:
                if (i, j, u) not in entries:
                    return False
    return True


class BinaryImplicationGraph:
    """Directed graph over features: edge (a, b) iff a implies b in every row."""

    def __init__(self, nodes, edges, always_selected=frozenset(), root=None):
        self.nodes = list(nodes)
        self.edges = set(edges)
        self.always_selected = frozenset(always_selected)
        self.root = root
        self._out = {n: set() for n in self.nodes}
        self._in = {n: set() for n in self.nodes}
        for a, b in self.edges:
            self._out[a].add(b)
            self._in[b].add(a)

    def out_neighbors(self, node):
        return self._out.get(node, set())

    def in_neighbors(self, node):
        return self._in.get(node, set())

    def out_degree(self, node) -> int:
        return len(self._out.get(node, ()))

    def has_edge(self, a, b) -> bool:
        return (a, b) in self.edges

    def weakly_connected_components(self):
        seen, comps = set(), []
        for start in self.nodes:
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self._out[x] | self._in[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comps.append(comp)
        return comps


class MutexGraph:
    """Undirected graph over features: edge {a, b} iff no row selects both."""

    def __init__(self, nodes, edges):
        self.nodes = list(nodes)
        self.edges = {frozenset(e) for e in edges}
        self._adj = {n: set() for n in self.nodes}
        for e in self.edges:
            a, b = tuple(e)
            self._adj[a].add(b)
            self._adj[b].add(a)

    def neighbors(self, node):
        return self._adj.get(node, set())

    def has_edge(self, a, b) -> bool:
        return frozenset((a, b)) in self.edges


def build_graphs(vm: VariableModel, bi: BISet):
    """Derive the implication digraph and mutex graph over all features.

    Works on an atom matrix: one atom per (feature column, value code).  The
    co-occurrence of presence atoms with absence atoms decides implications;
    presence with presence decides mutual exclusion.  Both checks reduce to
    two integer matmuls, which keeps this stage cheap next to the implication
    kernel itself.
    """
    feats = vm.features
    fcols = sorted({f.column for f in feats})
    col_pos = {c: i for i, c in enumerate(fcols)}
    sizes = [vm.matrix.columns[c].domain_size for c in fcols]
    starts = np.zeros(len(fcols), dtype=np.int64)
    if fcols:
        starts[1:] = np.cumsum(sizes)[:-1]
    k_atoms = int(sum(sizes))

    occ = np.zeros((k_atoms, k_atoms), dtype=np.uint8)
    bi.tables.gather(fcols, fcols, starts, starts, occ)

    nf = len(feats)
    pres = np.zeros((nf, k_atoms), dtype=np.uint8)
    absn = np.zeros((nf, k_atoms), dtype=np.uint8)
    for fi, f in enumerate(feats):
        s = starts[col_pos[f.column]]
        d = vm.matrix.columns[f.column].domain_size
        pres[fi, s: s + d] = f.presence_mask
        absn[fi, s: s + d] = ~f.presence_mask

    p32 = pres.astype(np.int32)
    m = p32 @ occ.astype(np.int32)
    imp = (m @ absn.T.astype(np.int32)) == 0
    mux = (m @ p32.T) == 0

    names = vm.feature_names
    edges = {(names[a], names[b]) for a, b in zip(*np.nonzero(imp)) if a != b}
    mutex_edges = {frozenset((names[a], names[b]))
                   for a, b in zip(*np.nonzero(mux)) if a < b}

    always = frozenset(n for n in names if vm.always_selected(n))
    big = BinaryImplicationGraph(names, edges, always_selected=always)
    mutex = MutexGraph(names, mutex_edges)
    return big, mutex
