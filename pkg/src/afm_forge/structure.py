"""Hierarchy selection and attribute placement.

Every legal hierarchy is a spanning tree of the implication digraph whose
edges point child to parent, so parent selection is a constrained choice among
a feature's implication targets.  Attributes may live on any feature whose
deselection forces the attribute to its null value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllegalParent, IllegalPlacement, IllegalRoot, Unreachable
from .extraction import VariableModel
from .implications import BinaryImplicationGraph, BISet
from .knowledge import DecisionProvider


@dataclass
class Hierarchy:
    root: str
    parent: dict  # child -> parent

    @property
    def edges(self) -> set:
        return set(self.parent.items())

    @property
    def features(self) -> list:
        return [self.root] + list(self.parent)

    def children(self, feature) -> list:
        return sorted(c for c, p in self.parent.items() if p == feature)

    def depth(self, feature) -> int:
        d = 0
        while feature != self.root:
            feature = self.parent[feature]
            d += 1
        return d

    def preorder(self) -> list:
        kids = {}
        for c, p in self.parent.items():
            kids.setdefault(p, []).append(c)
        out, stack = [], [self.root]
        while stack:
            f = stack.pop()
            out.append(f)
            for c in sorted(kids.get(f, ()), reverse=True):
                stack.append(c)
        return out


@dataclass
class Placement:
    alpha: dict = field(default_factory=dict)  # attribute -> feature


DEFAULT_ROOT_NAME = "root"


def fresh_root_name(big: BinaryImplicationGraph) -> str:
    name = DEFAULT_ROOT_NAME
    while name in big._out:
        name += "_"
    return name


def ensure_rooted(big: BinaryImplicationGraph, dk, vm: VariableModel):
    """Guarantee the implication graph admits a spanning tree under one root.

    An existing feature can serve as root only when it is selected in every
    configuration (then every feature implies it directly); naming one that is
    ever deselected is a knowledge-file contradiction, surfaced here.  With no
    designated root, or a root that is not a column feature, a fresh root is
    created: implied by everything, implying exactly the always-selected
    features.  Returns (graph, variable model), both possibly extended.
    """
    root = dk if isinstance(dk, str) or dk is None else dk.root_name
    if root is not None and root in big._out:
        if root not in big.always_selected:
            raise IllegalRoot(
                f"{root!r} is deselected in some configuration and cannot be the root")
        big.root = root
        return big, vm

    if root is None:
        root = fresh_root_name(big)

    new_edges = set(big.edges)
    new_edges |= {(f, root) for f in big.nodes}
    new_edges |= {(root, f) for f in big.always_selected}
    rooted = BinaryImplicationGraph([root] + big.nodes, new_edges,
                                    always_selected=big.always_selected | {root},
                                    root=root)
    return rooted, vm.with_root(root)


def parent_candidates(big: BinaryImplicationGraph, feature: str, parent: dict) -> list:
    """Implication targets of `feature` that would not close a cycle.

    A candidate is unsafe when `feature` already sits on its parent chain.
    Candidates are sorted by descending implication out-degree, ties broken
    lexicographically, so interactive sessions see stable orderings.
    """
    cands = []
    for c in big.out_neighbors(feature):
        if c == feature:
            continue
        x, unsafe = c, False
        while x in parent:
            x = parent[x]
            if x == feature:
                unsafe = True
                break
        if not unsafe:
            cands.append(c)
    cands.sort(key=lambda c: (-big.out_degree(c), c))
    return cands


def hierarchy_question_order(big: BinaryImplicationGraph) -> list:
    return sorted((f for f in big.nodes if f != big.root),
                  key=lambda f: (-big.out_degree(f), f))


def extract_hierarchy(big: BinaryImplicationGraph, provider: DecisionProvider) -> Hierarchy:
    """Promote one spanning tree of the rooted implication graph."""
    if big.root is None:
        raise Unreachable("implication graph has no designated root")
    parent = {}
    for f in hierarchy_question_order(big):
        cands = parent_candidates(big, f, parent)
        if not cands:
            raise Unreachable(f"{f!r} has no legal parent; graph is not rooted")
        choice = provider.choose_parent(f, cands)
        if choice not in cands:
            raise IllegalParent(f"{choice!r} is not a legal parent of {f!r} "
                                f"(candidates: {', '.join(cands)})")
        parent[f] = choice
    return Hierarchy(big.root, parent)


def legal_attribute_places(bi: BISet, vm: VariableModel) -> dict:
    """For each attribute, the features whose deselection forces the null value.

    Features that are never deselected qualify vacuously (in particular the
    root).  Order inside each candidate list follows the feature order of the
    variable model.
    """
    # Every domain code occurs in the matrix by construction, so a feature is
    # deselected somewhere exactly when it has an absence code at all.
    absent_codes = {f.name: (None if f.presence_mask is None
                             else np.flatnonzero(~f.presence_mask))
                    for f in vm.features}
    legal = {}
    for a in vm.attributes:
        col_a = vm.matrix.columns[a.column]
        null_code = col_a.code_of(a.domain.null_value)
        hosts = []
        for f in vm.features:
            absent = absent_codes[f.name]
            if f.column is None or absent.size == 0:
                hosts.append(f.name)  # never deselected: vacuously legal
                continue
            if f.column == a.column:
                continue
            seen = bi.tables.block(f.column, a.column)[absent].any(axis=0)
            if null_code is not None:
                seen = seen.copy()
                seen[null_code] = False
            if not seen.any():
                hosts.append(f.name)
        legal[a.name] = hosts
    return legal


def place_attributes(legal: dict, provider: DecisionProvider,
                     hierarchy: Hierarchy) -> Placement:
    """Pick one legal host per attribute (deepest first in the offered order)."""
    alpha = {}
    for attr in legal:
        cands = sorted(legal[attr], key=lambda f: (-hierarchy.depth(f), f))
        if not cands:
            raise Unreachable(f"attribute {attr!r} has no legal place")
        choice = provider.choose_place(attr, cands)
        if choice not in cands:
            raise IllegalPlacement(f"{choice!r} is not a legal place for {attr!r} "
                                   f"(candidates: {', '.join(cands)})")
        alpha[attr] = choice
    return Placement(alpha)
