"""Readable cross-tree constraints and the residual row constraint.

Readable constraints are binary implications between boolean factors: a
feature, a negated feature, or a bounded comparison over an attribute.  Only
natural numbers are admitted as numeric literals.  As a compatibility
extension (on by default) equality against a text literal is allowed for
unordered attributes, since product matrices routinely tie features to text
values.

The residual constraint is the matrix itself in disjunctive form: one
disjunct per configuration, one equality per cell.  It is exact by
construction and makes the synthesized model sound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import MatrixError
from .extraction import Domain, VariableModel
from .implications import BinaryImplicationGraph, BISet, MutexGraph
from .matrix import ConfigurationMatrix, is_natural
from .structure import Hierarchy
from .variability import MandatorySet

OPS = ("=", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class FeatureTerm:
    name: str
    negated: bool = False


@dataclass(frozen=True)
class RelTerm:
    attribute: str
    op: str
    literal: object


@dataclass(frozen=True)
class ReadableConstraint:
    left: object
    right: object


def _ident(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_\-]*", name):
        return name
    return '"' + name.replace('"', '\\"') + '"'


def _literal(value) -> str:
    if isinstance(value, int):
        return str(value)
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_\-]*", value):
        return value
    return '"' + str(value).replace('"', '\\"') + '"'


def render_factor(t) -> str:
    if isinstance(t, FeatureTerm):
        return ("!" if t.negated else "") + _ident(t.name)
    return f"{_ident(t.attribute)} {t.op} {_literal(t.literal)}"


def render_constraint(rc: ReadableConstraint) -> str:
    return f"{render_factor(rc.left)} => {render_factor(rc.right)}"


_TOKEN = re.compile(r'\s*(=>|<=|>=|<|>|=|!|"(?:[^"\\]|\\.)*"|[A-Za-z0-9_\-]+)')


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise MatrixError(f"cannot tokenize constraint at: {text[pos:]!r}")
            break
        tok = m.group(1)
        if tok.startswith('"'):
            tok = ("str", tok[1:-1].replace('\\"', '"'))
        elif tok in ("=>", "<=", ">=", "<", ">", "=", "!"):
            tok = ("sym", tok)
        else:
            tok = ("word", tok)
        out.append(tok)
        pos = m.end()
    return out


def parse_constraint(text: str) -> ReadableConstraint:
    """Inverse of render_constraint (purely syntactic; no model lookup)."""
    toks = _tokenize(text)

    def factor(i):
        neg = False
        if toks[i] == ("sym", "!"):
            neg, i = True, i + 1
        kind, name = toks[i]
        if kind == "sym":
            raise MatrixError(f"unexpected token {name!r} in constraint {text!r}")
        i += 1
        if not neg and i < len(toks) and toks[i][0] == "sym" and toks[i][1] in OPS:
            op = toks[i][1]
            lk, lv = toks[i + 1]
            literal = int(lv) if lk == "word" and is_natural(lv) else lv
            return RelTerm(name, op, literal), i + 2
        return FeatureTerm(name, neg), i

    left, i = factor(0)
    if i >= len(toks) or toks[i] != ("sym", "=>"):
        raise MatrixError(f"expected => in constraint {text!r}")
    right, j = factor(i + 1)
    if j != len(toks):
        raise MatrixError(f"trailing tokens in constraint {text!r}")
    return ReadableConstraint(left, right)


def compute_requires(big: BinaryImplicationGraph, h: Hierarchy, em: MandatorySet,
                     order: dict) -> list:
    """One requires constraint per implication edge no hierarchy element covers.

    Coverage is edge-level: an edge is dropped only when it literally is a
    hierarchy edge (child to parent) or an inverted mandatory edge.
    """
    hier = h.edges
    inv_mand = {(p, c) for (c, p) in em.edges}
    out = []
    for a, b in big.edges:
        if (a, b) in hier or (a, b) in inv_mand:
            continue
        out.append(ReadableConstraint(FeatureTerm(a), FeatureTerm(b)))
    out.sort(key=lambda rc: (order.get(rc.left.name, 0), order.get(rc.right.name, 0)))
    return out


def compute_excludes(mutex: MutexGraph, kept_groups, order: dict) -> list:
    """One excludes constraint per mutex edge not inside a kept mutex/xor group.

    The feature whose source column comes first is put on the left, so the
    constraint reads in matrix order.
    """
    covered = set()
    for g in kept_groups:
        ch = set(g.children)
        for a in ch:
            for b in ch:
                if a != b:
                    covered.add(frozenset((a, b)))
    out = []
    for e in mutex.edges:
        if e in covered:
            continue
        a, b = sorted(e, key=lambda f: order.get(f, 0))
        out.append(ReadableConstraint(FeatureTerm(a), FeatureTerm(b, negated=True)))
    out.sort(key=lambda rc: (order.get(rc.left.name, 0), order.get(rc.right.name, 0)))
    return out


def expressible(s_mask: np.ndarray, domain: Domain, textual_eq: bool):
    """Rewrite a value set as `op literal` over the domain, or None.

    Tried in order: =, <=, >=, <, >.  Numeric comparisons need an ordered
    numeric domain; text admits only equality (behind the compatibility
    flag).  The full domain is a tautology and yields None as well.
    """
    idx = np.flatnonzero(s_mask)
    if idx.size == 0 or idx.size == len(domain.values):
        return None
    values = [domain.values[c] for c in idx]
    if len(values) == 1:
        v = values[0]
        if isinstance(v, int):
            return ("=", v)
        if textual_eq:
            return ("=", v)
        return None
    if not (domain.numeric and domain.ordered):
        return None
    chosen = set(values)
    lo, hi = min(values), max(values)
    if {v for v in domain.values if v <= hi} == chosen:
        return ("<=", hi)
    if {v for v in domain.values if v >= lo} == chosen:
        return (">=", lo)
    if {v for v in domain.values if v < hi + 1} == chosen:
        return ("<", hi + 1)
    if lo >= 1 and {v for v in domain.values if v > lo - 1} == chosen:
        return (">", lo - 1)
    return None


def compute_complex(bi: BISet, bounds: dict, vm: VariableModel, *,
                    textual_eq: bool = True) -> list:
    """Attribute-involving constraints.

    Feature-to-attribute: for each feature, merge the S-sets of its presence
    values; if the union rewrites as a bounded comparison it becomes
    `feature => attr op k`.  Attribute-to-attribute: for each interesting
    bound k of the left attribute, partition its values into below / equal /
    above k, merge each class, and keep the classes whose both sides rewrite.
    """
    out, seen = [], set()

    def emit(rc):
        key = render_constraint(rc)
        if key not in seen:
            seen.add(key)
            out.append(rc)

    for f in vm.features:
        if f.column is None:
            continue
        pres_codes = np.flatnonzero(f.presence_mask)
        occurring = np.unique(vm.matrix.columns[f.column].codes)
        pres_codes = pres_codes[np.isin(pres_codes, occurring)]
        if pres_codes.size == 0:
            continue
        for a in vm.attributes:
            if a.column == f.column:
                continue
            block = bi.tables.block(f.column, a.column)
            union = block[pres_codes].any(axis=0)
            rel = expressible(union, a.domain, textual_eq)
            if rel is not None:
                emit(ReadableConstraint(FeatureTerm(f.name), RelTerm(a.name, rel[0], rel[1])))

    for ai in vm.attributes:
        ks = bounds.get(ai.name)
        if not ks or not (ai.domain.numeric and ai.domain.ordered):
            continue
        vals = np.array(ai.domain.values)
        for k in ks:
            classes = [vals < k, vals == k, vals > k]
            for cls in classes:
                u_codes = np.flatnonzero(cls)
                if u_codes.size == 0:
                    continue
                left = expressible(cls, ai.domain, textual_eq)
                if left is None:
                    continue
                for aj in vm.attributes:
                    if aj.name == ai.name:
                        continue
                    block = bi.tables.block(ai.column, aj.column)
                    union = block[u_codes].any(axis=0)
                    right = expressible(union, aj.domain, textual_eq)
                    if right is None:
                        continue
                    emit(ReadableConstraint(RelTerm(ai.name, left[0], left[1]),
                                            RelTerm(aj.name, right[0], right[1])))
    return out


class ResidualConstraint:
    """The matrix in disjunctive form: satisfied exactly by its own rows."""

    def __init__(self, matrix: ConfigurationMatrix):
        self.variables = tuple(matrix.variables)
        self._columns = [(c.name, list(c.values), c.codes.copy()) for c in matrix.columns]
        self.n_disjuncts = matrix.n_rows

    def disjunct(self, k: int) -> list:
        return [(name, values[codes[k]]) for name, values, codes in self._columns]

    def __iter__(self):
        for k in range(self.n_disjuncts):
            yield self.disjunct(k)

    def rows(self) -> list:
        return [tuple(v for _, v in d) for d in self]

    def satisfied_by(self, assignment: dict) -> bool:
        """Truth of the constraint under a full variable-to-value assignment."""
        for k in range(self.n_disjuncts):
            if all(assignment.get(name) == values[codes[k]]
                   for name, values, codes in self._columns):
                return True
        return False


def compute_phi(matrix: ConfigurationMatrix) -> ResidualConstraint:
    return ResidualConstraint(matrix)
