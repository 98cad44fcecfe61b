"""Maximality audit: can any construct be added without losing a configuration.

A synthesized model should already contain every mandatory edge, group and
readable constraint the matrix supports.  The audit mutates the model one
candidate construct at a time and flags the mutation as a violation when the
model would still admit every matrix row (for constraints, additionally when
the candidate is not already implied by the diagram).  Candidate groups come
from the same construct space the synthesis searches: sibling-scoped maximal
cliques and minimal covering subsets; candidate constraints range over the
readable grammar with numeric literals drawn from the interesting bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import ConfigurationMatrix
from .model import AttributedFeatureModel
from .semantics import (
    DEFAULT_BUDGET,
    enumerate_configurations,
    eval_config,
    matrix_configurations,
)
from .variability import (
    MUTEX,
    OR,
    XOR,
    FeatureGroup,
    MandatorySet,
    _bron_kerbosch,
    _minimal_covers,
)


@dataclass
class MaximalityReport:
    violations: list
    classes_checked: list
    counts: dict

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"maximal: ok ({', '.join(self.classes_checked)})"
        return "maximal: VIOLATIONS\n" + "\n".join(f"  - {v}" for v in self.violations)


def _rows_survive(model: AttributedFeatureModel, row_cfgs) -> bool:
    return all(eval_config(model, cfg) for cfg in row_cfgs)


def _group_pools(model, or_enabled):
    """Candidate groups per parent, from row-level mutual exclusion and covers."""
    vm = model.vm
    h = model.hierarchy
    em = model.mandatory
    out = []
    for parent in h.preorder():
        kids = [c for c in h.children(parent) if (c, parent) not in em.edges]
        if len(kids) < 2:
            continue
        sel = {k: vm.selected_rows(k) for k in kids}
        kidset = set(kids)
        adj = {a: {b for b in kidset if b != a and not (sel[a] & sel[b]).any()}
               for a in kids}
        cliques = []
        _bron_kerbosch(adj, set(), set(kids), set(), cliques)

        prows = vm.selected_rows(parent)
        def covers(children):
            got = np.zeros(len(prows), dtype=bool)
            for c in children:
                got |= sel[c]
            return bool((got | ~prows).all())

        for c in sorted(cliques):
            out.append(FeatureGroup.make(parent, c, MUTEX))
            if covers(c):
                out.append(FeatureGroup.make(parent, c, XOR))
        if or_enabled and prows.any():
            weights = 1 << np.arange(len(kids), dtype=np.int64)
            stacked = np.stack([sel[k] for k in kids], axis=1)[prows]
            masks = [int(m) for m in (stacked * weights).sum(axis=1)]
            minimal = _minimal_covers(masks, len(kids), None) or []
            for mask in minimal:
                members = [kids[b] for b in range(len(kids)) if mask >> b & 1]
                if len(members) >= 2:
                    out.append(FeatureGroup.make(parent, members, OR))
    return out


def _rel_vector(values: np.ndarray, op: str, k: int) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        if op == "=":
            return values == k
        if op == "<=":
            return values <= k
        if op == ">=":
            return values >= k
        if op == "<":
            return values < k
        return values > k


def _config_arrays(cfgs, feature_names, attrs):
    sel = np.zeros((len(cfgs), len(feature_names)), dtype=bool)
    fpos = {f: i for i, f in enumerate(feature_names)}
    vals = {a.name: np.full(len(cfgs), np.nan) for a in attrs}
    for r, cfg in enumerate(cfgs):
        for f in cfg.selected:
            sel[r, fpos[f]] = True
        vm = cfg.value_map
        for a in attrs:
            v = vm.get(a.name)
            if isinstance(v, int):
                vals[a.name][r] = v
    return sel, vals


def audit_maximality(model: AttributedFeatureModel, matrix: ConfigurationMatrix,
                     bounds: dict | None = None, or_enabled: bool | None = None,
                     budget: int = DEFAULT_BUDGET) -> MaximalityReport:
    """Check the four mutation classes; see module docstring for the rules."""
    vm = model.vm
    h = model.hierarchy
    prov = model.provenance or {}
    if bounds is None:
        bounds = prov.get("bounds", {})
    if or_enabled is None:
        or_enabled = bool(prov.get("options", {}).get("or_groups", False))

    violations = []
    counts = {"mandatory": 0, "groups": 0, "promote": 0, "constraints": 0}
    row_cfgs = matrix_configurations(model, matrix)

    # Hierarchy must span all features.
    in_tree = set(h.features)
    for f in vm.feature_names:
        if f not in in_tree:
            violations.append(f"hierarchy: feature {f!r} is not connected")

    grouped_children = {}
    for g in model.groups:
        for c in g.children:
            grouped_children.setdefault(g.parent, set()).add(c)

    # Class 1: add a mandatory edge.
    for c, p in sorted(h.edges - model.mandatory.edges):
        counts["mandatory"] += 1
        if c in grouped_children.get(p, ()):  # groups draw from optional edges only
            continue
        mutated = model.mutated(mandatory=MandatorySet(model.mandatory.edges | {(c, p)}))
        if _rows_survive(mutated, row_cfgs):
            violations.append(f"mandatory: edge {c} -> {p} could be added")

    # Class 2: add a group.
    kept = list(model.groups)
    kept_keys = {(g.parent, g.children, g.kind) for g in kept}
    for cand in _group_pools(model, or_enabled):
        counts["groups"] += 1
        if (cand.parent, cand.children, cand.kind) in kept_keys:
            continue
        if any(cand.overlaps(g) for g in kept):
            continue  # would break the non-overlap structure, not a legal addition
        if cand.kind == MUTEX:
            mutated = model.mutated(g_mtx=tuple(model.g_mtx) + (cand,))
        elif cand.kind == XOR:
            mutated = model.mutated(g_xor=tuple(model.g_xor) + (cand,))
        else:
            mutated = model.mutated(g_or=tuple(model.g_or) + (cand,))
        if _rows_survive(mutated, row_cfgs):
            violations.append(f"groups: {cand.kind} group {cand.children} "
                              f"under {cand.parent} could be added")

    # Class 3: promote a mutex or or-group to xor.
    for g in model.g_mtx:
        counts["promote"] += 1
        mutated = model.mutated(
            g_mtx=tuple(x for x in model.g_mtx if x is not g),
            g_xor=tuple(model.g_xor) + (FeatureGroup.make(g.parent, g.children, XOR),))
        if _rows_survive(mutated, row_cfgs):
            violations.append(f"promote: mutex group {g.children} under {g.parent} "
                              f"could become xor")
    for g in model.g_or:
        counts["promote"] += 1
        mutated = model.mutated(
            g_or=tuple(x for x in model.g_or if x is not g),
            g_xor=tuple(model.g_xor) + (FeatureGroup.make(g.parent, g.children, XOR),))
        if _rows_survive(mutated, row_cfgs):
            violations.append(f"promote: or group {g.children} under {g.parent} "
                              f"could become xor")

    # Class 4: add a readable constraint (numeric literals from the bounds).
    fd_cfgs = sorted(enumerate_configurations(model.mutated(phi=None), budget), key=repr)
    feature_names = vm.feature_names
    attrs = vm.attributes
    fd_sel, fd_vals = _config_arrays(fd_cfgs, feature_names, attrs)
    row_sel, row_vals = _config_arrays(row_cfgs, feature_names, attrs)

    def check(lhs_rows, rhs_rows, lhs_fd, rhs_fd, text):
        counts["constraints"] += 1
        rows_ok = not bool((lhs_rows & ~rhs_rows).any())
        if not rows_ok:
            return
        if bool((lhs_fd & ~rhs_fd).any()):
            violations.append(f"constraints: {text} could be added")

    nf = len(feature_names)
    for i in range(nf):
        for j in range(nf):
            if i == j:
                continue
            check(row_sel[:, i], row_sel[:, j], fd_sel[:, i], fd_sel[:, j],
                  f"{feature_names[i]} => {feature_names[j]}")
            if i < j:
                check(row_sel[:, i], ~row_sel[:, j], fd_sel[:, i], ~fd_sel[:, j],
                      f"{feature_names[i]} => !{feature_names[j]}")

    rels = []  # (attribute, text, rows_vec, fd_vec)
    for a in attrs:
        if not (a.domain.numeric and a.domain.ordered):
            continue
        for k in bounds.get(a.name, ()):
            for op in ("=", "<=", ">=", "<", ">"):
                rels.append((a.name, f"{a.name} {op} {k}",
                             _rel_vector(row_vals[a.name], op, k),
                             _rel_vector(fd_vals[a.name], op, k)))
    for i in range(nf):
        for _, text, rv, fv in rels:
            check(row_sel[:, i], rv, fd_sel[:, i], fv,
                  f"{feature_names[i]} => {text}")
    for a1, t1, rv1, fv1 in rels:
        for a2, t2, rv2, fv2 in rels:
            if a1 == a2:
                continue
            check(rv1, rv2, fv1, fv2, f"{t1} => {t2}")

    classes = ["hierarchy", "mandatory", "groups", "promote", "constraints"]
    return MaximalityReport(violations, classes, counts)
