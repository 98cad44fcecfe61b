"""The attributed feature model: diagram, residual constraint, provenance.

The JSON serialization is self-contained: besides the diagram it carries the
variable model (column kinds and presence predicates), so a saved model can be
re-bound against its matrix for validation, and byte-identical output is a
pure function of (matrix, decisions, options).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .constraints import ResidualConstraint, parse_constraint, render_constraint
from .errors import SchemaError
from .extraction import Attribute, Domain, Feature, VariableModel
from .matrix import ConfigurationMatrix
from .structure import Hierarchy, Placement
from .variability import FeatureGroup, MandatorySet

EXACT = "exact"
DIAGRAM_ONLY = "diagram-only"


@dataclass
class AttributedFeatureModel:
    vm: VariableModel
    hierarchy: Hierarchy
    mandatory: MandatorySet
    g_mtx: tuple
    g_xor: tuple
    g_or: tuple
    placement: Placement
    rc: list
    phi: ResidualConstraint | None
    provenance: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)  # runtime only, never serialized

    @property
    def mode(self) -> str:
        return EXACT if self.phi is not None else DIAGRAM_ONLY

    @property
    def groups(self) -> tuple:
        return tuple(self.g_mtx) + tuple(self.g_xor) + tuple(self.g_or)

    def mutated(self, **kw) -> "AttributedFeatureModel":
        return replace(self, **kw)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _feature_sort(vm):
    return sorted(vm.features, key=lambda f: vm.feature_order[f.name])


def to_dict(m: AttributedFeatureModel) -> dict:
    vm = m.vm
    order = vm.feature_order
    feats = []
    for f in _feature_sort(vm):
        col = vm.matrix.columns[f.column].name if f.column is not None else None
        presence = None
        if f.presence_mask is not None:
            col_values = vm.matrix.columns[f.column].values
            presence = [col_values[c] for c in np.flatnonzero(f.presence_mask)]
        feats.append({"name": f.name, "column": col, "presence": presence, "origin": f.origin})
    attrs = []
    for a in vm.attributes:
        d = a.domain
        attrs.append({
            "name": a.name,
            "column": vm.matrix.columns[a.column].name,
            "domain": list(d.values),
            "null": d.null_value,
            "numeric": d.numeric,
            "order": ([v for v, _ in sorted(d.rank.items(), key=lambda kv: kv[1])]
                      if (d.rank and not d.numeric) else None),
            "place": m.placement.alpha.get(a.name),
        })

    def group_list(groups):
        return [{"parent": g.parent, "children": list(g.children)} for g in groups]

    phi = None
    if m.phi is not None:
        phi = {"variables": list(m.phi.variables), "rows": [list(r) for r in m.phi.rows()]}

    return {
        "format": "afm-forge-1",
        "mode": m.mode,
        "identifier_columns": list(vm.identifier_columns),
        "columns": [{"name": c.name, "kind": vm.classification.get(c.name), "numeric": c.numeric}
                    for c in vm.matrix.columns],
        "dropped_features": list(vm.dropped_features),
        "features": feats,
        "attributes": attrs,
        "hierarchy": {
            "root": m.hierarchy.root,
            "edges": sorted(m.hierarchy.edges, key=lambda e: order.get(e[0], 0)),
        },
        "mandatory": sorted(m.mandatory.edges, key=lambda e: order.get(e[0], 0)),
        "groups": {
            "mutex": group_list(m.g_mtx),
            "xor": group_list(m.g_xor),
            "or": group_list(m.g_or),
        },
        "constraints": [render_constraint(rc) for rc in m.rc],
        "phi": phi,
        "provenance": m.provenance,
    }


def to_json(m: AttributedFeatureModel) -> str:
    return json.dumps(to_dict(m), indent=2, ensure_ascii=False) + "\n"


def bind_model(doc: dict, matrix: ConfigurationMatrix) -> AttributedFeatureModel:
    """Rebuild a serialized model against its configuration matrix."""
    if doc.get("format") != "afm-forge-1":
        raise SchemaError("not an afm-forge model document", path="$.format")
    expect = [c["name"] for c in doc["columns"]]
    # Columns the model does not reference were identifiers (whether dropped
    # at parse time or by classification); remove them before binding.
    surplus = [n for n in matrix.variables if n not in expect]
    reduced = matrix.drop_columns(surplus) if surplus else matrix
    if reduced.variables != expect:
        raise SchemaError(f"matrix columns {reduced.variables} do not match model columns {expect}",
                          path="$.columns")

    features = []
    for spec in doc["features"]:
        if spec["column"] is None:
            features.append(Feature(spec["name"], None, None, origin=spec.get("origin", "root")))
            continue
        j = reduced.column_index(spec["column"])
        col = reduced.columns[j]
        mask = np.zeros(col.domain_size, dtype=bool)
        for v in spec["presence"]:
            c = col.code_of(v)
            if c is not None:
                mask[c] = True
        features.append(Feature(spec["name"], j, mask, origin=spec.get("origin", "boolean")))

    attributes = []
    for spec in doc["attributes"]:
        j = reduced.column_index(spec["column"])
        col = reduced.columns[j]
        rank = None
        if spec["numeric"]:
            rank = {v: v for v in col.values if isinstance(v, int)}
            if isinstance(spec["null"], int):
                rank.setdefault(spec["null"], spec["null"])
        elif spec.get("order"):
            rank = {v: i for i, v in enumerate(spec["order"])}
        domain = Domain(tuple(col.values), spec["null"], spec["numeric"], rank)
        attributes.append(Attribute(spec["name"], j, domain))

    classification = {c["name"]: c.get("kind") for c in doc["columns"]}
    vm = VariableModel(reduced, features, attributes, classification,
                       doc.get("identifier_columns", []), doc.get("dropped_features", []))
    vm.root_name = doc["hierarchy"]["root"]

    hierarchy = Hierarchy(doc["hierarchy"]["root"],
                          {c: p for c, p in doc["hierarchy"]["edges"]})
    mandatory = MandatorySet({tuple(e) for e in doc["mandatory"]})

    def groups_of(kind):
        return tuple(FeatureGroup.make(g["parent"], g["children"], kind)
                     for g in doc["groups"][kind])

    placement = Placement({a["name"]: a["place"] for a in doc["attributes"]
                           if a["place"] is not None})
    rc = [parse_constraint(text) for text in doc["constraints"]]

    phi = None
    if doc.get("phi") is not None:
        rows_doc = [tuple(r) for r in doc["phi"]["rows"]]
        expect_rows = [reduced.row(k) for k in range(reduced.n_rows)]
        phi = ResidualConstraint(reduced)
        if rows_doc != expect_rows:
            # Serialized rows win: rebuild a matching matrix-backed constraint.
            from .matrix import matrix_from_codes
            names = doc["phi"]["variables"]
            cols = list(zip(*rows_doc))
            values, codes = [], []
            for cells in cols:
                vs, idx = [], {}
                row_codes = []
                for v in cells:
                    if v not in idx:
                        idx[v] = len(vs)
                        vs.append(v)
                    row_codes.append(idx[v])
                values.append(vs)
                codes.append(row_codes)
            numeric = [all(isinstance(v, int) for v in vs) for vs in values]
            phi = ResidualConstraint(matrix_from_codes(names, numeric, values, codes))

    return AttributedFeatureModel(vm, hierarchy, mandatory,
                                  groups_of("mutex"), groups_of("xor"), groups_of("or"),
                                  placement, rc, phi, doc.get("provenance", {}))


def render_text(m: AttributedFeatureModel) -> str:
    """Human-readable indented tree plus groups, constraints, and phi note."""
    h = m.hierarchy
    attrs_at = {}
    for a in m.vm.attributes:
        host = m.placement.alpha.get(a.name)
        attrs_at.setdefault(host, []).append(a)
    group_at = {}
    for g in m.groups:
        group_at.setdefault(g.parent, []).append(g)

    lines = []

    def describe(f):
        tags = []
        if (f, h.parent.get(f)) in m.mandatory.edges:
            tags.append("mandatory")
        txt = f + (f"  [{', '.join(tags)}]" if tags else "")
        for a in attrs_at.get(f, ()):
            dom = ",".join(str(v) for v in a.domain.values)
            null = "" if a.domain.null_value is None else f"; null={a.domain.null_value}"
            txt += f"  {{{a.name}: {dom}{null}}}"
        return txt

    def walk(f, depth):
        lines.append("  " * depth + describe(f))
        for g in sorted(group_at.get(f, ()), key=lambda g: (g.kind, g.children)):
            lines.append("  " * (depth + 1) + f"<{g.kind}: {' | '.join(g.children)}>")
        for c in h.children(f):
            walk(c, depth + 1)

    walk(h.root, 0)
    if m.rc:
        lines.append("")
        lines.append("constraints:")
        for rc in m.rc:
            lines.append("  " + render_constraint(rc))
    lines.append("")
    if m.phi is not None:
        lines.append(f"phi: disjunction over {m.phi.n_disjuncts} configurations")
    else:
        lines.append("phi: omitted (diagram-only, over-approximate)")
    return "\n".join(lines) + "\n"
