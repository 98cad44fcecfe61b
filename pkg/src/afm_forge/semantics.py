"""Configuration semantics: evaluation, enumeration, and the maximality audit.

A configuration is a set of selected features plus a value for every
attribute (None standing for the out-of-band null of an attribute whose host
is deselected and whose null value never occurs in the matrix).  Everything
here is desk-scale and explicit: enumeration backtracks over the hierarchy
with group-aware pruning, and the audit re-checks candidate mutations against
the matrix rows and the enumerated diagram semantics.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import FeatureTerm, RelTerm
from .errors import BudgetExceeded, UnknownVariable
from .extraction import VariableModel
from .matrix import ConfigurationMatrix
from .model import AttributedFeatureModel
from .variability import MUTEX, OR, XOR

DEFAULT_BUDGET = 1_000_000


@dataclass(frozen=True)
class Configuration:
    selected: frozenset
    values: tuple  # ((attribute, value), ...) sorted by attribute name

    @property
    def value_map(self) -> dict:
        return dict(self.values)

    def __repr__(self):
        sel = ",".join(sorted(self.selected))
        vals = ",".join(f"{a}={v}" for a, v in self.values)
        return f"<cfg {{{sel}}} {vals}>"


def make_configuration(selected, values: dict) -> Configuration:
    return Configuration(frozenset(selected), tuple(sorted(values.items())))


def row_configuration(vm: VariableModel, k: int) -> Configuration:
    """The configuration a matrix row denotes, under the presence predicates."""
    selected = set(vm.row_selected(k))
    if vm.root_name is not None:
        selected.add(vm.root_name)
    return make_configuration(selected, vm.row_values(k))


def matrix_configurations(model: AttributedFeatureModel,
                          matrix: ConfigurationMatrix | None = None) -> list:
    vm = model.vm
    return [row_configuration(vm, k) for k in range(vm.matrix.n_rows)]


def _rel_holds(term: RelTerm, value, domain) -> bool:
    if value is None:
        return False
    if term.op == "=":
        return value == term.literal
    if not isinstance(value, int) or not isinstance(term.literal, int):
        return False
    if term.op == "<=":
        return value <= term.literal
    if term.op == ">=":
        return value >= term.literal
    if term.op == "<":
        return value < term.literal
    return value > term.literal


def _phi_matches(model: AttributedFeatureModel, cfg: Configuration) -> bool:
    vm = model.vm
    phi = model.phi
    by_col = {}
    for f in vm.features:
        if f.column is not None:
            by_col.setdefault(vm.matrix.columns[f.column].name, []).append(f)
    attr_col = {vm.matrix.columns[a.column].name: a.name for a in vm.attributes}
    values = cfg.value_map
    for disjunct in phi:
        ok = True
        for var, cell in disjunct:
            if var in attr_col:
                if values.get(attr_col[var]) != cell:
                    ok = False
                    break
            elif var in by_col:
                for f in by_col[var]:
                    code = vm.matrix.columns[f.column].code_of(cell)
                    present = bool(f.presence_mask[code]) if code is not None else False
                    if (f.name in cfg.selected) != present:
                        ok = False
                        break
                if not ok:
                    break
            # columns carrying neither features nor attributes are inert
        if ok:
            return True
    return False


def eval_config(model: AttributedFeatureModel, cfg: Configuration) -> bool:
    """Membership test: does the configuration satisfy the model."""
    vm = model.vm
    feats = set(vm.feature_names)
    for f in cfg.selected:
        if f not in feats:
            raise UnknownVariable(f"unknown feature {f!r}")
    values = cfg.value_map
    for a in values:
        if a not in vm.by_attribute:
            raise UnknownVariable(f"unknown attribute {a!r}")
    for a in vm.attribute_names:
        if a not in values:
            raise UnknownVariable(f"attribute {a!r} has no value")

    h = model.hierarchy
    if h.root not in cfg.selected:
        return False
    for c, p in h.parent.items():
        if c in cfg.selected and p not in cfg.selected:
            return False
    for c, p in model.mandatory.edges:
        if p in cfg.selected and c not in cfg.selected:
            return False
    for g in model.groups:
        if g.parent not in cfg.selected:
            continue
        n = sum(1 for c in g.children if c in cfg.selected)
        if g.kind == MUTEX and n > 1:
            return False
        if g.kind == OR and n < 1:
            return False
        if g.kind == XOR and n != 1:
            return False
    for a in vm.attributes:
        host = model.placement.alpha.get(a.name)
        v = values[a.name]
        if host is not None and host not in cfg.selected:
            if v != a.domain.null_value:
                return False
        else:
            if v not in a.domain.values and v != a.domain.null_value:
                return False
    for rc in model.rc:
        if _factor(model, rc.left, cfg) and not _factor(model, rc.right, cfg):
            return False
    if model.phi is not None and not _phi_matches(model, cfg):
        return False
    return True


def _factor(model, term, cfg) -> bool:
    if isinstance(term, FeatureTerm):
        sel = term.name in cfg.selected
        return not sel if term.negated else sel
    a = model.vm.by_attribute.get(term.attribute)
    if a is None:
        raise UnknownVariable(f"unknown attribute {term.attribute!r}")
    return _rel_holds(term, cfg.value_map.get(term.attribute), a.domain)


def enumerate_configurations(model: AttributedFeatureModel,
                             budget: int = DEFAULT_BUDGET) -> set:
    """Exhaustive backtracking enumeration of the model's configurations."""
    vm = model.vm
    h = model.hierarchy
    order = h.preorder()
    pos = {f: i for i, f in enumerate(order)}
    mandatory = model.mandatory.edges
    n = len(order)

    group_trigger = {}
    for g in model.groups:
        t = max(pos[c] for c in g.children)
        group_trigger.setdefault(t, []).append(g)

    feat_rcs = [rc for rc in model.rc
                if isinstance(rc.left, FeatureTerm) and isinstance(rc.right, FeatureTerm)]
    rc_trigger = {}
    for rc in feat_rcs:
        t = max(pos[rc.left.name], pos[rc.right.name])
        rc_trigger.setdefault(t, []).append(rc)

    attrs = vm.attributes
    mixed_rcs = [rc for rc in model.rc if rc not in feat_rcs]
    attr_pos = {a.name: i for i, a in enumerate(attrs)}

    def rc_attr_trigger(rc):
        t = -1
        for term in (rc.left, rc.right):
            if isinstance(term, RelTerm):
                t = max(t, attr_pos[term.attribute])
        return t

    attr_rc_trigger = {}
    for rc in mixed_rcs:
        attr_rc_trigger.setdefault(rc_attr_trigger(rc), []).append(rc)

    counter = [0]
    results = set()
    sel = {}

    def tick():
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded(f"enumeration exceeded {budget} nodes")

    def term_true(term, values):
        if isinstance(term, FeatureTerm):
            s = sel[term.name]
            return not s if term.negated else s
        return _rel_holds(term, values.get(term.attribute),
                          vm.by_attribute[term.attribute].domain)

    def assign_attrs(i, values):
        tick()
        if i == len(attrs):
            cfg = make_configuration((f for f in order if sel[f]), values)
            if model.phi is None or _phi_matches(model, cfg):
                results.add(cfg)
            return
        a = attrs[i]
        host = model.placement.alpha.get(a.name)
        if host is not None and not sel[host]:
            choices = [a.domain.null_value]
        else:
            choices = list(a.domain.values)
        for v in choices:
            values[a.name] = v
            ok = all(not term_true(rc.left, values) or term_true(rc.right, values)
                     for rc in attr_rc_trigger.get(i, ()))
            if ok:
                assign_attrs(i + 1, values)
        del values[a.name]

    def assign_features(i):
        tick()
        if i == n:
            assign_attrs(0, {})
            return
        f = order[i]
        if i == 0:
            options = (True,)
        else:
            p = h.parent[f]
            if not sel[p]:
                options = (False,)
            elif (f, p) in mandatory:
                options = (True,)
            else:
                options = (False, True)
        for choice in options:
            sel[f] = choice
            ok = True
            for g in group_trigger.get(i, ()):
                if not sel[g.parent]:
                    continue
                k = sum(1 for c in g.children if sel[c])
                if (g.kind == MUTEX and k > 1) or (g.kind == OR and k < 1) \
                        or (g.kind == XOR and k != 1):
                    ok = False
                    break
            if ok:
                for rc in rc_trigger.get(i, ()):
                    if term_true(rc.left, {}) and not term_true(rc.right, {}):
                        ok = False
                        break
            if ok:
                assign_features(i + 1)
        del sel[f]

    assign_features(0)
    return results


@dataclass
class SemanticsReport:
    sound: bool
    complete: bool
    extra: list
    missing: list

    def summary(self) -> str:
        return (f"sound={str(self.sound).lower()} complete={str(self.complete).lower()} "
                f"extra={len(self.extra)} missing={len(self.missing)}")


def check_semantics(model: AttributedFeatureModel, matrix: ConfigurationMatrix,
                    budget: int = DEFAULT_BUDGET) -> SemanticsReport:
    """Compare the model's configuration set with the matrix rows."""
    rows = set(matrix_configurations(model, matrix))
    enum = enumerate_configurations(model, budget)
    extra = sorted(enum - rows, key=repr)
    missing = sorted(rows - enum, key=repr)
    return SemanticsReport(not extra, not missing, extra, missing)


def afm_equivalent(m1: AttributedFeatureModel, m2: AttributedFeatureModel,
                   budget: int = DEFAULT_BUDGET) -> bool:
    """Same configuration set and structurally equal diagrams."""
    from .model import to_dict

    d1, d2 = to_dict(m1), to_dict(m2)
    for key in ("provenance", "phi"):
        d1.pop(key, None)
        d2.pop(key, None)
    if d1 != d2:
        return False
    return enumerate_configurations(m1, budget) == enumerate_configurations(m2, budget)
