"""Feature and attribute extraction from a classified configuration matrix.

Every non-identifier column becomes either one boolean feature, a family of
enumerated features (a parent plus one child feature per distinct non-absent
value), or one attribute with a domain.  Dead features (never selected) are
discarded.  The resulting variable model carries the presence predicate of
every feature, which is what turns raw cells into configuration semantics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import knowledge as dkmod
from .errors import (
    AmbiguousPresenceMapping,
    EmptyMatrix,
    NullValueNotInDomain,
    UnclassifiedColumn,
)
from .knowledge import (
    ATTRIBUTE,
    BOOLEAN_FEATURE,
    ENUMERATED_FEATURES,
    IDENTIFIER,
    DecisionProvider,
    DefaultProvider,
    DomainKnowledge,
)
from .matrix import ConfigurationMatrix


@dataclass
class Domain:
    """Finite value set of an attribute, with an optional order and null value.

    `null_value` is the value the attribute takes when its host feature is
    deselected; None stands for an out-of-band sentinel that never occurs in
    the matrix (legal as long as the host is never deselected).
    """

    values: tuple
    null_value: object = None
    numeric: bool = False
    rank: dict | None = None

    @property
    def ordered(self) -> bool:
        return self.rank is not None

    def rank_of(self, value):
        return self.rank.get(value) if self.rank else None


@dataclass
class Feature:
    """A boolean feature traced to a source column (None for a created root)."""

    name: str
    column: int | None
    presence_mask: np.ndarray | None  # bool over the column's domain codes
    origin: str = "boolean"           # boolean | enumerated-parent | enumerated-child | root


@dataclass
class Attribute:
    name: str
    column: int
    domain: Domain


class VariableModel:
    """Features, attributes and their trace back to matrix columns."""

    def __init__(self, matrix, features, attributes, classification,
                 identifier_columns, dropped_features):
        self.matrix = matrix
        self.features = features
        self.attributes = attributes
        self.classification = classification
        self.identifier_columns = identifier_columns
        self.dropped_features = dropped_features
        self.root_name = None
        self._index()

    def _index(self):
        self.feature_order = {f.name: i for i, f in enumerate(self.features)}
        self.attr_order = {a.name: i for i, a in enumerate(self.attributes)}
        self.by_feature = {f.name: f for f in self.features}
        self.by_attribute = {a.name: a for a in self.attributes}
        self._sel_cache = {}

    @property
    def feature_names(self):
        return [f.name for f in self.features]

    @property
    def attribute_names(self):
        return [a.name for a in self.attributes]

    def delta(self, attribute: str) -> Domain:
        return self.by_attribute[attribute].domain

    def selected_rows(self, feature: str) -> np.ndarray:
        """Boolean row vector: in which configurations is the feature selected."""
        got = self._sel_cache.get(feature)
        if got is None:
            f = self.by_feature[feature]
            if f.column is None:
                got = np.ones(self.matrix.n_rows, dtype=bool)
            else:
                got = f.presence_mask[self.matrix.columns[f.column].codes]
            self._sel_cache[feature] = got
        return got

    def always_selected(self, feature: str) -> bool:
        return bool(self.selected_rows(feature).all())

    def row_selected(self, k: int) -> frozenset:
        return frozenset(f.name for f in self.features
                         if f.column is None or f.presence_mask[self.matrix.columns[f.column].codes[k]])

    def row_values(self, k: int) -> dict:
        return {a.name: self.matrix.columns[a.column].cell(k) for a in self.attributes}

    def with_root(self, root_name: str) -> "VariableModel":
        """Return a model extended with a created root feature (order index 0)."""
        if root_name in self.by_feature:
            return self
        root = Feature(root_name, None, None, origin="root")
        vm = VariableModel(self.matrix, [root] + self.features, self.attributes,
                           self.classification, self.identifier_columns, self.dropped_features)
        vm.root_name = root_name
        return vm


def _boolean_presence(column, interp):
    mask = np.zeros(column.domain_size, dtype=bool)
    for code, value in enumerate(column.values):
        if value in interp:
            mask[code] = interp[value]
            continue
        token = str(value).strip().lower() if isinstance(value, str) else value
        if token in dkmod.PRESENT_TOKENS:
            mask[code] = True
        elif token in dkmod.ABSENT_TOKENS:
            mask[code] = False
        else:
            raise AmbiguousPresenceMapping(
                f"value {value!r} in boolean column {column.name!r} maps to neither presence nor absence")
    return mask


def _enumerated_absence(column, interp):
    absent = np.zeros(column.domain_size, dtype=bool)
    for code, value in enumerate(column.values):
        if value in interp:
            absent[code] = not interp[value]
        elif isinstance(value, str) and value.strip().lower() in dkmod.NULLISH_TOKENS:
            absent[code] = True
    return absent


def extract_variables(matrix: ConfigurationMatrix, dk=None,
                      provider: DecisionProvider | None = None) -> VariableModel:
    """Classify columns and build the variable model (step one of synthesis).

    Identifier columns are removed from the matrix; the returned model's
    `matrix` attribute is the reduced matrix every later stage works on.
    Deterministic: the same matrix and knowledge yield the same model,
    including feature order (column order, parents before children).
    """
    if provider is None:
        provider = DefaultProvider(dk if isinstance(dk, DomainKnowledge) else dk or DomainKnowledge())
    dk = provider.dk

    kinds = {}
    for col in matrix.columns:
        kind = provider.classify_column(col.name, list(col.values))
        if kind not in dkmod.COLUMN_KINDS:
            raise UnclassifiedColumn(f"column {col.name!r} got unknown kind {kind!r}")
        kinds[col.name] = kind

    identifiers = [n for n, k in kinds.items() if k == IDENTIFIER]
    reduced = matrix.drop_columns(identifiers) if identifiers else matrix
    if reduced.n_cols == 0:
        raise EmptyMatrix("all columns are identifiers")
    if identifiers:
        # Dropping identifiers can merge rows that were distinct only there.
        stacked = np.stack([c.codes for c in reduced.columns], axis=1)
        if len(np.unique(stacked, axis=0)) != reduced.n_rows:
            from .errors import DuplicateRow

            raise DuplicateRow("configurations are identical once identifier "
                               "columns are removed")

    used_names = set(reduced.variables)
    features, attributes, dropped = [], [], []

    for j, col in enumerate(reduced.columns):
        kind = kinds[col.name]
        interp = dk.interpretation_for(col.name)
        if kind == BOOLEAN_FEATURE:
            mask = _boolean_presence(col, interp)
            feat = Feature(col.name, j, mask, origin="boolean")
            if mask[col.codes].any():
                features.append(feat)
            else:
                dropped.append(col.name)
        elif kind == ENUMERATED_FEATURES:
            absent = _enumerated_absence(col, interp)
            if absent.all():
                dropped.append(col.name)
                continue
            features.append(Feature(col.name, j, ~absent, origin="enumerated-parent"))
            for code, value in enumerate(col.values):
                if absent[code]:
                    continue
                name = str(value)
                if name in used_names:
                    name = f"{col.name}:{value}"
                used_names.add(name)
                mask = np.zeros(col.domain_size, dtype=bool)
                mask[code] = True
                features.append(Feature(name, j, mask, origin="enumerated-child"))
        elif kind == ATTRIBUTE:
            null = dk.null_values.get(col.name)
            rank = None
            if col.numeric:
                rank = {v: v for v in col.values}
                if null is not None:
                    rank.setdefault(null, null)
            elif col.name in dk.value_order:
                rank = {v: i for i, v in enumerate(dk.value_order[col.name])}
            domain = Domain(tuple(col.values), null, col.numeric, rank)
            attributes.append(Attribute(col.name, j, domain))
        else:  # pragma: no cover - identifiers removed above
            continue

    vm = VariableModel(reduced, features, attributes, kinds, identifiers, dropped)

    # A host named by the knowledge file must honor the null rule: when it is
    # ever deselected, the declared null value has to occur in the column.
    for attr_name, host in dk.attribute_place.items():
        a = vm.by_attribute.get(attr_name)
        f = vm.by_feature.get(host)
        if a is None or f is None:
            continue
        null = a.domain.null_value
        if null in a.domain.values:
            continue
        if not vm.selected_rows(host).all():
            raise NullValueNotInDomain(
                f"attribute {attr_name!r} is placed under {host!r}, which is deselected in "
                f"some configuration, but its null value does not occur in the column")

    return vm
