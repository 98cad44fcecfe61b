"""Domain knowledge: the parametrization that resolves every synthesis choice.

Knowledge arrives either as a declarative JSON document (see `load_dk`) or
interactively through a `DecisionProvider`.  A provider answers five kinds of
question; anything the knowledge file pins down is answered from the file,
anything else falls back to the provider's strategy (fixed heuristics for the
default provider, a recorded transcript for replay, a pending-question signal
for interactive sessions).

JSON schema, by top-level key:

    columns            {column-name: kind} with kind one of
                       "identifier" | "boolean-feature" | "enumerated-features"
                       | "attribute"
    cells              global cell interpretation {token: "present"|"absent"},
                       overridable per column via {"column": {...}} entries in
                       "column_cells"
    root               root feature name (may name a feature that is not a
                       column; a fresh root is created then)
    hierarchy          {child-feature: parent-feature}
    attributes         {attribute: {"null": value, "order": [values...]}}
    placements         {attribute: feature}
    groups             [[member, ...], ...] in preference order, used to pick
                       among overlapping candidate groups
    interesting_values {attribute: [natural, ...]} bounds for constraint
                       synthesis
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SchemaError
from .matrix import is_natural

IDENTIFIER = "identifier"
BOOLEAN_FEATURE = "boolean-feature"
ENUMERATED_FEATURES = "enumerated-features"
ATTRIBUTE = "attribute"

COLUMN_KINDS = (IDENTIFIER, BOOLEAN_FEATURE, ENUMERATED_FEATURES, ATTRIBUTE)

# Default cell vocabulary for boolean columns.
PRESENT_TOKENS = {"yes", "true", "y", "1", 1}
ABSENT_TOKENS = {"no", "false", "n", "0", 0, "--", "-", "none", "n/a"}

# Values treated as "no feature here" in enumerated columns.
NULLISH_TOKENS = {"--", "-", "none", "n/a"}


@dataclass
class DomainKnowledge:
    column_kinds: dict = field(default_factory=dict)
    cell_interpretation: dict = field(default_factory=dict)   # value -> True/False
    column_cells: dict = field(default_factory=dict)          # column -> {value: bool}
    root_name: str | None = None
    parent_choice: dict = field(default_factory=dict)
    null_values: dict = field(default_factory=dict)
    value_order: dict = field(default_factory=dict)           # attribute -> [values]
    attribute_place: dict = field(default_factory=dict)
    group_choice: list = field(default_factory=list)          # [frozenset(children), ...]
    interesting_values: dict = field(default_factory=dict)    # attribute -> [naturals]

    def interpretation_for(self, column: str) -> dict:
        merged = dict(self.cell_interpretation)
        merged.update(self.column_cells.get(column, {}))
        return merged


def _expect(cond, message, path):
    if not cond:
        raise SchemaError(message, path=path)


def _coerce_cell(v):
    if isinstance(v, bool):
        raise SchemaError("cell values must be strings or naturals")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and is_natural(v):
        return int(v)
    return v


def load_dk(file_text: str) -> DomainKnowledge:
    """Parse a domain-knowledge JSON document; unspecified entries stay open."""
    import json

    try:
        doc = json.loads(file_text) if file_text.strip() else {}
    except json.JSONDecodeError as e:
        raise SchemaError(str(e), path="$") from None
    _expect(isinstance(doc, dict), "document must be an object", "$")

    dk = DomainKnowledge()
    known = {"columns", "cells", "column_cells", "root", "hierarchy", "attributes",
             "placements", "groups", "interesting_values"}
    for key in doc:
        _expect(key in known, f"unknown key {key!r}", f"$.{key}")

    cols = doc.get("columns", {})
    _expect(isinstance(cols, dict), "must be an object", "$.columns")
    for name, kind in cols.items():
        _expect(kind in COLUMN_KINDS, f"kind must be one of {COLUMN_KINDS}", f"$.columns.{name}")
        dk.column_kinds[name] = kind

    def read_cells(obj, path):
        _expect(isinstance(obj, dict), "must be an object", path)
        out = {}
        for token, meaning in obj.items():
            _expect(meaning in ("present", "absent"), 'must be "present" or "absent"',
                    f"{path}.{token}")
            out[_coerce_cell(token)] = meaning == "present"
        return out

    if "cells" in doc:
        dk.cell_interpretation = read_cells(doc["cells"], "$.cells")
    for col, obj in doc.get("column_cells", {}).items():
        dk.column_cells[col] = read_cells(obj, f"$.column_cells.{col}")

    root = doc.get("root")
    if root is not None:
        _expect(isinstance(root, str) and root.strip(), "must be a non-empty string", "$.root")
        dk.root_name = root

    hier = doc.get("hierarchy", {})
    _expect(isinstance(hier, dict), "must be an object", "$.hierarchy")
    for child, parent in hier.items():
        _expect(isinstance(parent, str), "parent must be a string", f"$.hierarchy.{child}")
        dk.parent_choice[child] = parent

    attrs = doc.get("attributes", {})
    _expect(isinstance(attrs, dict), "must be an object", "$.attributes")
    for name, spec in attrs.items():
        _expect(isinstance(spec, dict), "must be an object", f"$.attributes.{name}")
        if "null" in spec:
            dk.null_values[name] = _coerce_cell(spec["null"])
        if "order" in spec:
            order = spec["order"]
            _expect(isinstance(order, list), "must be a list", f"$.attributes.{name}.order")
            dk.value_order[name] = [_coerce_cell(v) for v in order]

    places = doc.get("placements", {})
    _expect(isinstance(places, dict), "must be an object", "$.placements")
    for attr, feat in places.items():
        _expect(isinstance(feat, str), "place must be a feature name", f"$.placements.{attr}")
        dk.attribute_place[attr] = feat

    groups = doc.get("groups", [])
    _expect(isinstance(groups, list), "must be a list of member lists", "$.groups")
    for g, members in enumerate(groups):
        _expect(isinstance(members, list) and len(members) >= 2,
                "a group needs at least two members", f"$.groups[{g}]")
        dk.group_choice.append(frozenset(members))

    iv = doc.get("interesting_values", {})
    _expect(isinstance(iv, dict), "must be an object", "$.interesting_values")
    for attr, bounds in iv.items():
        _expect(isinstance(bounds, list), "must be a list of naturals", f"$.interesting_values.{attr}")
        out = []
        for b in bounds:
            b = _coerce_cell(b)
            _expect(isinstance(b, int) and b >= 0, "bounds are natural numbers",
                    f"$.interesting_values.{attr}")
            out.append(b)
        dk.interesting_values[attr] = out

    return dk


class PendingQuestion(Exception):
    """Raised by capture providers when an answer is not available yet."""

    def __init__(self, kind, subject, candidates):
        super().__init__(f"pending {kind} question for {subject!r}")
        self.kind = kind
        self.subject = subject
        self.candidates = candidates


class DecisionProvider:
    """Answers the five synthesis decision points.

    Answers for questions covered by the knowledge file come from the file;
    `_fallback` handles the rest.  Candidate lists arrive pre-sorted by the
    caller, so strategies may simply pick the first.  Providers must be
    deterministic for a fixed question sequence; every answer is recorded in
    `transcript` as (kind, subject, candidates, answer).
    """

    def __init__(self, dk: DomainKnowledge | None = None):
        self.dk = dk or DomainKnowledge()
        self.transcript = []

    # -- decision points ----------------------------------------------------

    def classify_column(self, column: str, observed_values) -> str:
        kind = self.dk.column_kinds.get(column)
        if kind is None:
            kind = self._fallback("classify", column, list(COLUMN_KINDS),
                                  observed_values=observed_values)
        return kind

    def choose_root(self, candidates) -> str:
        # Root selection is driven by the knowledge file or the session flow;
        # it is not one of the five provider decision points.
        if self.dk.root_name is not None:
            return self.dk.root_name
        return self._fallback("root", None, candidates)

    def choose_parent(self, feature: str, candidates) -> str:
        parent = self.dk.parent_choice.get(feature)
        if parent is None:
            parent = self._fallback("parent", feature, candidates)
        return parent

    def choose_place(self, attribute: str, candidates) -> str:
        place = self.dk.attribute_place.get(attribute)
        if place is None:
            place = self._fallback("place", attribute, candidates)
        return place

    def choose_group(self, overlapping) -> list:
        preferred = self._dk_group_selection(overlapping)
        if preferred is not None:
            return preferred
        return self._fallback("group", None, overlapping)

    def confirm_bounds(self, attribute: str, domain_values) -> list:
        bounds = self.dk.interesting_values.get(attribute)
        if bounds is None:
            bounds = self._fallback("bounds", attribute, list(domain_values))
        return bounds

    # -- internals ----------------------------------------------------------

    def _dk_group_selection(self, overlapping):
        if not self.dk.group_choice:
            return None
        listed = {fs: i for i, fs in enumerate(self.dk.group_choice)}
        ranked = sorted(
            (g for g in overlapping if frozenset(g.children) in listed),
            key=lambda g: listed[frozenset(g.children)],
        )
        if not ranked:
            return None
        keep, taken = [], set()
        for g in ranked:
            if not (set(g.children) & taken):
                keep.append(g)
                taken |= set(g.children)
        # Preference honored; keep whatever else still fits so the model
        # stays maximal.
        for g in overlapping:
            if g not in keep and not (set(g.children) & taken):
                keep.append(g)
                taken |= set(g.children)
        return keep

    def _fallback(self, kind, subject, candidates, **info):
        raise NotImplementedError

    def record(self, kind, subject, candidates, answer):
        self.transcript.append((kind, subject, candidates, answer))


class DefaultProvider(DecisionProvider):
    """Fixed heuristics, so synthesis is total without human input.

    Classification: numeric columns become attributes; columns whose values
    all sit in the yes/no vocabulary become boolean features; remaining text
    columns expand into enumerated features.  Parent and place questions take
    the first candidate (callers sort candidates by descending implication
    out-degree resp. depth, ties lexicographic).  Overlapping groups are kept
    greedily in sorted order.  Bounds default to the domain median.
    """

    def _fallback(self, kind, subject, candidates, **info):
        if kind == "classify":
            answer = classify_heuristic(info["observed_values"])
        elif kind in ("parent", "place", "root"):
            answer = candidates[0]
        elif kind == "group":
            answer = greedy_nonoverlapping(candidates)
        elif kind == "bounds":
            answer = [median_bound(candidates)]
        else:  # pragma: no cover
            raise NotImplementedError(kind)
        self.record(kind, subject, candidates, answer)
        return answer


def default_provider(dk: DomainKnowledge | None = None) -> DefaultProvider:
    return DefaultProvider(dk)


class ReplayProvider(DecisionProvider):
    """Answers open questions from a recorded transcript, in order."""

    def __init__(self, dk, answers):
        super().__init__(dk)
        self._answers = list(answers)
        self._cursor = 0

    def _fallback(self, kind, subject, candidates, **info):
        if self._cursor >= len(self._answers):
            raise PendingQuestion(kind, subject, candidates)
        answer = self._answers[self._cursor]
        self._cursor += 1
        self.record(kind, subject, candidates, answer)
        return answer


def classify_heuristic(observed_values) -> str:
    values = list(observed_values)
    if all(isinstance(v, int) for v in values):
        return ATTRIBUTE
    lowered = {str(v).strip().lower() for v in values}
    if lowered <= {"yes", "no", "true", "false", "y", "n"}:
        return BOOLEAN_FEATURE
    return ENUMERATED_FEATURES


def greedy_nonoverlapping(groups) -> list:
    keep, taken = [], set()
    for g in groups:
        members = set(g.children)
        if not (members & taken):
            keep.append(g)
            taken |= members
    return keep


def median_bound(domain_values) -> int:
    naturals = sorted(v for v in domain_values if isinstance(v, int))
    return naturals[len(naturals) // 2]
