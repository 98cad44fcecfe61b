"""End-to-end synthesis: matrix + decisions -> attributed feature model.

Stages run in a fixed order (extraction, binary implications, graphs,
hierarchy, placement, mandatory, groups, readable constraints, residual
constraint); the per-stage wall clock lands in the returned model's
`timings` attribute, which is never serialized so outputs stay byte-stable.
Provenance records every decision, the resolved bounds, discarded group
candidates, and a digest per stage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .constraints import compute_complex, compute_excludes, compute_phi, compute_requires
from .errors import IllegalRoot
from .extraction import extract_variables
from .implications import build_graphs, compute_binary_implications
from .knowledge import DecisionProvider, DefaultProvider, DomainKnowledge
from .matrix import ConfigurationMatrix
from .model import AttributedFeatureModel, digest
from .structure import (
    ensure_rooted,
    extract_hierarchy,
    fresh_root_name,
    legal_attribute_places,
    place_attributes,
)
from .variability import (
    TimedOut,
    compute_mandatory,
    compute_mutex_groups,
    compute_or_groups,
    compute_xor_groups,
    finalize_groups,
)


@dataclass
class SynthesisOptions:
    or_groups: bool = False
    or_budget_ms: int | None = 30_000
    phi: bool = True
    textual_eq: bool = True
    backend: str | None = None

    def to_dict(self):
        return {"or_groups": self.or_groups, "or_budget_ms": self.or_budget_ms,
                "phi": self.phi, "textual_eq": self.textual_eq}


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, frozenset):
        return sorted(_jsonable(v) for v in x)
    if hasattr(x, "children") and hasattr(x, "kind"):
        return {"kind": x.kind, "parent": x.parent, "children": list(x.children)}
    return x


class _Timer:
    def __init__(self):
        self.phases = {}

    def measure(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.phases[name] = timer.phases.get(name, 0.0) + time.perf_counter() - self.t0

        return _Ctx()


def synthesize(matrix: ConfigurationMatrix, provider: DecisionProvider | None = None,
               options: SynthesisOptions | None = None, dk: DomainKnowledge | None = None,
               progress: dict | None = None) -> AttributedFeatureModel:
    """Run the full synthesis and assemble the model.

    `provider` answers whatever the knowledge file leaves open (defaults to
    the heuristic provider).  `progress`, when given, is filled with
    intermediate state as stages complete, for interactive sessions.
    """
    options = options or SynthesisOptions()
    if provider is None:
        provider = DefaultProvider(dk or DomainKnowledge())
    progress = progress if progress is not None else {}
    t = _Timer()

    with t.measure("extraction"):
        vm = extract_variables(matrix, provider=provider)
        reduced = vm.matrix
    progress["columns"] = dict(vm.classification)
    progress["features"] = list(vm.feature_names)
    progress["attributes"] = list(vm.attribute_names)

    with t.measure("binary_implications"):
        bi = compute_binary_implications(reduced, backend=options.backend)

    with t.measure("graphs"):
        big, mutex = build_graphs(vm, bi)
    progress["big_edges"] = sorted(big.edges)
    progress["mutex_edges"] = sorted(sorted(e) for e in mutex.edges)

    with t.measure("hierarchy"):
        root_name = provider.dk.root_name
        if root_name is None:
            candidates = [fresh_root_name(big)] + sorted(big.always_selected)
            root_name = provider.choose_root(candidates)
            if root_name not in candidates:
                raise IllegalRoot(f"{root_name!r} is not among the root candidates")
        big, vm = ensure_rooted(big, root_name, vm)
        progress["root"] = big.root
        progress["parents"] = {}
        h = extract_hierarchy(big, provider)
        progress["parents"] = dict(h.parent)

    with t.measure("placement"):
        legal = legal_attribute_places(bi, vm)
        placement = place_attributes(legal, provider, h)
    progress["placement"] = dict(placement.alpha)

    with t.measure("mandatory"):
        em = compute_mandatory(h, big)

    timed_out = False
    with t.measure("groups"):
        mutex_groups = compute_mutex_groups(mutex, h, em)
        or_result = None
        if options.or_groups:
            or_result = compute_or_groups(reduced, vm, h, em, options.or_budget_ms)
            if isinstance(or_result, TimedOut):
                timed_out = True
                or_result = None
        xor_groups = compute_xor_groups(mutex_groups, or_result, reduced, vm, h)
        g_mtx, g_xor, g_or, discarded = finalize_groups(
            mutex_groups, or_result if or_result is not None else [], xor_groups, provider)
    progress["groups"] = _jsonable(list(g_mtx + g_xor + g_or))

    with t.measure("rc"):
        bounds = {}
        for a in vm.attributes:
            if not (a.domain.numeric and a.domain.ordered):
                continue
            got = provider.confirm_bounds(a.name, list(a.domain.values))
            bounds[a.name] = sorted({int(k) for k in got})
        requires = compute_requires(big, h, em, vm.feature_order)
        excludes = compute_excludes(mutex, g_mtx + g_xor, vm.feature_order)
        t0 = time.perf_counter()
        complex_cs = compute_complex(bi, bounds, vm, textual_eq=options.textual_eq)
        t.phases["rc_complex"] = time.perf_counter() - t0
        rc = requires + excludes + complex_cs

    phi = None
    with t.measure("phi"):
        if options.phi:
            phi = compute_phi(reduced)

    # Stage records chain a digest: each stage's input hash covers the matrix
    # plus every summary before it, so provenance pins the whole lineage.
    stage_list = []
    running = digest(reduced.to_csv_text())
    for name, summary in [
        ("extraction", {"features": len(vm.features) - (1 if vm.root_name else 0),
                        "attributes": len(vm.attributes),
                        "dropped": len(vm.dropped_features)}),
        ("binary_implications", {"entries": len(bi)}),
        ("graphs", {"big_edges": len(big.edges), "mutex_edges": len(mutex.edges)}),
        ("hierarchy", {"edges": len(h.parent)}),
        ("placement", {"placed": len(placement.alpha)}),
        ("mandatory", {"edges": len(em.edges)}),
        ("groups", {"mutex": len(g_mtx), "xor": len(g_xor), "or": len(g_or)}),
        ("rc", {"requires": len(requires), "excludes": len(excludes),
                "complex": len(complex_cs)}),
        ("phi", {"disjuncts": phi.n_disjuncts if phi else 0}),
    ]:
        stage_list.append({"name": name, "input_sha256": running, "summary": summary})
        running = digest(running + repr(sorted(summary.items())))

    provenance = {
        "matrix_sha256": digest(reduced.to_csv_text()),
        "duplicates_dropped": reduced.duplicates_dropped,
        "options": options.to_dict(),
        "root": big.root,
        "bounds": bounds,
        "or_groups_timed_out": timed_out,
        "decisions": [
            {"kind": k, "subject": s, "candidates": _jsonable(c), "answer": _jsonable(a)}
            for k, s, c, a in provider.transcript
        ],
        "discarded_groups": _jsonable(discarded),
        "stages": stage_list,
    }

    model = AttributedFeatureModel(vm, h, em, g_mtx, g_xor, g_or, placement, rc,
                                   phi, provenance)
    model.timings = dict(t.phases)
    return model
