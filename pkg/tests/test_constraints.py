import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from afm_forge.constraints import (
    FeatureTerm,
    ReadableConstraint,
    RelTerm,
    compute_complex,
    compute_excludes,
    compute_phi,
    compute_requires,
    expressible,
    parse_constraint,
    render_constraint,
)
from afm_forge.extraction import Domain, extract_variables
from afm_forge.implications import build_graphs, compute_binary_implications
from afm_forge.knowledge import DefaultProvider
from afm_forge.structure import ensure_rooted, extract_hierarchy
from afm_forge.variability import compute_mandatory


def wiki_stage(matrix, dk):
    vm = extract_variables(matrix, dk)
    bi = compute_binary_implications(vm.matrix)
    big, mutex = build_graphs(vm, bi)
    big, vm = ensure_rooted(big, dk, vm)
    h = extract_hierarchy(big, DefaultProvider(dk))
    em = compute_mandatory(h, big)
    return vm, bi, big, mutex, h, em


def rendered(constraints):
    return [render_constraint(rc) for rc in constraints]


def test_requires_includes_commercial_language_support(wiki_matrix, wiki_dk):
    vm, bi, big, mutex, h, em = wiki_stage(wiki_matrix, wiki_dk)
    out = rendered(compute_requires(big, h, em, vm.feature_order))
    assert "Commercial => LanguageSupport" in out
    # hierarchy and inverted-mandatory edges never show up
    assert "GPL => LicenseType" not in out
    assert '"Wiki engine" => LicenseType' not in out


def test_requires_empty_when_big_covered():
    # two features that always co-occur with the root only
    from afm_forge.matrix import parse_matrix
    from afm_forge.knowledge import load_dk

    m = parse_matrix("A\nYes\nNo\n")
    dk = load_dk('{"columns": {"A": "boolean-feature"}}')
    vm, bi, big, mutex, h, em = wiki_stage(m, dk)
    assert compute_requires(big, h, em, vm.feature_order) == []


def test_excludes_orientation(wiki_matrix, wiki_dk):
    vm, bi, big, mutex, h, em = wiki_stage(wiki_matrix, wiki_dk)
    from afm_forge.variability import compute_mutex_groups, compute_xor_groups, finalize_groups

    mtx = compute_mutex_groups(mutex, h, em)
    xors = compute_xor_groups(mtx, None, wiki_matrix, vm, h)
    g_mtx, g_xor, g_or, _ = finalize_groups(mtx, [], xors, DefaultProvider(wiki_dk))
    out = rendered(compute_excludes(mutex, g_mtx + g_xor, vm.feature_order))
    assert "NoLimit => !LanguageSupport" in out
    # group-covered mutex edges are not emitted
    assert "Commercial => !GPL" not in out and "GPL => !Commercial" not in out


def test_excludes_empty_without_mutex():
    from afm_forge.matrix import parse_matrix
    from afm_forge.knowledge import load_dk

    m = parse_matrix("A,B\nYes,Yes\nNo,No\n")
    dk = load_dk('{"columns": {"A": "boolean-feature", "B": "boolean-feature"}}')
    vm, bi, big, mutex, h, em = wiki_stage(m, dk)
    assert compute_excludes(mutex, (), vm.feature_order) == []


def test_complex_gpl_price_bound(wiki_matrix, wiki_dk):
    vm, bi, *_ = wiki_stage(wiki_matrix, wiki_dk)
    out = rendered(compute_complex(bi, {"LicensePrice": [10]}, vm))
    assert "GPL => LicensePrice <= 10" in out
    assert "Commercial => LicensePrice = 10" in out
    assert "NoLimit => LicensePrice >= 10" in out
    assert "Commercial => Language = Java" in out


def test_complex_drops_tautologies(wiki_matrix, wiki_dk):
    vm, bi, *_ = wiki_stage(wiki_matrix, wiki_dk)
    out = rendered(compute_complex(bi, {"LicensePrice": [10]}, vm))
    # WYSIWYG rows span the whole price domain: no constraint
    assert not any(c.startswith("WYSIWYG => LicensePrice") for c in out)


def test_complex_attribute_to_attribute(wiki_matrix, wiki_dk):
    vm, bi, *_ = wiki_stage(wiki_matrix, wiki_dk)
    out = rendered(compute_complex(bi, {"LicensePrice": [10]}, vm))
    # the only price-20 row has no language
    assert 'LicensePrice = 20 => Language = "--"' in out


def test_complex_without_textual_equality(wiki_matrix, wiki_dk):
    vm, bi, *_ = wiki_stage(wiki_matrix, wiki_dk)
    out = rendered(compute_complex(bi, {"LicensePrice": [10]}, vm, textual_eq=False))
    assert not any("Language" in c.split("=>")[1] for c in out)


def test_expressible_preference_order():
    d = Domain((0, 10, 20), None, True, {0: 0, 10: 10, 20: 20})
    assert expressible(np.array([True, False, False]), d, True) == ("=", 0)
    assert expressible(np.array([True, True, False]), d, True) == ("<=", 10)
    assert expressible(np.array([False, True, True]), d, True) == (">=", 10)
    assert expressible(np.array([True, False, True]), d, True) is None
    assert expressible(np.array([True, True, True]), d, True) is None


def test_phi_shape(wiki_matrix):
    phi = compute_phi(wiki_matrix)
    assert phi.n_disjuncts == 8
    assert all(len(d) == 5 for d in phi)


def test_phi_single_cell():
    from afm_forge.matrix import parse_matrix

    phi = compute_phi(parse_matrix("A\nx\n"))
    assert phi.n_disjuncts == 1
    assert phi.disjunct(0) == [("A", "x")]


def test_phi_true_on_every_row(wiki_matrix):
    phi = compute_phi(wiki_matrix)
    for k in range(wiki_matrix.n_rows):
        assignment = dict(zip(wiki_matrix.variables, wiki_matrix.row(k)))
        assert phi.satisfied_by(assignment)
    assert not phi.satisfied_by({v: "??" for v in wiki_matrix.variables})


def test_render_examples():
    assert render_constraint(ReadableConstraint(
        FeatureTerm("NoLimit"), FeatureTerm("LanguageSupport", negated=True))) \
        == "NoLimit => !LanguageSupport"
    assert render_constraint(ReadableConstraint(
        FeatureTerm("Commercial"), RelTerm("LicensePrice", "=", 10))) \
        == "Commercial => LicensePrice = 10"
    assert render_constraint(ReadableConstraint(
        FeatureTerm("GPL"), FeatureTerm("Wiki engine"))) == 'GPL => "Wiki engine"'


_name = st.one_of(
    st.from_regex(r"[A-Za-z_][A-Za-z0-9_\-]{0,8}", fullmatch=True),
    st.text(alphabet=" abcXYZ-_.", min_size=1, max_size=8).filter(str.strip),
)
_factor = st.one_of(
    st.builds(FeatureTerm, _name, st.booleans()),
    st.builds(RelTerm, _name, st.sampled_from(["=", "<=", ">=", "<", ">"]),
              st.one_of(st.integers(0, 999), _name)),
)


@settings(max_examples=200, deadline=None)
@given(st.builds(ReadableConstraint, _factor, _factor))
def test_render_parse_round_trip(rc):
    assert parse_constraint(render_constraint(rc)) == rc
