import pytest

from afm_forge.audit import audit_maximality
from afm_forge.errors import BudgetExceeded, UnknownVariable
from afm_forge.knowledge import DefaultProvider, load_dk
from afm_forge.matrix import parse_matrix
from afm_forge.pipeline import SynthesisOptions, synthesize
from afm_forge.semantics import (
    afm_equivalent,
    check_semantics,
    enumerate_configurations,
    eval_config,
    make_configuration,
    matrix_configurations,
    row_configuration,
)
from afm_forge.variability import MandatorySet


@pytest.fixture
def wiki_afm(wiki_matrix, wiki_dk):
    return synthesize(wiki_matrix, DefaultProvider(wiki_dk))


@pytest.fixture
def wiki_diagram(wiki_matrix, wiki_dk):
    return synthesize(wiki_matrix, DefaultProvider(wiki_dk), SynthesisOptions(phi=False))


def cfg(selected, **values):
    return make_configuration(selected, values)


def test_confluence_row_valid(wiki_afm):
    c = cfg({"Wiki engine", "LicenseType", "Commercial", "LanguageSupport", "WYSIWYG"},
            Language="Java", LicensePrice=10)
    assert eval_config(wiki_afm, c)


def test_all_rows_valid(wiki_afm, wiki_matrix):
    for c in matrix_configurations(wiki_afm, wiki_matrix):
        assert eval_config(wiki_afm, c)


def test_null_rule_enforced(wiki_afm):
    c = cfg({"Wiki engine", "LicenseType", "GPL", "WYSIWYG"},
            Language="PHP", LicensePrice=0)  # LanguageSupport deselected
    assert not eval_config(wiki_afm, c)


def test_table1_rows_against_diagram_and_afm(wiki_afm, wiki_diagram):
    extra1 = cfg({"Wiki engine", "LicenseType", "GPL", "LanguageSupport", "WYSIWYG"},
                 Language="PHP", LicensePrice=0)
    extra2 = cfg({"Wiki engine", "LicenseType", "GPL", "LanguageSupport"},
                 Language="PHP", LicensePrice=10)
    for c in (extra1, extra2):
        assert eval_config(wiki_diagram, c)   # admitted without the residual constraint
        assert not eval_config(wiki_afm, c)   # rejected by it


def test_unknown_variable(wiki_afm):
    with pytest.raises(UnknownVariable):
        eval_config(wiki_afm, cfg({"Wiki engine", "NotAFeature"},
                                  Language="--", LicensePrice=0))
    with pytest.raises(UnknownVariable):
        eval_config(wiki_afm, cfg({"Wiki engine"}, Language="--"))


def test_enumerate_wiki_exact(wiki_afm, wiki_matrix):
    got = enumerate_configurations(wiki_afm)
    rows = set(matrix_configurations(wiki_afm, wiki_matrix))
    assert got == rows
    assert len(got) == 8


def test_enumerate_diagram_superset(wiki_diagram, wiki_matrix):
    got = enumerate_configurations(wiki_diagram)
    rows = set(matrix_configurations(wiki_diagram, wiki_matrix))
    assert rows <= got
    assert len(got) > 8


def test_enumerate_single_mandatory_child():
    m = parse_matrix("A\nYes\n")
    dk = load_dk('{"columns": {"A": "boolean-feature"}, "root": "top"}')
    model = synthesize(m, DefaultProvider(dk))
    got = enumerate_configurations(model)
    assert got == {cfg({"top", "A"})}


def test_budget_exceeded(wiki_afm):
    with pytest.raises(BudgetExceeded):
        enumerate_configurations(wiki_afm, budget=5)


def test_check_semantics_wiki(wiki_afm, wiki_matrix):
    rep = check_semantics(wiki_afm, wiki_matrix)
    assert rep.sound and rep.complete
    assert rep.extra == [] and rep.missing == []


def test_check_semantics_diagram_only(wiki_diagram, wiki_matrix):
    rep = check_semantics(wiki_diagram, wiki_matrix)
    assert rep.complete and not rep.sound
    extra1 = cfg({"Wiki engine", "LicenseType", "GPL", "LanguageSupport", "WYSIWYG"},
                 Language="PHP", LicensePrice=0)
    extra2 = cfg({"Wiki engine", "LicenseType", "GPL", "LanguageSupport"},
                 Language="PHP", LicensePrice=10)
    assert extra1 in rep.extra and extra2 in rep.extra


def test_check_semantics_missing_row(wiki_afm, wiki_matrix, wiki_dk):
    # drop one disjunct from the residual constraint: no longer complete
    from afm_forge.constraints import ResidualConstraint

    small = parse_matrix(wiki_matrix.to_csv_text()).drop_columns([])
    pruned = ResidualConstraint(small)
    pruned._columns = [(n, v, c[:7]) for n, v, c in pruned._columns]
    pruned.n_disjuncts = 7
    broken = wiki_afm.mutated(phi=pruned)
    rep = check_semantics(broken, wiki_matrix)
    assert not rep.complete and len(rep.missing) == 1


def test_equivalence(wiki_matrix, wiki_dk, wiki_dk_alt):
    m1 = synthesize(wiki_matrix, DefaultProvider(wiki_dk))
    m1b = synthesize(wiki_matrix, DefaultProvider(wiki_dk))
    m2 = synthesize(wiki_matrix, DefaultProvider(wiki_dk_alt))
    assert afm_equivalent(m1, m1b)
    assert not afm_equivalent(m1, m2)  # same semantics, different diagrams


def test_row_configuration_roundtrip(wiki_afm, wiki_matrix):
    c = row_configuration(wiki_afm.vm, 0)
    assert c.selected == {"Wiki engine", "LicenseType", "Commercial",
                          "LanguageSupport", "WYSIWYG"}
    assert c.value_map == {"Language": "Java", "LicensePrice": 10}


# --- maximality audit ---

def test_wiki_audit_clean(wiki_afm, wiki_matrix):
    rep = audit_maximality(wiki_afm, wiki_matrix)
    assert rep.ok, rep.summary()


def test_wiki_audit_clean_with_or_groups(wiki_matrix, wiki_dk):
    m = synthesize(wiki_matrix, DefaultProvider(wiki_dk),
                   SynthesisOptions(or_groups=True, or_budget_ms=10_000))
    rep = audit_maximality(m, wiki_matrix)
    assert rep.ok, rep.summary()


def test_audit_catches_removed_mandatory(wiki_afm, wiki_matrix):
    tampered = wiki_afm.mutated(mandatory=MandatorySet(set()))
    rep = audit_maximality(tampered, wiki_matrix)
    assert not rep.ok
    assert any("LicenseType" in v and "mandatory" in v for v in rep.violations)


def test_audit_catches_removed_group(wiki_afm, wiki_matrix):
    tampered = wiki_afm.mutated(g_xor=())
    rep = audit_maximality(tampered, wiki_matrix)
    assert not rep.ok
    assert any(v.startswith("groups:") for v in rep.violations)


def test_audit_catches_demoted_xor(wiki_afm, wiki_matrix):
    from afm_forge.variability import FeatureGroup

    demoted = tuple(FeatureGroup.make(g.parent, g.children, "mutex") for g in wiki_afm.g_xor)
    tampered = wiki_afm.mutated(g_xor=(), g_mtx=demoted)
    rep = audit_maximality(tampered, wiki_matrix)
    assert not rep.ok
    assert any(v.startswith("promote:") for v in rep.violations)


def test_audit_catches_removed_constraint(wiki_afm, wiki_matrix):
    from afm_forge.constraints import render_constraint

    kept = [rc for rc in wiki_afm.rc
            if render_constraint(rc) != "Commercial => LicensePrice = 10"]
    tampered = wiki_afm.mutated(rc=kept)
    rep = audit_maximality(tampered, wiki_matrix)
    assert not rep.ok
    assert any("Commercial => LicensePrice = 10" in v for v in rep.violations)


def test_audit_ignores_redundant_constraint_removal(wiki_afm, wiki_matrix):
    # GPL => LicensePrice <= 10 is implied by GPL => LanguageSupport plus
    # LanguageSupport => LicensePrice <= 10, so dropping it changes nothing.
    from afm_forge.constraints import render_constraint

    kept = [rc for rc in wiki_afm.rc
            if render_constraint(rc) != "GPL => LicensePrice <= 10"]
    rep = audit_maximality(wiki_afm.mutated(rc=kept), wiki_matrix)
    assert rep.ok, rep.summary()
