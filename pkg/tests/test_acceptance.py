"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Tolerances and corpus sizes are pinned here, not configurable.
"""

import time

import numpy as np
from click.testing import CliRunner

from afm_forge.audit import audit_maximality
from afm_forge.cli import main as cli_main
from afm_forge.constraints import render_constraint
from afm_forge.implications import bi_comprehensive, bi_valid, compute_binary_implications
from afm_forge.knowledge import DefaultProvider, DomainKnowledge
from afm_forge.labkit import (
    GeneratorParams,
    derive_seed,
    generate_matrix,
    or_group_wall,
    run_benchmark,
)
from afm_forge.pipeline import SynthesisOptions, synthesize
from afm_forge.semantics import check_semantics, eval_config, make_configuration
from afm_forge.variability import TimedOut, compute_mandatory, compute_mutex_groups, \
    compute_or_groups, compute_xor_groups
from tests.oracles import brute_mutex_groups, brute_or_groups
from afm_forge.extraction import extract_variables
from afm_forge.implications import build_graphs
from afm_forge.structure import ensure_rooted, extract_hierarchy


def report(n, ok, detail):
    print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {n}: {detail}"


def fresh_wiki(wiki_csv):
    from afm_forge.matrix import IngestionHints, parse_matrix

    return parse_matrix(wiki_csv, IngestionHints(identifier_columns={"Identifier"}))


def test_criterion_1_wiki_golden(wiki_csv, wiki_dk):
    matrix = fresh_wiki(wiki_csv)
    t0 = time.perf_counter()
    m = synthesize(matrix, DefaultProvider(wiki_dk))
    elapsed = time.perf_counter() - t0

    ok = m.hierarchy.parent == {
        "LanguageSupport": "Wiki engine",
        "LicenseType": "Wiki engine",
        "WYSIWYG": "Wiki engine",
        "GPL": "LicenseType",
        "Commercial": "LicenseType",
        "NoLimit": "LicenseType",
    }
    ok &= m.mandatory.edges == {("LicenseType", "Wiki engine")}
    ok &= [(g.parent, set(g.children)) for g in m.g_xor] == \
        [("LicenseType", {"GPL", "Commercial", "NoLimit"})]
    ok &= m.placement.alpha == {"Language": "LanguageSupport",
                                "LicensePrice": "LicenseType"}
    rc = {render_constraint(c) for c in m.rc}
    ok &= {"GPL => LicensePrice <= 10", "Commercial => LicensePrice = 10",
           "NoLimit => !LanguageSupport"} <= rc
    ok &= elapsed < 1.0
    report(1, ok, f"wiki golden model, structural equality, {elapsed * 1000:.0f} ms")


def test_criterion_2_soundness_completeness(wiki_csv, wiki_dk):
    t0 = time.perf_counter()
    wiki = synthesize(fresh_wiki(wiki_csv), DefaultProvider(wiki_dk))
    rep = check_semantics(wiki, wiki.vm.matrix)
    checked, ok = 1, rep.sound and rep.complete
    for i in range(100):
        seed = derive_seed("c2", i)
        rng = np.random.default_rng(seed)
        p = GeneratorParams(int(rng.integers(2, 9)), int(rng.integers(2, 17)),
                            int(rng.integers(2, 5)), seed=seed)
        matrix = generate_matrix(p)
        model = synthesize(matrix, DefaultProvider(DomainKnowledge()))
        rep = check_semantics(model, matrix)
        ok &= rep.sound and rep.complete
        checked += 1
        if not ok:
            break
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60.0
    report(2, ok, f"sound and complete on {checked} models (wiki + random), "
                  f"{elapsed:.1f} s")


def test_criterion_3_over_approximation(wiki_csv, wiki_dk):
    diagram = synthesize(fresh_wiki(wiki_csv), DefaultProvider(wiki_dk),
                         SynthesisOptions(phi=False))
    extra1 = make_configuration(
        {"Wiki engine", "LicenseType", "GPL", "LanguageSupport", "WYSIWYG"},
        {"Language": "PHP", "LicensePrice": 0})
    extra2 = make_configuration(
        {"Wiki engine", "LicenseType", "GPL", "LanguageSupport"},
        {"Language": "PHP", "LicensePrice": 10})
    rep = check_semantics(diagram, diagram.vm.matrix)
    ok = eval_config(diagram, extra1) and eval_config(diagram, extra2) and rep.complete
    report(3, ok, "diagram without the residual constraint admits both "
                  "over-approximation rows and stays complete")


def test_criterion_4_bi_properties():
    t0 = time.perf_counter()
    ok, n = True, 0
    for i in range(1000):
        seed = derive_seed("c4", i)
        rng = np.random.default_rng(seed)
        p = GeneratorParams(int(rng.integers(2, 11)), int(rng.integers(2, 51)),
                            int(rng.integers(2, 7)), seed=seed)
        matrix = generate_matrix(p)
        bi = compute_binary_implications(matrix)
        expect = sum(c.domain_size for c in matrix.columns) * (matrix.n_cols - 1)
        ok &= bi_valid(bi, matrix)
        ok &= bi_comprehensive(bi, matrix)
        ok &= len(bi) == expect == len(bi.to_dict())
        n += 1
        if not ok:
            break
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120.0
    report(4, ok, f"validity, comprehensiveness, count on {n} matrices, {elapsed:.1f} s")


def test_criterion_5_group_oracles():
    ok, n, xor_checked = True, 0, 0
    for i in range(200):
        seed = derive_seed("c5", i)
        rng = np.random.default_rng(seed)
        # feature-only matrices keep the feature count at most 10
        from tests.oracles import bool_dk, build_bool_matrix

        nf = int(rng.integers(3, 10))
        rows = [tuple(int(x) for x in rng.integers(0, 2, nf))
                for _ in range(int(rng.integers(3, 16)))]
        names = [f"F{k}" for k in range(nf)]
        matrix = build_bool_matrix(rows, names)
        dk = bool_dk(names)
        vm = extract_variables(matrix, dk)
        bi = compute_binary_implications(vm.matrix)
        big, mutex = build_graphs(vm, bi)
        big, vm = ensure_rooted(big, dk, vm)
        h = extract_hierarchy(big, DefaultProvider(dk))
        em = compute_mandatory(h, big)

        mtx = compute_mutex_groups(mutex, h, em)
        ok &= {(g.parent, g.children) for g in mtx} == brute_mutex_groups(vm, h, em)

        ors = compute_or_groups(vm.matrix, vm, h, em, budget_ms=30_000)
        ok &= not isinstance(ors, TimedOut)
        ok &= {(g.parent, g.children) for g in ors} == brute_or_groups(vm, h, em)

        mode_a = {(g.parent, g.children)
                  for g in compute_xor_groups(mtx, ors, vm.matrix, vm, h)}
        mode_b = {(g.parent, g.children)
                  for g in compute_xor_groups(mtx, None, vm.matrix, vm, h)}
        ok &= mode_a == mode_b
        xor_checked += len(mode_a)
        n += 1
        if not ok:
            break
    report(5, ok, f"mutex/or groups equal brute force on {n} matrices; "
                  f"xor modes agree ({xor_checked} groups)")


def test_criterion_6_maximality(wiki_csv, wiki_dk):
    wiki = synthesize(fresh_wiki(wiki_csv), DefaultProvider(wiki_dk))
    rep = audit_maximality(wiki, wiki.vm.matrix)
    ok = rep.ok
    exercised = {"mandatory": 0, "groups": 0, "promote": 0, "constraints": 0}
    n = 1
    for i in range(100):
        seed = derive_seed("c6", i)
        rng = np.random.default_rng(seed)
        p = GeneratorParams(int(rng.integers(2, 7)), int(rng.integers(2, 13)),
                            int(rng.integers(2, 4)), seed=seed)
        matrix = generate_matrix(p)
        model = synthesize(matrix, DefaultProvider(DomainKnowledge()))
        rep = audit_maximality(model, matrix)
        ok &= rep.ok
        for k in exercised:
            exercised[k] += rep.counts.get(k, 0)
        n += 1
        if not ok:
            break
    ok &= all(v > 0 for v in exercised.values())
    report(6, ok, f"zero violations on {n} models; candidate mutations "
                  f"evaluated per class: {exercised}")


def test_criterion_7_scaling_trends():
    t0 = time.perf_counter()
    rep_c = run_benchmark("c", [500, 1000, 2000, 4000, 8000], {"v": 50, "d": 10},
                          reps=3, base_seed=71)
    t_c = time.perf_counter() - t0
    r_c = rep_c.fit_for("time-vs-c")["r"]

    t0 = time.perf_counter()
    rep_v = run_benchmark("v", [50, 100, 200, 400], {"c": 1000, "d": 10},
                          reps=3, base_seed=72)
    t_v = time.perf_counter() - t0
    r_v = rep_v.fit_for("sqrt-time-vs-v")["r"]

    t0 = time.perf_counter()
    rep_d = run_benchmark("d", [5, 10, 50, 100, 500], {"v": 10, "c": 5000},
                          reps=3, base_seed=73)
    t_d = time.perf_counter() - t0
    r_d = rep_d.fit_for("sqrt-time-vs-d")["r"]

    ok = r_c >= 0.95 and r_v >= 0.90 and r_d >= 0.85
    ok &= t_c < 600 and t_v < 600 and t_d < 600
    report(7, ok, f"time~c r={r_c:.3f} (>=0.95, {t_c:.0f}s); "
                  f"sqrt(time)~v r={r_v:.3f} (>=0.90, {t_v:.0f}s); "
                  f"sqrt(time)~d_eff r={r_d:.3f} (>=0.85, {t_d:.0f}s)")


def test_criterion_8_or_group_wall():
    rates = or_group_wall([5, 60], c=1000, d=10, budget_ms=10_000,
                          reps=5, base_seed=81)
    ok = rates[5] == 0.0 and rates[60] >= 0.8
    report(8, ok, f"or-group timeout rate: v=5 -> {rates[5]:.0%}, "
                  f"v=60 -> {rates[60]:.0%} (10 s budget)")


def test_criterion_9_phase_dominance():
    ratios = []
    for rep in range(3):
        matrix = generate_matrix(GeneratorParams(100, 1000, 10,
                                                 seed=derive_seed("c9", rep)))
        model = synthesize(matrix, DefaultProvider(DomainKnowledge()))
        t = model.timings
        total = sum(v for k, v in t.items() if k != "rc_complex")
        ratios.append((t["binary_implications"] + t["rc_complex"]) / total)
    ratio = float(np.median(ratios))
    ok = ratio >= 0.5
    report(9, ok, f"binary implications + complex constraints take "
                  f"{ratio:.0%} of synthesis time at v=100, c=1000, d=10")


def test_criterion_10_determinism(tmp_path):
    runner = CliRunner()
    ok, n = True, 0
    for seed in range(20):
        mpath = tmp_path / f"m{seed}.csv"
        r = runner.invoke(cli_main, ["gen", "-v", "6", "-c", "12", "-d", "3",
                                     "--seed", str(seed), "-o", str(mpath)])
        assert r.exit_code == 0
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"m{seed}.{run}.json"
            r = runner.invoke(cli_main, ["synth", str(mpath), "-o", str(out)])
            assert r.exit_code == 0, r.output
            outs.append(out.read_bytes())
        ok &= outs[0] == outs[1]
        n += 1
        if not ok:
            break
    report(10, ok, f"byte-identical synth output across 2 runs x {n} seeds")
