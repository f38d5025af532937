"""Acceptance suite: one test per criterion, each reporting PASS/FAIL."""

import time

import numpy as np

from pbsdiagrams.channels import (
    PurifiedChannel,
    fixture_pairs,
    random_channel,
    random_iso_pair,
    s1,
    s2,
    t1,
)
from pbsdiagrams.diagram import ContextClass, Neg, Pbs, classify_context, congruent, contains
from pbsdiagrams.dsl import parse
from pbsdiagrams.equiv import (
    check_iso_witness,
    criteria,
    equiv,
    iso_refute_moments,
    plug,
    sample_context,
    REQUIRED_CLASS,
)
from pbsdiagrams.linalg import (
    QUTRIT_SHIFT,
    QUTRIT_SIGN,
    PAULI_Z,
    max_abs_diff,
    partial_trace_last,
    random_unitary,
)
from pbsdiagrams.pathsem import Pol, check_occurrence_bounds, is_bijective, path_table
from pbsdiagrams.qsem import semantics_choi
from pbsdiagrams.synth import WordFamily, check_admissible, synthesize

from axioms import AXIOMS, wrapped
from conftest import rand_assignment, rand_term

ABAB_LOOP = "tr((id + gate[a]) ; (id + neg) ; (id + gate[b]) ; pbs)"
ABAB = {(Pol.V, 0): ("a", "b", "a", "b"), (Pol.H, 0): ()}


def _table_words(table):
    return {k: (r.word, r.out_pol, r.out_pos) for k, r in table.items()}


def test_ac1_abab_golden(report):
    start = time.perf_counter()
    left = parse(ABAB_LOOP)
    right = synthesize(WordFamily.from_dict(1, {("V", 0): "abab", ("H", 0): "-"}))
    expected = {k: (w, k[0], k[1]) for k, w in ABAB.items()}
    ok_left = _table_words(path_table(left)) == expected
    ok_right = _table_words(path_table(right)) == expected
    distinct = not congruent(left, right)
    elapsed = time.perf_counter() - start
    ok = ok_left and ok_right and distinct and elapsed < 1.0
    report("AC1", ok, f"tables {ok_left}/{ok_right}, distinct {distinct}, {elapsed:.3f}s")
    assert ok


def test_ac2_bijection_suite(report):
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    failures = 0
    for _ in range(500):
        n = int(rng.integers(1, 5))
        d = rand_term(rng, n, "g", 5, max_depth=5)
        table = path_table(d)
        neg_free = not contains(d, Neg)
        if not (is_bijective(table) and check_occurrence_bounds(table, neg_free)):
            failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 10
    report("AC2", ok, f"500 diagrams, {failures} failures, {elapsed:.2f}s")
    assert ok


def _random_family(rng, neg_free):
    n = int(rng.integers(1, 4))
    slots = [(c, p) for c in (Pol.H, Pol.V) for p in range(n)]
    words = {s: [] for s in slots}
    for i in range(int(rng.integers(0, 6))):
        a = chr(ord("a") + i)
        first = slots[int(rng.integers(len(slots)))]
        chosen = [first]
        if rng.integers(2):
            pool = [s for s in slots if not (neg_free and s[0] == first[0])]
            chosen.append(pool[int(rng.integers(len(pool)))])
        for s in chosen:
            w = words[s]
            w.insert(int(rng.integers(len(w) + 1)), a)
    return WordFamily(n, {k: tuple(v) for k, v in words.items()})


def test_ac3_synthesis_roundtrip(report):
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    failures = 0
    for i in range(200):
        neg_free = i % 2 == 0
        f = _random_family(rng, neg_free)
        assert check_admissible(f) == (True, True) or not neg_free
        d = synthesize(f, neg_free=neg_free)
        table = path_table(d)
        exact = all(
            table[k].word == f.word(*k) and (table[k].out_pol, table[k].out_pos) == k
            for k in f.normalized()
        )
        if not exact or (neg_free and contains(d, Neg)):
            failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 10
    report("AC3", ok, f"200 families, {failures} failures, {elapsed:.2f}s")
    assert ok


def test_ac4_congruence_invariance(report):
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    bad = []
    worst = 0.0
    for name in AXIOMS:
        for _ in range(20):
            lhs, rhs = wrapped(name, rng)
            g = rand_assignment(lhs, rng)
            same_graph = congruent(lhs, rhs)
            same_table = _table_words(path_table(lhs)) == _table_words(path_table(rhs))
            diff = max_abs_diff(
                semantics_choi(lhs, g, 2).matrix, semantics_choi(rhs, g, 2).matrix
            )
            worst = max(worst, diff)
            if not (same_graph and same_table and diff <= 1e-9):
                bad.append(name)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    report("AC4", ok, f"12 axioms x 20, failing {sorted(set(bad))}, max choi diff {worst:.1e}, {elapsed:.2f}s")
    assert ok


def test_ac5_cptp_suite(report):
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    failures = 0
    rank_checked = 0
    for i in range(100):
        n = int(rng.integers(1, 3))
        dim_h = int(rng.integers(1, 4))
        d = rand_term(rng, n, "g", 3)
        pure = i % 4 == 0
        g = rand_assignment(d, rng, dim_h, 1 if pure else 3)
        choi = semantics_choi(d, g, dim_h)
        m = choi.matrix
        herm = max_abs_diff(m, m.conj().T) <= 1e-9
        psd = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() >= -1e-9
        tp = max_abs_diff(partial_trace_last(m, choi.in_dim, choi.out_dim), np.eye(choi.in_dim)) <= 1e-9
        ok = herm and psd and tp
        if all(ch.dim_e == 1 for ch in g.values()):
            rank_checked += 1
            ok = ok and choi.rank() == 1
        failures += not ok
    elapsed = time.perf_counter() - start
    ok = failures == 0 and rank_checked > 0 and elapsed < 60
    report("AC5", ok, f"100 diagrams, {failures} failures, {rank_checked} rank-1 checks, {elapsed:.2f}s")
    assert ok


EXPECTED_PATTERN = {
    "I_vs_minusI": {"S1": True, "T1": False},
    "IX_vs_XX": {"S1": False, "T1": True},
    "CNOT_vs_sqrtZZ_CNOT": {"T1": True, "S2": False, "T2": True},
    "IX_vs_IZX": {"T1": True, "S2": True, "T2": False},
}


def test_ac6_criteria_matrix(report):
    start = time.perf_counter()
    pairs = fixture_pairs()
    mismatches = []
    for name, expected in EXPECTED_PATTERN.items():
        got = criteria(*pairs[name], tol=1e-9)
        if any(got[c] != v for c, v in expected.items()):
            mismatches.append(name)
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 5
    report("AC6", ok, f"mismatches {mismatches}, {elapsed:.2f}s")
    assert ok


def test_ac7_witness_soundness(report):
    pairs = fixture_pairs()
    problems = []
    checked = 0
    for name in EXPECTED_PATTERN:
        a, b = pairs[name]
        for level in (0, 1, 2):
            v = equiv(level, a, b)
            if v.equivalent:
                continue
            checked += 1
            w = v.witness
            da, ga = plug(w.context, w.assignment, a)
            db, gb = plug(w.context, w.assignment, b)
            gap = max_abs_diff(semantics_choi(da, ga).matrix, semantics_choi(db, gb).matrix)
            out_a, out_b = w.outputs(a, b)
            if not (
                gap > 1e-6
                and w.separation > 1e-6
                and max_abs_diff(out_a, out_b) >= w.separation - 1e-10
                and REQUIRED_CLASS[level] in classify_context(w.context)
            ):
                problems.append((name, level))
    a, b = pairs["I_vs_minusI"]
    w = equiv(1, a, b).witness
    out_a, out_b = w.outputs(a, b)
    # rows V,0 and columns H,0 of the particle space hold T1 for this input
    block_a, block_b = out_a[2:4, 0:2], out_b[2:4, 0:2]
    t1_ok = (
        max_abs_diff(block_a - block_b, t1(a) - t1(b)) <= 1e-9
        and abs(w.separation - 2.0) <= 1e-9
    )
    ok = not problems and t1_ok and checked > 0
    report("AC7", ok, f"{checked} witnesses, problems {problems}, loop separation {w.separation:.12f}")
    assert ok


def _level_pairs(rng):
    pairs = fixture_pairs()
    iso = [random_iso_pair(2, 2, 3, rng)[:2] for _ in range(2)]
    return {
        0: [pairs[k] for k in ("I_vs_minusI", "CNOT_vs_sqrtZZ_CNOT", "IX_vs_IZX", "qutrit_X_vs_XN")],
        1: [pairs[k] for k in ("CNOT_vs_sqrtZZ_CNOT", "IX_vs_IZX", "qutrit_X_vs_XN")],
        2: [pairs["qutrit_X_vs_XN"]] + iso,
    }


def test_ac8_forward_sampling(report):
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = 0.0
    count = 0
    for level, plist in _level_pairs(rng).items():
        cls = REQUIRED_CLASS[level]
        for a, b in plist:
            assert equiv(level, a, b).equivalent
            arities = [1] * 100
            # extra wires add power to PBS-free contexts, so only C1/C2 are sampled wider
            if level > 0:
                arities += [2 + s % 2 for s in range(50)]
            for seed, n in enumerate(arities):
                ctx, g = sample_context(cls, n, 3, seed=1000 * level + seed, dim_h=a.dim_h)
                assert cls in _classes(ctx)
                da, ga = plug(ctx, g, a)
                db, gb = plug(ctx, g, b)
                diff = max_abs_diff(semantics_choi(da, ga).matrix, semantics_choi(db, gb).matrix)
                worst = max(worst, diff)
                count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 120
    report("AC8", ok, f"{count} contexts, max choi diff {worst:.1e}, {elapsed:.2f}s")
    assert ok


def _classes(ctx):
    out = {ContextClass.C2}
    if not contains(ctx, Pbs):
        out.add(ContextClass.C0)
    if not contains(ctx, Neg):
        out.add(ContextClass.C1)
    return out


def _equal_s2_pair(i, rng):
    dim_h = int(rng.integers(1, 4))
    if i % 2 == 0:
        a, b, _ = random_iso_pair(dim_h, 2, 3, rng)
        return a, b
    # shift versus shift-with-sign on a qutrit environment, controlled data unitaries
    f3 = np.array([1.0, 0.0, 0.0])
    p = np.diag([1.0, 0.0, 0.0])
    ctrl = np.kron(random_unitary(dim_h, rng), p) + np.kron(random_unitary(dim_h, rng), np.eye(3) - p)
    a = PurifiedChannel(dim_h, 3, ctrl @ np.kron(np.eye(dim_h), QUTRIT_SHIFT), f3)
    b = PurifiedChannel(dim_h, 3, ctrl @ np.kron(np.eye(dim_h), QUTRIT_SHIFT @ QUTRIT_SIGN), f3)
    return a, b


def test_ac9_s2_implies_s1(report):
    rng = np.random.default_rng(9)
    bad = 0
    for i in range(50):
        a, b = _equal_s2_pair(i, rng)
        if max_abs_diff(s2(a).matrix, s2(b).matrix) > 1e-9:
            bad += 1
        elif max_abs_diff(s1(a).matrix, s1(b).matrix) > 1e-9:
            bad += 1
    controls = 0
    for _ in range(50):
        a, b = random_channel(2, 2, rng), random_channel(2, 2, rng)
        if max_abs_diff(s2(a).matrix, s2(b).matrix) > 1e-6 and max_abs_diff(
            s1(a).matrix, s1(b).matrix
        ) > 1e-6:
            controls += 1
    ok = bad == 0 and controls == 50
    report("AC9", ok, f"50 equal-S2 pairs, {bad} violations; {controls}/50 controls differ")
    assert ok


def test_ac10_iso_and_moments(report):
    a, b = fixture_pairs()["qutrit_X_vs_XN"]
    crit = criteria(a, b, tol=1e-9)
    passes = equiv(2, a, b, tol=1e-9).equivalent and crit["T1"] and crit["S2"] and crit["T2"]
    r = iso_refute_moments(a, b, 8)
    moments_ok = (
        r.refuted
        and r.k == 3
        and abs(r.moment_a[0, 0] - 1) <= 1e-12
        and abs(r.moment_b[0, 0] + 1) <= 1e-12
    )
    trivial = PurifiedChannel(1, 1, np.eye(1), np.ones(1))
    ident2 = PurifiedChannel(1, 2, np.eye(2), np.array([1.0, 0.0]))
    zed = PurifiedChannel(1, 2, PAULI_Z, np.array([1.0, 0.0]))
    footnote_true = check_iso_witness(trivial, ident2, np.array([[1.0], [0.0]]))
    footnote_false = not check_iso_witness(ident2, zed, np.eye(2))
    ok = passes and moments_ok and footnote_true and footnote_false
    report(
        "AC10",
        ok,
        f"equiv2 {passes}, refuted at k={r.k} ({r.moment_a[0, 0].real:+.0f} vs "
        f"{r.moment_b[0, 0].real:+.0f}), footnote checks {footnote_true}/{footnote_false}",
    )
    assert ok
