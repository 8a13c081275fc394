"""Acceptance criteria 1-9, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL: ...`` line (also
repeated in the terminal summary) and then asserts.  Run on its own with
``python3 -m pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import io
import json
import math
import random
import time

import pytest

from baileyforge import catalog
from baileyforge import hecke_rogers as hr
from baileyforge import oracle as O
from baileyforge.bailey import (
    chain,
    pair_family_A,
    pair_family_B,
    pair_family_C,
    pair_slater_A,
    pair_slater_B,
    pair_slater_C,
    verify_bailey_pair,
    verify_conjugate_pair,
    warnaar_conjugate_pair,
)
from baileyforge.catalog import euler, identity, identity_ids, verify, verify_case
from baileyforge.cli import main
from baileyforge.qproducts import Q, Z, jacobi_triple_product_check, qpoch, warnaar_gjtp_check
from baileyforge.series import HalfExp, Monomial, QSeries, equal_up_to, eval_z_one, invert_unit, make

Z_INV_Q = Monomial(1, -1, 1)
ZQ = Monomial(1, 1, 1)

#: criterion number -> printed line; read by the terminal-summary hook in conftest
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str, capsys):
    line = f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS[n] = line
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# 1 ------------------------------------------------------------------------------

CRITERION_1_IDS = ["eq1.1-doubled", "eq1.5-H", "eq1.6-H", "eq1.9-K", "thm1.1-compact", "thm1.1-expanded",
                   "thm1.2-g2", "eq1.4-H-g2", "g3-R-relation", "R-symmetry", "rank-rearrangement-a", "rank-rearrangement-b"]


def test_criterion_1_identity_suite(capsys):
    plain = [i for i in identity_ids() if not identity(i).family]
    assert set(CRITERION_1_IDS) <= set(plain)
    failures, slowest = [], (0.0, "")
    for ident in plain:
        rep, dt = timed(lambda: verify(ident, 30))
        slowest = max(slowest, (dt, ident))
        if not rep.passed or dt >= 60:
            failures.append(rep.summary_line())
    record(1, not failures,
           f"{len(plain)} registered identities at q-order 30 (60 half-steps), exact; "
           f"slowest {slowest[1]} {slowest[0]:.2f} s (limit 60 s)" + (f"; failed: {failures}" if failures else ""),
           capsys)


# 2 ------------------------------------------------------------------------------

def test_criterion_2_infinite_families(capsys):
    failures, slowest = [], (0.0, "")
    for ident in ("thm1.3-R-family", "thm1.4-g2-family", "thm1.5-K-family"):
        for k in (2, 3):
            rep, dt = timed(lambda: verify(ident, 25, k=k))
            slowest = max(slowest, (dt, f"{ident} k={k}"))
            if not rep.passed or dt >= 300:
                failures.append(rep.summary_line())
    record(2, not failures,
           f"3 families x k in {{2,3}} at q-order 25; slowest {slowest[1]} {slowest[0]:.2f} s (limit 300 s)"
           + (f"; failed: {failures}" if failures else ""), capsys)


# 3 ------------------------------------------------------------------------------

def test_criterion_3_z1_corollaries(capsys):
    failures, slowest = [], (0.0, "")
    # route 1: direct z-free builders at order 200
    for ident in ("eq1.2-z1", "eq1.7-z1", "eq1.8-z1", "eq1.10-z1"):
        rep, dt = timed(lambda: verify(ident, 200))
        slowest = max(slowest, (dt, ident))
        if not rep.passed or dt >= 10:
            failures.append(rep.summary_line())
    # route 2: z = 1 evaluation of the two-variable sides (cheaper order; this is a cross-check)
    o = 30
    prod_1_7 = euler(o) * euler(o, 2)
    route2 = {
        "eq1.2 via z=1 of the compact rank identity": (
            eval_z_one(identity("thm1.1-compact").build("rhs", o)), euler(o) ** 2,
            eval_z_one(identity("thm1.1-compact").build("lhs", o))),
        "eq1.7 via z=1 of the H identity, halved": (
            eval_z_one(identity("eq1.5-H").build("rhs", o)), prod_1_7.scale(2),
            eval_z_one(identity("eq1.5-H").build("lhs", o))),
        "eq1.8 via z=1 of the four-step H sum, halved": (
            eval_z_one(identity("eq1.6-H").build("rhs", o)), prod_1_7.scale(2),
            eval_z_one(identity("eq1.6-H").build("lhs", o))),
        "eq1.10 via z=1 of the K identity": (
            eval_z_one(identity("eq1.9-K").build("rhs", o)), prod_1_7,
            eval_z_one(identity("eq1.9-K").build("lhs", o))),
    }
    for name, (rhs_at_1, product, lhs_at_1) in route2.items():
        if not (equal_up_to(rhs_at_1, product, o) and equal_up_to(lhs_at_1, product, o)):
            failures.append(name)
    record(3, not failures,
           f"4 corollaries at q-order 200 on the z-free path, slowest {slowest[1]} {slowest[0]:.2f} s (limit 10 s); "
           f"z=1 evaluation of the two-variable sides agrees at order {o}"
           + (f"; failed: {failures}" if failures else ""), capsys)


# 4 ------------------------------------------------------------------------------

def test_criterion_4_bailey_pairs(capsys):
    failures = []
    for make_pair in (pair_slater_A, pair_slater_B, pair_slater_C):
        rep = verify_bailey_pair(make_pair(), 12, 40)
        if not rep.passed:
            failures.append(rep.summary_line())
    for make_pair in (pair_family_A, pair_family_B, pair_family_C):
        for k in (2, 3):
            rep = verify_bailey_pair(make_pair(k), 8, 30)
            if not rep.passed:
                failures.append(rep.summary_line())
    record(4, not failures,
           "3 base pairs for n <= 12 at order 40; 3 closed-form families for k in {2,3}, n <= 8 at order 30"
           + (f"; failed: {failures}" if failures else ""), capsys)


# 5 ------------------------------------------------------------------------------

def test_criterion_5_chain_coherence(capsys):
    failures = []
    bases = {"A": (pair_slater_A, pair_family_A), "B": (pair_slater_B, pair_family_B),
             "C": (pair_slater_C, pair_family_C)}
    for which, (base, closed_form) in bases.items():
        for k in (2, 3, 4):
            it, cf = chain(base(), k - 1), closed_form(k)
            for n in range(9):
                for seq in ("alpha", "beta"):
                    a = getattr(it, seq)(n, 30)
                    b = getattr(cf, seq)(n, 30)
                    if not equal_up_to(a, b, 30):
                        failures.append(f"{which} k={k} {seq}_{n}")
    record(5, not failures,
           "chain^(k-1) of each base pair equals the closed form for k in {2,3,4}, n <= 8, order 30 "
           "(alpha and beta)" + (f"; failed: {failures}" if failures else ""), capsys)


# 6 ------------------------------------------------------------------------------

GJTP_PAIRS = [(ZQ, Z_INV_Q), (Monomial(1, 1, 2), Z_INV_Q), (Q, Monomial(1, 0, 2)),
              (Monomial(1, 2, "1/2"), Monomial(-1, -1, "3/2"))]


def test_criterion_6_conjugate_pair(capsys):
    failures = []
    for a, b in ((Z, Z_INV_Q), (Z_INV_Q, ZQ)):
        rep = verify_conjugate_pair(warnaar_conjugate_pair(a, b), 8, 30)
        if not rep.passed:
            failures.append(rep.summary_line())
    for a, b in GJTP_PAIRS:
        rep = warnaar_gjtp_check(a, b, 40)
        if not rep.passed:
            failures.append(rep.summary_line())
    rep = jacobi_triple_product_check(40)
    if not rep.passed:
        failures.append(rep.summary_line())
    record(6, not failures,
           f"conjugate pair at (z, q/z) and (q/z, zq) for n <= 8 at order 30; generalised triple product "
           f"for {len(GJTP_PAIRS)} monomial pairs at order 40; Jacobi triple product at order 40"
           + (f"; failed: {failures}" if failures else ""), capsys)


# 7 ------------------------------------------------------------------------------

def _rand_series(rng, n):
    rows = [(HalfExp(rng.randint(0, n)), {rng.randint(-3, 3): rng.randint(-5, 5)})
            for _ in range(rng.randint(0, 10))]
    return make(rows, HalfExp(n))


def _rand_unit(rng, n):
    m = rng.randint(0, 2)
    lead = Monomial(rng.choice([1, -1]), rng.randint(-2, 2), HalfExp(m))
    tail = [(HalfExp(rng.randint(m + 1, n)), {rng.randint(-2, 2): rng.randint(-4, 4)})
            for _ in range(rng.randint(0, 6))]
    return QSeries.monomial(lead, HalfExp(n)) + make(tail, HalfExp(n))


def _derived_examples():
    """(label, kernel dict, oracle dict) for every example value derived by the oracle."""
    out = []

    def add(label, kernel, dense, upto=None):
        lim = dense.n if upto is None else upto
        out.append((label, O.qseries_dict(kernel, lim), dense.to_dict(lim)))

    add("(q;q)_inf at order 6", qpoch(Q, math.inf, 6), O.oracle_euler(12))
    add("(q;q)_inf to order 10", euler(10), O.oracle_euler(20))
    for n in (20, 40):
        jtp = O.oracle_mul(O.oracle_mul(O.oracle_poch(1, 1, 0, 2, None, n), O.oracle_poch(1, -1, 2, 2, None, n)),
                           O.oracle_euler(n))
        add(f"triple product at order {n // 2}", identity("eq2.5-jtp").build("lhs", HalfExp(n)), jtp)
        add(f"triple product side at order {n // 2}", identity("eq2.5-jtp").build("rhs", HalfExp(n)), jtp)
    e60 = O.oracle_euler(60)
    add("R(1;q) = 1/(q;q)_inf to 30", eval_z_one(catalog.series_R(30)), O.oracle_invert(e60))
    add("H(1;q) to 30", eval_z_one(catalog.series_H(30)),
        O.oracle_mul(O.oracle_euler(60, 4), O.oracle_invert(O.oracle_mul(e60, e60))))
    e2 = O.oracle_euler(60, 4)
    add("K(1;q) to 30", eval_z_one(catalog.series_K(30)), O.oracle_mul(e60, O.oracle_invert(O.oracle_mul(e2, e2))))
    add("H low coefficients", catalog.series_H(8), O.oracle_H(16))
    add("K low coefficients", catalog.series_K(8), O.oracle_K(16))
    add("(1-z)g2 expansion", catalog.series_g2_cleared(8), O.oracle_g2_cleared(16))
    g3_rel = O.oracle_g3_cleared(60).shift(0, 1) + O.dense_from_terms([(0, 0, 1), (0, 1, -1)], 60)
    add("z(1-z)g3 + (1-z) = R to 30", catalog.series_R(30), g3_rel)
    add("(1-z)g3 at order 0", catalog.series_g3_cleared(0), O.oracle_g3_cleared(0))
    add("|m| <= n/2 H sum at z=1, order 20", eval_z_one(hr.double_sum(hr.h_two_step(), 20)),
        O.oracle_double_sum(O.ORACLE_SUMS["h-half"], 40).at_z_one())
    add("K sums q^0..q^3", catalog._sums(hr.k_sums(1), HalfExp.of(3)),
        O.oracle_double_sum(O.ORACLE_SUMS["k-sums(k=1)"], 6))
    add("theta corrections k=2, order 10", catalog.theta_correction_sums(10, 2), O.oracle_theta(20, 2))
    add("rank family k=2 constant term", catalog.family_lhs("A", 2, 0), O.dense_one(0))
    e120 = O.oracle_euler(120)
    add("Hecke-Rogers sum to 60", hr.double_sum(hr.z1_hecke_rogers(), 60), O.oracle_mul(e120, e120))
    hr_oracle = O.oracle_double_sum(O.ORACLE_SUMS["z1-hecke-rogers"], 120)
    out.append(("oracle Hecke-Rogers sum = oracle (q;q)^2 to 60", hr_oracle.to_dict(),
                O.oracle_mul(e120, e120).to_dict()))
    add("R z-slice 1 to order 2", catalog.series_R(2).z_slice(1),
        O.dense_from_terms([(q, 0, c) for (q, z), c in O.oracle_R(4).to_dict().items() if z == 1], 4))
    for name, specs in (("rank-compact", hr.rank_compact()), ("h-third", [hr.h_four_step()]),
                        ("g2(k=2)", hr.g2_compact(2)), ("k-sums(k=3)", hr.k_sums(3)),
                        ("rank-expanded(k=2)", hr.rank_expanded(2))):
        add(f"double sum {name} to 20", catalog._sums(specs, HalfExp.of(20)),
            O.oracle_double_sum(O.ORACLE_SUMS[name], 40))
    return out


def test_criterion_7_oracle_equivalence(capsys):
    failures = []
    rng = random.Random(7)
    n = 40  # order 20
    for i in range(100):
        a, b = _rand_series(rng, n), _rand_series(rng, n)
        if O.qseries_dict(a * b, n) != O.oracle_mul(O.from_qseries(a, z_bound=200), O.from_qseries(b, z_bound=200)).to_dict():
            failures.append(f"product {i}")
    for i in range(20):
        u = _rand_unit(rng, n)
        if O.qseries_dict(invert_unit(u)) != O.oracle_invert(O.from_qseries(u, z_bound=200)).to_dict():
            failures.append(f"inversion {i}")
    examples = _derived_examples()
    failures += [label for label, k, d in examples if k != d]
    record(7, not failures,
           f"100 random products and 20 random unit inversions at order 20 match the dense oracle; "
           f"{len(examples)} oracle-derived example values match" + (f"; failed: {failures}" if failures else ""),
           capsys)


# 8 ------------------------------------------------------------------------------

def test_criterion_8_mutation_sensitivity(capsys):
    rng = random.Random(8)
    order = HalfExp.of(12)
    failures, count = [], 0
    runs = [(ident, {"k": k}) for ident in identity_ids() if identity(ident).family for k in (2, 3)]
    runs += [(ident, {}) for ident in identity_ids() if not identity(ident).family]
    for ident, params in runs:
        case = identity(ident)
        grid = 1 if any(not case.build(s, order, **params).on_integer_grid() for s in ("lhs", "rhs")) else 2
        for side in ("lhs", "rhs"):
            for _ in range(4):
                q_steps = grid * rng.randint(0, order.steps // grid)
                z_exp = rng.randint(-4, 4)
                delta = rng.choice([-2, -1, 1, 3])
                rep = verify_case(case.perturbed(side, HalfExp(q_steps), z_exp, delta), order, **params)
                count += 1
                m = rep.first_mismatch
                exact = (m is not None and (m.q_exp.steps, m.z_exp) == (q_steps, z_exp)
                         and (m.left - m.right) == (delta if side == "lhs" else -delta))
                if rep.passed or not exact:
                    failures.append(f"{ident}{params}:{side} at q^{HalfExp(q_steps)} z^{z_exp}")
    record(8, not failures,
           f"{count} single-coefficient perturbations over {len(identity_ids())} identities (families at k = 2, 3) "
           f"at order 12 all "
           f"fail verification at exactly the injected (q, z) location" + (f"; missed: {failures}" if failures else ""),
           capsys)


# 9 ------------------------------------------------------------------------------

def test_criterion_9_bound_audits(capsys):
    failures, scanned = [], 0
    specs = hr.all_specs(ks=(1, 2, 3))
    for order in (10, 20, 30):
        for spec in specs:
            scanned += 1
            if hr.audit_bound(spec, order):
                failures.append(f"{spec.name}@{order}")
        out = io.StringIO()
        code = main(["verify", "--all", "--order", str(order), "--k", "2,3", "--json", "--self-audit"], stream=out)
        payload = json.loads(out.getvalue())
        audits = [r for r in payload["reports"] if r["id"].startswith("audit:")]
        if code != 0 or not audits or any(r["status"] != "pass" for r in audits):
            failures.append(f"--self-audit run at order {order}")
    record(9, not failures,
           f"{len(specs)} double-sum specs scanned over (n_max, n_max+5] at orders 10, 20, 30 ({scanned} audits); "
           f"no in-range terms; --self-audit runs exit 0" + (f"; failed: {failures}" if failures else ""), capsys)
