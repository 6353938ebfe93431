"""The ten acceptance criteria, one test each.

Every criterion prints a single ``PASS``/``FAIL`` line with its timing, both
under pytest and when this file is run directly::

    python3 tests/test_acceptance.py
"""

import random
import subprocess
import sys
import time

import pytest

from torsionkit.certify import (
    CIQuery,
    bound_B,
    certify_ci,
    certify_grassmannian,
    certify_product,
    closed_form_2bound,
    floor_binomial_sum,
)
from torsionkit.constructions import (
    assemble_ci,
    build_f0,
    c_coefficient,
    check_star_witness,
    double_cone,
    double_cone_budget,
    double_cone_schedule,
    hpt_birational_chain,
    hpt_chart_chain,
    recognize_double_cone_form,
    step1_chain,
    step2_alt_m2,
    step2_deform,
)
from torsionkit.constructions.assembly import ci_sweep_grid
from torsionkit.constructions.witness import WITNESSES, f0_witness
from torsionkit.groebner import is_groebner, projective_closure_basis, random_ideal_elements, verify_iso_chain
from torsionkit.ordering import MonomialOrder, leading_monomial, pairwise_coprime
from torsionkit.polyring import Polynomial, VarContext, embed, parse_poly, partial_derivative, specialize_params


def _same(a, b):
    ctx = a.ctx.merge(b.ctx)
    return embed(a, ctx) == embed(b, ctx)


def _within(seconds, limit, what):
    assert seconds < limit, f"{what} took {seconds:.4f}s, limit {limit}s"


# ---------------------------------------------------------------------------
# criteria


def criterion_1():
    ctx = VarContext.create(["x", "y"])
    order = MonomialOrder.grlex(ctx)
    f, g, h = (
        parse_poly(t, ctx)
        for t in ("3*x^2*y^3 + 6*x^3*y^2 - 5*x*y + 5", "x^5 + x^2*y^2 + y^3 + x*y - 1", "y^2 + y + 1")
    )
    t0 = time.perf_counter()
    lms = [leading_monomial(p, order)[0] for p in (f, g, h)]
    gh = pairwise_coprime([lms[1], lms[2]])
    fg = pairwise_coprime([lms[0], lms[1]])
    elapsed = time.perf_counter() - t0
    assert lms == [(3, 2), (5, 0), (0, 2)], lms
    assert gh == (True, None) and fg == (False, (0, 1))
    _within(elapsed, 1e-3, "leading monomials")
    return f"LM = x^3*y^2, x^5, y^2 in {elapsed * 1e6:.0f} us"


def criterion_2():
    count = 0
    for n in (2, 3, 4):
        for m in (2, 3, 4):
            for N in range(n + 1, n + 2**n - 1):
                f = build_f0(n, m, N).polys[0]
                ctx = f.ctx
                assert f.total_degree() == n + m
                assert c_coefficient(1, n, ctx) == Polynomial.var(ctx, "x1")
                xs = Polynomial.one(ctx)
                for i in range(1, n + 1):
                    xs = xs * Polynomial.var(ctx, f"x{i}")
                assert partial_derivative(f, "z") == xs.scale((-1) ** n * m) * Polynomial.var(ctx, "z", m - 1)
                count += 1
    return f"{count} instances"


def criterion_3():
    residuals = {}
    for n in (2, 3, 4):
        for m in (2, 3, 4):
            res = check_star_witness(f0_witness(n, m))
            assert res.ok, res.reasons
            ctx = res.residual.ctx
            want = parse_poly(f"pi*{(n - 1) ** m} + x1 + q", ctx)
            assert res.residual == want, (n, m)
    residuals["f0"] = "pi*(n-1)^m + x1 + q"
    for name, text in (("quartic", "x1 + q"), ("ci23", "x3 - alpha^2 + q"), ("chart", "-x6 + q")):
        res = check_star_witness(WITNESSES[name]())
        assert res.ok, res.reasons
        assert res.residual == parse_poly(text, res.residual.ctx), name
        residuals[name] = text
    return "; ".join(f"{k}: {v}" for k, v in residuals.items())


def criterion_4():
    logs = []
    for chain in (hpt_birational_chain(), hpt_chart_chain()):
        ok, log = verify_iso_chain(chain)
        assert ok, log
        logs.extend(log)
    memberships = [line for line in logs if "membership" in line]
    assert memberships and all("left in right ok" in x and "right in left ok" in x for x in memberships)
    return f"{len(logs)} steps verified"


def sweep_families():
    for row in ci_sweep_grid():
        yield row, assemble_ci(*row)


def criterion_5():
    cases, coprime = {}, 0
    for (degs, N, M, n, m), fam in sweep_families():
        assert fam.validate() == [], (degs, N, M, n, m)
        assert fam.degree_report() == list(degs)
        cases[fam.family] = cases.get(fam.family, 0) + 1
        if len(degs) <= M:
            assert fam.coprime()[0], (degs, N, M, n, m)
            assert is_groebner(fam.polys, fam.order), (degs, N, M, n, m)
            coprime += 1
    assert {"CI_CASE_A", "CI_CASE_B", "CI_CASE_C"} <= set(cases)
    total = sum(cases.values())
    return f"{total} families, {coprime} coprime and Groebner; " + ", ".join(f"{k} {v}" for k, v in sorted(cases.items()))


def criterion_6():
    rng = random.Random(2024)
    checked = 0
    for (degs, N, M, n, m), fam in sweep_families():
        if len(degs) > M or fam.ctx.nvars > 12:
            continue
        samples = random_ideal_elements(fam.polys, 5, rng)
        rep = projective_closure_basis(fam.polys, fam.order, samples)
        assert rep.passed, (degs, N, M, n, m)
        checked += 1
    assert checked > 0
    return f"{checked} families, 5 samples each"


def criterion_7():
    checked = 0
    for n in range(2, 21):
        assert floor_binomial_sum(n, 2) == (n - 1) * 2 ** (n - 2) - n // 2, n
        checked += 1
    for d in range(4, 21):
        assert closed_form_2bound(d) == bound_B(d - 2, 2), d
        checked += 1
    for n in range(2, 13):
        for m in range(2, 7):
            double_cone_budget(n, m)
            checked += 1
    return f"{checked} identities, 0 failures"


def criterion_8():
    cases = [
        ("(4) D=4", lambda: certify_ci(CIQuery((4,), 4, 2)), True, None),
        ("(4) D=5", lambda: certify_ci(CIQuery((4,), 5, 2)), False, None),
        ("(6) r=24", lambda: certify_ci(CIQuery((6,), 28, 2)), True, 4),
        ("(6) r=25", lambda: certify_ci(CIQuery((6,), 29, 2)), False, None),
        ("Gr(2,4) d=4", lambda: certify_grassmannian(2, 4, 4, 2), True, None),
        ("Gr(2,5) d=4", lambda: certify_grassmannian(2, 5, 4, 2), False, None),
        ("P(4,2) ds=(4,3)", lambda: certify_product((4, 2), (4, 3), 2), True, None),
    ]
    worst = 0.0
    for label, fn, certified, witness in cases:
        t0 = time.perf_counter()
        cert = fn()
        elapsed = time.perf_counter() - t0
        worst = max(worst, elapsed)
        assert cert.certified is certified, label
        if witness is not None:
            assert cert.witness_n == witness, label
        _within(elapsed, 1e-3, label)
    assert certify_ci(CIQuery((6,), 28, 2)).fano_index == 24
    return f"{len(cases)} cases, slowest {worst * 1e6:.0f} us"


def criterion_9():
    x = VarContext.create(["x"])
    f = parse_poly("x^3 + 1", x)
    trips = 0
    for d, M in ((3, 2), (4, 2), (5, 3), (6, 4), (7, 5)):
        names = [f"w{i}" for i in range(1, M + 1)]
        pair = step1_chain(f, names)
        _, g = step2_deform(pair, d, M, names)
        (t,) = [p.name for p in g.ctx.params if not pair[1].ctx.has(p.name)]
        assert g.total_degree() == d and _same(specialize_params(g, {t: 0}), pair[1])
        trips += 1
    for d in (2, 3, 4, 5):
        pair = step1_chain(f, ["w1", "w2"])
        _, g = step2_alt_m2(pair, d, ["w1", "w2"])
        (t,) = [p.name for p in g.ctx.params if not pair[1].ctx.has(p.name) and p.name != "t2"]
        assert _same(specialize_params(g, {t: 0}), parse_poly("t2 - w1*w2", g.ctx))
        trips += 1
    cones = 0
    for n in (2, 3, 4):
        for m in (2, 3, 4):
            top = n + 2**n - 2
            g = build_f0(n, m, top).polys[0]
            schedule = double_cone_schedule(n, m)
            assert len(schedule) == double_cone_budget(n, m)
            for k, j in enumerate(schedule):
                g = double_cone(g, f"x{n + j}", "z", m, w_name=f"x{top + k + 1}")
                assert g.total_degree() == n + m
                recognize_double_cone_form(g, f"x{n + j}", "z", m, check_degrees=False)
                cones += 1
    return f"{trips} step round trips, {cones} double cones"


CLI_INVOCATIONS = [
    ["certify", "ci", "--degrees", "4", "--dim", "4", "--m", "2", "--char", "0"],
    ["certify", "ci", "--degrees", "4", "--dim", "5", "--m", "2", "--json"],
    ["certify", "grass", "--l", "2", "--n", "4", "--d", "4", "--m", "2", "--json"],
    ["certify", "product", "--Ms", "4,2", "--ds", "4,3", "--m", "2"],
    ["construct", "f0", "--n", "2", "--m", "2", "--N", "4", "--json"],
    ["construct", "ci", "--degrees", "5,3,3", "--N", "5", "--M", "4", "--n", "2", "--m", "2", "--json"],
    ["verify", "iso-chain", "--builtin", "chart", "--json"],
    ["verify", "witness", "--builtin", "quartic"],
    ["verify", "closure", "data/hpt_chart.json", "--samples", "3"],
    ["table", "ci-2torsion", "--d", "4..8"],
    ["table", "grass", "--d", "4", "--dim", "1..10", "--json"],
    ["table", "ci-2torsion", "--d", "9..8"],
    ["selftest"],
]


def criterion_10():
    from pathlib import Path

    root = Path(__file__).resolve().parent.parent
    for argv in CLI_INVOCATIONS:
        runs = [
            subprocess.run([sys.executable, "-m", "torsionkit", *argv], capture_output=True, cwd=root, check=False)
            for _ in range(2)
        ]
        assert runs[0].returncode in (0, 1), (argv, runs[0].stderr)
        assert runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode, argv
        assert runs[0].stdout, argv
    return f"{len(CLI_INVOCATIONS)} invocations byte-identical"


CRITERIA = [
    (1, "leading monomials", criterion_1, None),
    (2, "base family f0", criterion_2, 5),
    (3, "witness suite", criterion_3, 1),
    (4, "isomorphism chains", criterion_4, 30),
    (5, "assembly sweep", criterion_5, 120),
    (6, "projective closure", criterion_6, 120),
    (7, "identity suite", criterion_7, 1),
    (8, "certification", criterion_8, None),
    (9, "degeneration round trips", criterion_9, 10),
    (10, "determinism", criterion_10, None),
]


def run_criterion(number, title, fn, limit, write):
    t0 = time.perf_counter()
    try:
        detail = fn()
        elapsed = time.perf_counter() - t0
        if limit is not None:
            _within(elapsed, limit, title)
    except AssertionError as exc:
        elapsed = time.perf_counter() - t0
        write(f"FAIL criterion {number} ({title}) [{elapsed:.2f}s]: {exc}")
        raise
    write(f"PASS criterion {number} ({title}) [{elapsed:.2f}s]: {detail}")


@pytest.mark.parametrize("number, title, fn, limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(number, title, fn, limit, capsys):
    def write(line):
        with capsys.disabled():
            print(f"\n{line}")

    run_criterion(number, title, fn, limit, write)


if __name__ == "__main__":
    failed = 0
    for spec in CRITERIA:
        try:
            run_criterion(*spec, print)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
