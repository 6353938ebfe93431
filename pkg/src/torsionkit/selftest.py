"""Named end-to-end checks run by ``torsionkit selftest``.

Each check rebuilds one published polynomial fact from scratch and compares
it against a literal transcription; a check returns a one-line detail string
and raises ``AssertionError`` on mismatch.
"""

from __future__ import annotations

import random
from typing import Callable

from .certify import CIQuery, certify_ci, identity_suite
from .constructions import (
    assemble_ci,
    assemble_ci_low_index,
    assemble_product_hypersurface,
    build_base_n3,
    build_check_f,
    build_f0,
    build_g,
    check_star_witness,
    double_cone,
    eliminate_case_c,
    fixed_example,
    hpt_birational_chain,
    hpt_chart_chain,
    step1_chain,
    step2_alt_m2,
    step2_deform,
)
from .constructions.fixed import CHART_VARS, Q1, Q2, Q3, QUARTIC
from .constructions.witness import WITNESSES, f0_witness
from .groebner import projective_closure_basis, random_ideal_elements, verify_iso_chain
from .ordering import Cmp, MonomialOrder, compare, leading_monomial, monomial_gcd, pairwise_coprime
from .polyring import (
    Polynomial,
    VarContext,
    degrees,
    embed,
    format_poly,
    monomial_divides_all_terms,
    monomial_of,
    parse_poly,
    partial_derivative,
    specialize_params,
    substitute,
)


def _eq(a: Polynomial, b: Polynomial) -> bool:
    ctx = a.ctx.merge(b.ctx)
    return embed(a, ctx) == embed(b, ctx)


def _lm_example() -> str:
    ctx = VarContext.create(["x", "y"])
    order = MonomialOrder.grlex(ctx)
    f, g, h = (parse_poly(t, ctx) for t in ("3*x^2*y^3 + 6*x^3*y^2 - 5*x*y + 5", "x^5 + x^2*y^2 + y^3 + x*y - 1", "y^2 + y + 1"))
    lms = [leading_monomial(p, order)[0] for p in (f, g, h)]
    assert lms == [(3, 2), (5, 0), (0, 2)], lms
    assert compare(order, (3, 2), (2, 3)) is Cmp.GT
    assert monomial_gcd((5, 0), (0, 2)) == (0, 0)
    assert pairwise_coprime([lms[1], lms[2]]) == (True, None)
    assert pairwise_coprime([lms[0], lms[1]]) == (False, (0, 1))
    return "LM = x^3*y^2, x^5, y^2"


def _g22() -> str:
    g = build_g(2, 2)
    assert _eq(g, parse_poly("pi*(1 + x1^2 + x2^2)^2 - x1*x2", g.ctx))
    return format_poly(g)


def _f0_facts() -> str:
    count = 0
    for n in (2, 3, 4):
        for m in (2, 3, 4):
            for N in range(n + 1, n + 2**n - 1):
                f = build_f0(n, m, N).polys[0]
                assert f.total_degree() == n + m
                ctx = f.ctx
                xs = Polynomial.one(ctx)
                for i in range(1, n + 1):
                    xs = xs * Polynomial.var(ctx, f"x{i}")
                expected = xs.scale((-1) ** n * m) * Polynomial.var(ctx, "z", m - 1)
                assert partial_derivative(f, "z") == expected
                count += 1
    return f"{count} instances of f0"


def _hpt_replacement() -> str:
    ctx = VarContext.create(["x1", "x2", "y1", "y2", "y3", "z1", "z2", "z3"])
    h = parse_poly("y1^2 + x1*x2*y2^2 + x2*y3^2 + x1*(1 + x1^2 + x2^2 - 2*x1 - 2*x2 - 2*x1*x2)", ctx)
    out = substitute(h, {"y1": parse_poly("x1*z1", ctx), "y2": parse_poly("z2", ctx), "y3": parse_poly("x1*z3", ctx)})
    q = out.exact_divide(parse_poly("x1", ctx))
    assert q is not None and q == parse_poly(QUARTIC, ctx)
    return "h(x1 z1, z2, x1 z3) / x1 = quartic"


def _base_n3() -> str:
    fam = build_base_n3(4, 2)
    f = fam.polys[0]
    assert f.total_degree() == 4
    assert set(f.ctx.variables) == {"x1", "x2", "x3", "z"}
    assert {p.name for p in f.ctx.params} == {"pi", "rho"}
    g = specialize_params(f, {"rho": 0})
    assert _eq(g, parse_poly("pi*(1 + x1^2 + x2^2)^2 - x1*x2 + x1*x3^2 + x1*x2*z^2", f.ctx))
    assert not monomial_divides_all_terms(f, monomial_of(f.ctx, x1=1, x2=1))
    return "degree 4, rho -> 0 recovers the f0 shape"


def _double_cone() -> str:
    f = build_f0(3, 2, 4).polys[0]
    out = double_cone(f, "x4", "z", 2)
    assert out.total_degree() == f.total_degree()
    tl = monomial_of(out.ctx, x4=1)
    assert out.coefficient(tl) == parse_poly("t*lambda", out.ctx).constant_term()
    return "degree preserved, term t*lambda*x4 present"


def _step1() -> str:
    ctx = VarContext.create(["x"])
    f = parse_poly("x^3 + 1", ctx)
    a, b = step1_chain(f, ["w1"])
    assert _eq(a, parse_poly("x^3 + 1 + w1", a.ctx)) and _eq(b, parse_poly("w1", b.ctx))
    a, b = step1_chain(f, ["w1", "w2"])
    assert _eq(a, parse_poly("x^3 + 1 + w1 + w2", a.ctx)) and _eq(b, parse_poly("t + w2*w1", b.ctx))
    return "(f + w1, w1) then (f + w1 + w2, t + w2*w1)"


def _step2() -> str:
    ctx = VarContext.create(["x"])
    f = parse_poly("x^3 + 1", ctx)
    pair = step1_chain(f, ["w1", "w2"])
    h = parse_poly("x", pair[1].ctx)
    ft, g = step2_deform(pair, 3, 2, ["w1", "w2"], h=h)
    (t,) = [p.name for p in g.ctx.params if not pair[1].ctx.has(p.name)]
    expected = embed(pair[1], g.ctx) + parse_poly(f"{t}*w2*(w1 - 1)*x", g.ctx)
    assert g == expected and g.total_degree() == 3
    assert _eq(specialize_params(g, {t: 0}), pair[1])
    return "t*w2*(w1 - 1)*h added, degree 3"


def _step2_alt() -> str:
    ctx = VarContext.create(["x"])
    pair = step1_chain(parse_poly("x^3 + 1", ctx), ["w1", "w2"])
    ft, g = step2_alt_m2(pair, 4, ["w1", "w2"])
    (t,) = [p.name for p in g.ctx.params if not pair[1].ctx.has(p.name) and p.name != "t2"]
    assert g.total_degree() == 4
    assert g == parse_poly(f"t2 - w1*w2 + {t}*w1^4", g.ctx)
    assert g == parse_poly(f"t2 - w1*(w2 - {t}*w1^3)", g.ctx)
    assert _eq(specialize_params(g, {t: 0}), parse_poly("t2 - w1*w2", g.ctx))
    return "t2 - w1*w2 + t*w1^4"


def _check_f() -> str:
    f = build_f0(2, 2, 3).polys[0]
    for d in (1, 2, 3):
        for M in range(1, d + 1):
            c = build_check_f(f, d, M, block=1)
            assert c.total_degree() == f.total_degree() + d
            assert degrees(c).block_tuple(c.ctx.block_tags) == (f.total_degree(), d + 1)
    return "deg = deg f + d, deg_w = d + 1"


def _assembly() -> str:
    base = assemble_ci((5,), 5, 0, 2, 2)
    assert base.family == "CI_S1" and len(base.polys) == 1
    fam = assemble_ci((4, 3, 3), 4, 2, 2, 2)
    assert fam.family == "CI_CASE_C"
    assert eliminate_case_c(fam)
    return "s=1 base, Case c elimination"


def _low_index() -> str:
    fam = assemble_ci_low_index((2, 2, 2), 3)
    ctx = VarContext.create(CHART_VARS)
    want = sorted(format_poly(parse_poly(t, ctx)) for t in (Q1, Q2, Q3))
    assert sorted(format_poly(embed(p, fam.ctx.merge(ctx))) for p in fam.polys) == want
    cubic = assemble_ci_low_index((3, 3), 3)
    ref = fixed_example("CI_33")
    assert [format_poly(p) for p in cubic.polys] == [format_poly(p) for p in ref.polys]
    for fam in (fam, cubic):
        assert fam.coprime()[0]
    return "(2,2,2) chart quadrics, (3,3) pair"


def _product() -> str:
    fam = assemble_product_hypersurface((4,), (4,), 2, 2)
    assert fam.block_report() == [(4,)]
    fam = assemble_product_hypersurface((4, 2), (4, 3), 2, 2)
    assert fam.block_report() == [(4, 3)]
    return "block degrees (4) and (4, 3)"


def _fixed() -> str:
    q = fixed_example("HPT_QUARTIC")
    assert q.degree_report() == [4] and q.ctx.nvars == 5
    assert fixed_example("CI_23").degree_report() == [2, 3]
    chart = fixed_example("HPT_CHART")
    lms = [format_poly(Polynomial.monomial(chart.ctx, e)) for e in chart.leading_monomials()]
    assert lms[:2] == ["x3^2", "x2^2"], lms
    assert chart.coprime()[0]
    return "quartic, (2,3) pair, chart LMs"


def _witnesses() -> str:
    for n in (2, 3, 4):
        for m in (2, 3, 4):
            res = check_star_witness(f0_witness(n, m))
            assert res.ok
    for name in ("quartic", "ci23", "chart"):
        assert check_star_witness(WITNESSES[name]()).ok
    return "f0 for n, m in 2..4 and three fixed witnesses"


def _chains() -> str:
    for chain in (hpt_birational_chain(), hpt_chart_chain()):
        ok, log = verify_iso_chain(chain)
        assert ok, log
    return "birational chain and chart chain"


def _closure() -> str:
    rng = random.Random(2024)
    fams = [fixed_example("HPT_CHART"), fixed_example("CI_33"), assemble_ci((4, 3), 4, 2, 2, 2)]
    for fam in fams:
        samples = random_ideal_elements(fam.polys, 2, rng)
        rep = projective_closure_basis(fam.polys, fam.order, samples)
        assert rep.passed, fam.family
    return f"{len(fams)} families"


def _identities() -> str:
    rep = identity_suite(20, 6)
    assert rep.ok, rep.failures
    return f"{rep.checked} identities"


def _certificates() -> str:
    assert certify_ci(CIQuery((4,), 4, 2)).theorem == "CI_LOW_INDEX"
    assert not certify_ci(CIQuery((4,), 5, 2)).certified
    return "quartic fourfold yes, quartic fivefold no"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("leading monomials", _lm_example),
    ("g at n=m=2", _g22),
    ("f0 degree and z-derivative", _f0_facts),
    ("HPT replacement", _hpt_replacement),
    ("N=3 base family", _base_n3),
    ("double cone", _double_cone),
    ("step 1 pairs", _step1),
    ("step 2 deformation", _step2),
    ("step 2 alternative", _step2_alt),
    ("check f", _check_f),
    ("assembly", _assembly),
    ("low index assembly", _low_index),
    ("product hypersurface", _product),
    ("fixed examples", _fixed),
    ("witnesses", _witnesses),
    ("isomorphism chains", _chains),
    ("projective closure", _closure),
    ("identity suite", _identities),
    ("certificates", _certificates),
]


def run_selftest() -> list[tuple[str, bool, str]]:
    out = []
    for name, check in CHECKS:
        try:
            out.append((name, True, check()))
        except AssertionError as exc:
            out.append((name, False, str(exc) or "assertion failed"))
    return out
