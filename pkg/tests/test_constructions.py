from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionkit.constructions import (
    ConstructionRecipe,
    WitnessCheck,
    add_hypers,
    assemble_ci,
    assemble_ci_low_index,
    assemble_product_hypersurface,
    build,
    build_base_n3,
    build_check_f,
    build_f0,
    build_g,
    c_coefficient,
    check_star_witness,
    ci_dimension_bound,
    double_cone,
    double_cone_budget,
    eliminate_case_c,
    f0_with_double_cones,
    fixed_example,
    recognize_double_cone_form,
    step1_chain,
    step1_pair,
    step2_alt_m2,
    step2_deform,
)
from torsionkit.constructions.assembly import ci_sweep_grid
from torsionkit.constructions.fixed import CHART_VARS, Q1, Q2, Q3
from torsionkit.constructions.witness import WITNESSES, f0_witness
from torsionkit.errors import InputError, PreconditionError, ShapeError
from torsionkit.groebner import is_groebner
from torsionkit.polyring import (
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
)


def same(a, b):
    ctx = a.ctx.merge(b.ctx)
    return embed(a, ctx) == embed(b, ctx)


def fresh_params(new, old, skip=()):
    return [p.name for p in new.ctx.params if not old.ctx.has(p.name) and p.name not in skip]


# ---------------------------------------------------------------------------
# g, f0 and the N = 3 family


def test_g_at_two_two():
    g = build_g(2, 2)
    assert g == parse_poly("pi*(1 + x1^2 + x2^2)^2 - x1*x2", g.ctx)


def test_g_at_two_three():
    g = build_g(2, 3)
    assert g == parse_poly("pi*(1 + x1 + x2)^3 - x1*x2", g.ctx)


@pytest.mark.parametrize("n, m", [(n, m) for n in range(2, 6) for m in range(2, 6)])
def test_g_degree(n, m):
    expected = max(m * -(-(n + 1) // m), n)
    assert build_g(n, m).total_degree() == expected


def test_g_rejects_small_parameters():
    with pytest.raises(PreconditionError):
        build_g(1, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_c_coefficients_follow_binary_digits(n):
    ctx = VarContext.create([f"x{i}" for i in range(1, n + 1)])
    assert c_coefficient(1, n, ctx) == Polynomial.var(ctx, "x1")
    for j in range(2, 2**n - 1):
        digits = [(j >> i) & 1 for i in range(n)]
        expected = Polynomial.one(ctx)
        for i, bit in enumerate(digits):
            if bit:
                expected = expected * (-Polynomial.var(ctx, f"x{i + 1}"))
        assert c_coefficient(j, n, ctx) == expected


def test_f0_second_coefficient():
    f = build_f0(2, 2, 4).polys[0]
    expected = parse_poly("pi*(1 + x1^2 + x2^2)^2 - x1*x2 + x1*x3^2 - x2*x4^2 + x1*x2*z^2", f.ctx)
    assert f == expected


@pytest.mark.parametrize("n, m", [(2, 2), (3, 2), (3, 4), (4, 3)])
def test_f0_degree_and_derivative(n, m):
    for N in range(n + 1, n + 2**n - 1):
        f = build_f0(n, m, N).polys[0]
        assert f.total_degree() == n + m
        xs = Polynomial.one(f.ctx)
        for i in range(1, n + 1):
            xs = xs * Polynomial.var(f.ctx, f"x{i}")
        assert partial_derivative(f, "z") == xs.scale((-1) ** n * m) * Polynomial.var(f.ctx, "z", m - 1)


@pytest.mark.parametrize("N", [2, 6])
def test_f0_rejects_out_of_range(N):
    with pytest.raises(PreconditionError):
        build_f0(2, 2, N)


def test_base_n3():
    fam = build_base_n3(4, 2)
    f = fam.polys[0]
    assert f.total_degree() == 4 and fam.designated == "z"
    g = specialize_params(f, {"rho": 0})
    assert same(g, parse_poly("pi*(1 + x1^2 + x2^2)^2 - x1*x2 + x1*x3^2 + x1*x2*z^2", f.ctx))
    assert not monomial_divides_all_terms(f, monomial_of(f.ctx, x1=1, x2=1))
    with pytest.raises(PreconditionError):
        build_base_n3(3, 2)


# ---------------------------------------------------------------------------
# double cone


def popcount_budget(n, m):
    return sum((n - bin(j).count("1")) // m for j in range(1, 2**n - 1))


def subset_budget(n, m):
    return sum(len(c) // m for l in range(n) for c in combinations(range(n), l))


@pytest.mark.parametrize("n, m, expected", [(4, 2, 10), (2, 2, 0), (3, 5, 0), (5, 2, 30)])
def test_budget_examples(n, m, expected):
    assert double_cone_budget(n, m) == expected


@pytest.mark.parametrize("n", range(2, 13))
def test_budget_matches_enumeration(n):
    for m in range(2, 7):
        got = double_cone_budget(n, m)
        assert got == popcount_budget(n, m)
        if n <= 9:
            assert got == subset_budget(n, m)
        if m > n:
            assert got == 0


def test_double_cone_preserves_degree_and_shape():
    f = build_f0(3, 2, 4).polys[0]
    out = double_cone(f, "x4", "z", 2)
    assert out.total_degree() == f.total_degree()
    assert out.coefficient(monomial_of(out.ctx, x4=1)) == parse_poly("t*lambda", out.ctx).constant_term()
    assert "w0" in out.variables_used()
    form = recognize_double_cone_form(out, "x4", "z", 2, check_degrees=False)
    assert form.degree == f.total_degree()
    assert same(form.b, recognize_double_cone_form(f, "x4", "z", 2).b)


def test_double_cone_rejects_degree_violation():
    # at n = m = 2 the coefficient of x3^2 is x1, one degree above d - 4 = 0
    f = build_f0(2, 2, 4).polys[0]
    with pytest.raises(PreconditionError):
        double_cone(f, "x3", "z", 2)


def test_double_cone_rejects_mixed_terms():
    ctx = VarContext.create(["x", "y", "z"])
    with pytest.raises(ShapeError):
        double_cone(parse_poly("x*z^2 + y^4", ctx), "x", "z", 2)


@pytest.mark.parametrize("n, m", [(3, 2), (4, 2), (4, 3)])
def test_iterated_double_cones_keep_degree(n, m):
    top = n + 2**n - 2
    for extra in range(double_cone_budget(n, m) + 1):
        fam = f0_with_double_cones(n, m, top + extra)
        assert fam.validate() == []
        assert fam.polys[0].ctx.nvars == top + extra + 1
    with pytest.raises(PreconditionError):
        f0_with_double_cones(n, m, top + double_cone_budget(n, m) + 1)


# ---------------------------------------------------------------------------
# adding hypersurfaces


X3 = VarContext.create(["x"])


def test_step1_first_and_second():
    f = parse_poly("x^3 + 1", X3)
    a, b = step1_pair(f, fresh="w1")
    assert same(a, parse_poly("x^3 + 1 + w1", a.ctx)) and same(b, parse_poly("w1", b.ctx))
    a, b = step1_pair(None, (a, b), fresh="w2")
    assert same(a, parse_poly("x^3 + 1 + w1 + w2", a.ctx)) and same(b, parse_poly("t + w2*w1", b.ctx))


@pytest.mark.parametrize("k", range(1, 6))
def test_step1_degree_after_k_steps(k):
    _, second = step1_chain(parse_poly("x^2", X3), [f"w{i}" for i in range(1, k + 1)])
    assert second.total_degree() == k


def test_step1_name_clash():
    with pytest.raises(PreconditionError):
        step1_pair(parse_poly("x", X3), fresh="x")


@pytest.mark.parametrize("d, M", [(3, 2), (4, 2), (5, 3), (6, 4)])
def test_step2_round_trip(d, M):
    names = [f"w{i}" for i in range(1, M + 1)]
    pair = step1_chain(parse_poly("x^3 + 1", X3), names)
    ft, g = step2_deform(pair, d, M, names)
    (t,) = fresh_params(g, pair[1])
    assert g.total_degree() == d
    assert same(specialize_params(g, {t: 0}), pair[1])
    assert same(ft, pair[0])


def test_step2_deformation_term_at_m2():
    names = ["w1", "w2"]
    pair = step1_chain(parse_poly("x^3 + 1", X3), names)
    h = parse_poly("x", pair[1].ctx)
    _, g = step2_deform(pair, 3, 2, names, h=h)
    (t,) = fresh_params(g, pair[1])
    assert g == embed(pair[1], g.ctx) + parse_poly(f"{t}*w2*(w1 - 1)*x", g.ctx)


def test_step2_rejects_bad_input():
    names = ["w1", "w2"]
    pair = step1_chain(parse_poly("x^3 + 1", X3), names)
    with pytest.raises(PreconditionError):
        step2_deform(pair, 2, 2, names)
    with pytest.raises(PreconditionError):
        step2_deform(pair, 4, 2, names, h=parse_poly("x", pair[1].ctx))
    with pytest.raises(ShapeError):
        step2_deform((pair[0], pair[0]), 4, 2, names)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_step2_alternative(d):
    names = ["w1", "w2"]
    pair = step1_chain(parse_poly("x^3 + 1", X3), names)
    ft, g = step2_alt_m2(pair, d, names)
    (t,) = fresh_params(g, pair[1], skip=("t2",))
    assert g.total_degree() == d
    assert g == parse_poly(f"t2 - w1*w2 + {t}*w1^{d}", g.ctx)
    assert g == parse_poly(f"t2 - w1*(w2 - {t}*w1^{d - 1})", g.ctx)
    assert same(specialize_params(g, {t: 0}), parse_poly("t2 - w1*w2", g.ctx))
    with pytest.raises(ShapeError):
        step2_alt_m2(pair, d, ["w1"])


@pytest.mark.parametrize("d, M", [(d, M) for d in range(1, 5) for M in range(1, d + 1)])
def test_check_f_degrees(d, M):
    f = build_f0(2, 2, 3).polys[0]
    c = build_check_f(f, d, M, block=1)
    assert c.total_degree() == f.total_degree() + d
    assert degrees(c).block_tuple(c.ctx.block_tags) == (f.total_degree(), d + 1)


def test_check_f_m1_has_no_t1():
    f = parse_poly("x^2", X3)
    c = build_check_f(f, 2, 1, wnames=["w1"])
    assert {p.name for p in c.ctx.params} == {"t", "t2"}
    assert c == parse_poly("t2 + (x^2 + w1)*(-w1 - t*(w1 - 1)*w1)", c.ctx)


def test_check_f_rejects_bad_bounds():
    with pytest.raises(PreconditionError):
        build_check_f(parse_poly("x", X3), 1, 2)


@pytest.mark.parametrize("d, M", [(1, 1), (3, 3), (4, 2), (5, 3)])
def test_add_hypers_degrees(d, M):
    f = parse_poly("x^4 + 1", X3)
    ft, g = add_hypers(f, d, M, [f"w{i}" for i in range(1, M + 1)])
    assert ft.total_degree() == 4 and g.total_degree() == d


# ---------------------------------------------------------------------------
# assembly


SMALL_GRID = ci_sweep_grid(ns=(2, 3), ms=(2,), s_max=3, d_max=6)


def test_small_grid_covers_every_case():
    families = {assemble_ci(*row).family for row in SMALL_GRID[::7]}
    assert {"CI_S1", "CI_CASE_A", "CI_CASE_B", "CI_CASE_C"} <= families


@pytest.mark.parametrize("row", SMALL_GRID[::5], ids=lambda r: f"{r[0]}-N{r[1]}-M{r[2]}-n{r[3]}")
def test_assembly_degrees_and_coprimality(row):
    degs, N, M, n, m = row
    fam = assemble_ci(degs, N, M, n, m)
    assert fam.validate() == []
    assert fam.degree_report() == list(degs)
    assert fam.ctx.nvars == N + M
    if len(degs) <= M:
        assert fam.claims_coprime and fam.coprime()[0]
        assert is_groebner(fam.polys, fam.order)


def test_assembly_single_base():
    fam = assemble_ci((5,), 5, 0, 2, 2)
    assert fam.family == "CI_S1" and fam.degree_report() == [5]


def test_case_c_eliminates_to_base():
    fam = assemble_ci((4, 3, 3), 4, 2, 2, 2)
    assert fam.family == "CI_CASE_C"
    out = eliminate_case_c(fam)
    assert all(p.is_zero() for p in out[1:])
    assert out[0] == fam.polys[0]


@pytest.mark.parametrize(
    "args",
    [((3,), 4, 0, 2, 2), ((5, 3), 4, 0, 2, 2), ((5,), 4, 2, 2, 2), ((5,), 3, 0, 2, 2), ((5,), 6, 0, 2, 2)],
)
def test_assembly_preconditions(args):
    with pytest.raises(PreconditionError):
        assemble_ci(*args)


def test_dimension_bound_values():
    assert [ci_dimension_bound(n, 2) for n in (2, 3, 4)] == [5, 13, 29]
    assert ci_dimension_bound(3, 3) == 10


def test_low_index_all_quadrics_are_the_chart():
    fam = assemble_ci_low_index((2, 2, 2), 3)
    ctx = VarContext.create(CHART_VARS)
    want = sorted(format_poly(parse_poly(t, ctx)) for t in (Q1, Q2, Q3))
    assert sorted(format_poly(embed(p, fam.ctx.merge(ctx))) for p in fam.polys) == want


@pytest.mark.parametrize(
    "degs, M",
    [((2, 2, 2), 3), ((2, 2, 2, 2), 5), ((3, 2), 2), ((3, 3), 3), ((3, 3, 2), 4), ((3, 3, 3), 6), ((4, 2), 3), ((5,), 2)],
)
def test_low_index_outputs_are_coprime(degs, M):
    fam = assemble_ci_low_index(degs, M)
    assert fam.validate() == []
    assert sorted(fam.degree_report(), reverse=True) == sorted(degs, reverse=True)
    assert fam.ctx.nvars == 4 + M
    assert fam.coprime()[0]
    assert is_groebner(fam.polys, fam.order)


def test_low_index_preconditions():
    with pytest.raises(PreconditionError):
        assemble_ci_low_index((2, 1), 2)
    with pytest.raises(PreconditionError):
        assemble_ci_low_index((2, 2), 2)


@pytest.mark.parametrize("Ms, ds", [((4,), (4,)), ((4, 2), (4, 3)), ((5, 1, 2), (5, 2, 4)), ((4, 3), (6, 5))])
def test_product_block_degrees(Ms, ds):
    fam = assemble_product_hypersurface(Ms, ds, 2, 2)
    assert fam.validate() == []
    assert fam.block_report() == [tuple(ds)]
    assert fam.ctx.nvars == sum(Ms)


@pytest.mark.parametrize("Ms, ds", [((3,), (4,)), ((4, 2), (4, 2)), ((4,), (3,)), ((4, 2), (4,))])
def test_product_preconditions(Ms, ds):
    with pytest.raises(PreconditionError):
        assemble_product_hypersurface(Ms, ds, 2, 2)


# ---------------------------------------------------------------------------
# fixed examples and witnesses


def test_fixed_examples():
    q = fixed_example("HPT_QUARTIC")
    assert q.degree_report() == [4] and q.ctx.nvars == 5
    assert format_poly(q.obstruction) == "x1*x2*z1*z2*z3"
    assert fixed_example("CI_23").degree_report() == [2, 3]
    chart = fixed_example("HPT_CHART")
    lms = [format_poly(Polynomial.monomial(chart.ctx, e)) for e in chart.leading_monomials()]
    assert lms[:2] == ["x3^2", "x2^2"]
    assert chart.coprime()[0] and is_groebner(chart.polys, chart.order)
    with pytest.raises(InputError):
        fixed_example("NOPE")


@pytest.mark.parametrize("n, m", [(n, m) for n in (2, 3, 4, 5) for m in (2, 3, 4)])
def test_f0_witness(n, m):
    res = check_star_witness(f0_witness(n, m))
    assert res.ok, res.reasons
    ctx = res.residual.ctx
    q = Polynomial.param(ctx, "q")
    x1 = Polynomial.var(ctx, "x1")
    assert res.residual == x1 + q + Polynomial.param(ctx, "pi").scale((n - 1) ** m)


@pytest.mark.parametrize(
    "name, residual", [("quartic", "x1 + q"), ("ci23", "x3 - alpha^2 + q"), ("chart", "-x6 + q")]
)
def test_fixed_witnesses(name, residual):
    res = check_star_witness(WITNESSES[name]())
    assert res.ok, res.reasons
    assert res.residual == parse_poly(residual, res.residual.ctx)


def test_witness_rejects_bad_bindings():
    wc = WITNESSES["quartic"]()
    bad = WitnessCheck(wc.targets, wc.bindings + [("z1", wc.bindings[1][1])], wc.inverted, wc.variable)
    with pytest.raises(PreconditionError):
        check_star_witness(bad)
    free = WitnessCheck(wc.targets, wc.bindings[:-1], wc.inverted, wc.variable)
    assert not check_star_witness(free).ok


# ---------------------------------------------------------------------------
# recipes


@pytest.mark.parametrize(
    "family, params",
    [
        ("G", {"n": 2, "m": 2}),
        ("F0", {"n": 3, "m": 2, "N": 6}),
        ("BASE_N3", {"d": 5, "m": 3}),
        ("CI_CASE_A", {"degrees": [5, 3], "N": 4, "M": 3, "n": 2, "m": 2}),
        ("PRODUCT_HYP", {"Ms": [4, 2], "ds": [4, 3], "n": 2, "m": 2}),
        ("HPT_CHART", {}),
    ],
)
def test_recipe_json_round_trip_and_build(family, params):
    recipe = ConstructionRecipe(family, params)
    again = ConstructionRecipe.from_json(recipe.to_json())
    assert again.to_json() == recipe.to_json()
    fam = build(again)
    assert fam.validate() == []


def test_recipe_unknown_family():
    with pytest.raises(PreconditionError):
        ConstructionRecipe("NOT_A_FAMILY")


@settings(max_examples=15)
@given(st.sampled_from(SMALL_GRID))
def test_declared_degrees_property(row):
    fam = assemble_ci(*row)
    assert [p.total_degree() for p in fam.polys] == list(row[0])
    if fam.claims_coprime:
        assert fam.coprime()[0]
