"""Build a :class:`GeneratedFamily` from a serialized recipe."""

from __future__ import annotations

from typing import Any, Callable

from ..errors import PreconditionError
from ..ordering import MonomialOrder
from ..polyring import Polynomial, embed, parse_poly
from .addhypers import build_check_f, step1_chain, step2_alt_m2, step2_deform
from .assembly import assemble_ci, assemble_ci_low_index, assemble_product_hypersurface
from .base import (
    ConstructionRecipe,
    GeneratedFamily,
    build_base_n3,
    build_f0,
    build_g,
    double_cone,
)
from .fixed import fixed_example


def _need(params: dict, *names: str) -> list[Any]:
    missing = [n for n in names if n not in params]
    if missing:
        raise PreconditionError(f"recipe is missing parameters {missing}")
    return [params[n] for n in names]


def _wrap(name: str, params: dict, polys: list[Polynomial], base: GeneratedFamily, declared: list[int]) -> GeneratedFamily:
    ctx = polys[-1].ctx
    polys = [embed(p, ctx) for p in polys]
    return GeneratedFamily(
        name,
        params,
        polys,
        base.designated,
        embed(base.obstruction, ctx),
        MonomialOrder.grlex(ctx),
        declared,
    )


def _choice(recipe: ConstructionRecipe, key: str, ctx) -> Polynomial | None:
    text = recipe.choices.get(key)
    return None if text is None else parse_poly(text, ctx)


def _base_f0(p: dict) -> GeneratedFamily:
    n, m, N = _need(p, "n", "m", "N")
    return build_f0(n, m, N)


def _g(r: ConstructionRecipe) -> GeneratedFamily:
    n, m = _need(r.params, "n", "m")
    g = build_g(n, m)
    return GeneratedFamily("G", dict(r.params), [g], "x1", Polynomial.one(g.ctx), MonomialOrder.grlex(g.ctx), [g.total_degree()])


def _double_cone(r: ConstructionRecipe) -> GeneratedFamily:
    base = _base_f0(r.params)
    (j0,) = _need(r.params, "j0")
    m = r.params["m"]
    f = double_cone(base.polys[0], j0, base.designated, m)
    fam = _wrap("DOUBLE_CONE", dict(r.params), [f], base, [f.total_degree()])
    fam.obstruction = fam.obstruction * Polynomial.var(f.ctx, "w0")
    return fam


def _step1(r: ConstructionRecipe) -> GeneratedFamily:
    base = _base_f0(r.params)
    (M,) = _need(r.params, "M")
    names = [f"w{i}" for i in range(1, M + 1)]
    ft, g = step1_chain(base.polys[0], names)
    return _wrap("STEP1", dict(r.params), [ft, g], base, [ft.total_degree(), M])


def _step2(r: ConstructionRecipe) -> GeneratedFamily:
    base = _base_f0(r.params)
    d, M = _need(r.params, "d", "M")
    names = [f"w{i}" for i in range(1, M + 1)]
    pair = step1_chain(base.polys[0], names)
    h = _choice(r, "h", pair[1].ctx)
    ft, g = step2_deform(pair, d, M, names, h=h)
    return _wrap("STEP2", dict(r.params), [ft, g], base, [ft.total_degree(), d])


def _step2_alt(r: ConstructionRecipe) -> GeneratedFamily:
    base = _base_f0(r.params)
    (d,) = _need(r.params, "d")
    names = ["w1", "w2"]
    ft, g = step2_alt_m2(step1_chain(base.polys[0], names), d, names)
    return _wrap("STEP2_ALT_M2", dict(r.params), [ft, g], base, [ft.total_degree(), d])


def _check_f(r: ConstructionRecipe) -> GeneratedFamily:
    base = _base_f0(r.params)
    d, M = _need(r.params, "d", "M")
    f = base.polys[0]
    f = build_check_f(f, d, M, block=1)
    fam = _wrap("CHECK_F", dict(r.params), [f], base, [f.total_degree()])
    fam.declared_blocks = [(base.polys[0].total_degree(), d + 1)]
    return fam


def _ci(expected: str) -> Callable[[ConstructionRecipe], GeneratedFamily]:
    def run(r: ConstructionRecipe) -> GeneratedFamily:
        degrees, N, M, n, m = _need(r.params, "degrees", "N", "M", "n", "m")
        fam = assemble_ci(degrees, N, M, n, m)
        if fam.family not in (expected, "CI_S1"):
            raise PreconditionError(f"parameters select {fam.family}, not {expected}")
        return fam

    return run


def _ci_low(expected: str) -> Callable[[ConstructionRecipe], GeneratedFamily]:
    def run(r: ConstructionRecipe) -> GeneratedFamily:
        degrees, M = _need(r.params, "degrees", "M")
        fam = assemble_ci_low_index(degrees, M)
        if fam.family != expected:
            raise PreconditionError(f"parameters select {fam.family}, not {expected}")
        return fam

    return run


def _product(r: ConstructionRecipe) -> GeneratedFamily:
    Ms, ds, n, m = _need(r.params, "Ms", "ds", "n", "m")
    return assemble_product_hypersurface(Ms, ds, n, m)


def _base_n3(r: ConstructionRecipe) -> GeneratedFamily:
    d, m = _need(r.params, "d", "m")
    return build_base_n3(d, m)


BUILDERS: dict[str, Callable[[ConstructionRecipe], GeneratedFamily]] = {
    "G": _g,
    "F0": lambda r: _base_f0(r.params),
    "BASE_N3": _base_n3,
    "DOUBLE_CONE": _double_cone,
    "STEP1": _step1,
    "STEP2": _step2,
    "STEP2_ALT_M2": _step2_alt,
    "CHECK_F": _check_f,
    "CI_CASE_A": _ci("CI_CASE_A"),
    "CI_CASE_B": _ci("CI_CASE_B"),
    "CI_CASE_C": _ci("CI_CASE_C"),
    "CI_LOW_INDEX_A": _ci_low("CI_LOW_INDEX_A"),
    "CI_LOW_INDEX_B": _ci_low("CI_LOW_INDEX_B"),
    "CI_LOW_INDEX_C": _ci_low("CI_LOW_INDEX_C"),
    "PRODUCT_HYP": _product,
    **{name: (lambda r, name=name: fixed_example(name)) for name in ("HPT_QUARTIC", "HPT_QUADRICS", "HPT_CHART", "CI_23", "CI_33")},
}


def build(recipe: ConstructionRecipe) -> GeneratedFamily:
    """Construct the family named by ``recipe`` and check its declared degrees."""
    fam = BUILDERS[recipe.family](recipe)
    problems = fam.validate()
    if problems:
        raise AssertionError(f"{recipe.family}: " + "; ".join(problems))
    return fam

