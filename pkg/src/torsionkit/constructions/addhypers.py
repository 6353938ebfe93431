"""Explicit polynomials that add a hypersurface or raise the degree of a given f."""

from __future__ import annotations

from typing import Sequence

from ..errors import PreconditionError, ShapeError
from ..polyring import Polynomial, VarContext, embed
from .base import add_param, add_variable

Pair = tuple[Polynomial, Polynomial]


def _lift_pair(pair: Pair, ctx: VarContext) -> Pair:
    return embed(pair[0], ctx), embed(pair[1], ctx)


def step1_pair(
    f: Polynomial | None,
    prior: Pair | None = None,
    fresh: str = "w1",
    t_param: str = "t",
    block: int | None = None,
) -> Pair:
    """First call: (f + w, w).  Iterated call on (f~, f_r): (f~ + w, t + w*f_r)."""
    if prior is None:
        if f is None:
            raise PreconditionError("step1_pair needs f on the first call")
        ctx = add_variable(f.ctx, fresh, block)
        w = Polynomial.var(ctx, fresh)
        return embed(f, ctx) + w, w
    ft, fr = prior
    ctx = add_variable(ft.ctx, fresh, block)
    ctx, t = add_param(ctx, t_param)
    ft, fr = _lift_pair(prior, ctx)
    w = Polynomial.var(ctx, fresh)
    return ft + w, Polynomial.param(ctx, t) + w * fr


def step1_chain(f: Polynomial, wnames: Sequence[str], t_param: str = "t", block: int | None = None) -> Pair:
    """Apply step1_pair once per name; the result has second component of degree len(wnames)."""
    if not wnames:
        raise PreconditionError("at least one added variable is required")
    pair = step1_pair(f, None, wnames[0], t_param, block)
    for name in wnames[1:]:
        pair = step1_pair(None, pair, name, t_param, block)
    return pair


def _split_by_variable(p: Polynomial, v: str) -> tuple[Polynomial, Polynomial]:
    """(part free of v, cofactor) with p = free + v*cofactor."""
    i = p.ctx.var_index[v]
    free, rest = {}, {}
    for e, c in p.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            rest[tuple(ne)] = c
        else:
            free[e] = c
    return Polynomial._raw(p.ctx, free), Polynomial._raw(p.ctx, rest)


def check_step2_shape(second: Polynomial, wnames: Sequence[str]) -> None:
    """second = t2 - w_M (t1 - w_{M-1} g) with t2 a nonzero constant."""
    if len(wnames) < 2:
        raise ShapeError("Step 2 needs M >= 2 added variables")
    wM, wM1 = wnames[-1], wnames[-2]
    const, cof = _split_by_variable(second, wM)
    if not const.is_constant() or const.is_zero():
        raise ShapeError("the w_M-free part of the second component must be a nonzero constant")
    if cof.is_zero():
        raise ShapeError("the second component does not involve w_M")
    c1 = cof.constant_term()
    rest = cof - Polynomial.constant(cof.ctx, c1)
    i = rest.ctx.var_index[wM1]
    if any(e[i] == 0 for e in rest.terms):
        raise ShapeError("the cofactor of w_M must be a constant plus a multiple of w_{M-1}")
    if len(wnames) == 2 and not c1.is_zero():
        raise ShapeError("for M = 2 the cofactor of w_M has no constant term")


def step2_deform(
    pair: Pair,
    d: int,
    M: int,
    wnames: Sequence[str],
    h: Polynomial | None = None,
    t_param: str = "t",
) -> Pair:
    """(f~, f_r + t w_M (w_{M-1} - delta_{M,2}) h) with deg h = d - 2."""
    if not (d > M >= 2):
        raise PreconditionError(f"Step 2 needs d > M >= 2, got d={d}, M={M}")
    if len(wnames) != M:
        raise PreconditionError("need exactly M added-variable names")
    ft, fr = pair
    check_step2_shape(fr, wnames)
    ctx, t = add_param(ft.ctx, t_param)
    ft, fr = _lift_pair(pair, ctx)
    wM = Polynomial.var(ctx, wnames[-1])
    wM1 = Polynomial.var(ctx, wnames[-2])
    if h is None:
        h = wM1 ** (d - 2)
    else:
        h = embed(h, ctx)
        if h.total_degree() != d - 2:
            raise PreconditionError(f"h must have degree d-2 = {d - 2}")
    delta = 1 if M == 2 else 0
    return ft, fr + Polynomial.param(ctx, t) * wM * (wM1 - delta) * h


def step2_alt_m2(pair: Pair, d: int, wnames: Sequence[str], t_param: str = "t", t2_param: str = "t2") -> Pair:
    """(f + w1 + w2, t2 - w1 w2 + t w1^d) from an M = 2 Step 1 pair."""
    if len(wnames) != 2:
        raise ShapeError("the alternative form applies to M = 2 only")
    if d < 2:
        raise PreconditionError("the alternative form needs d >= 2")
    ft, fr = pair
    w1n, w2n = wnames
    i1, i2 = fr.ctx.var_index[w1n], fr.ctx.var_index[w2n]
    for e in fr.terms:
        others = [k for j, k in enumerate(e) if j not in (i1, i2)]
        if any(others) or (e[i1], e[i2]) not in ((0, 0), (1, 1)):
            raise ShapeError("second component is not of the form c + c' w1 w2")
    ctx, t = add_param(ft.ctx, t_param)
    ctx, t2 = add_param(ctx, t2_param)
    w1, w2 = Polynomial.var(ctx, w1n), Polynomial.var(ctx, w2n)
    second = Polynomial.param(ctx, t2) - w1 * w2 + Polynomial.param(ctx, t) * w1**d
    return embed(ft, ctx), second


def add_hypers(
    f: Polynomial,
    d: int,
    M: int,
    wnames: Sequence[str],
    block: int | None = None,
    t_param: str = "t",
) -> Pair:
    """A pair (f~, f_new) with deg f~ = deg f, deg f_new = d, f_new in the M new variables."""
    if not (d == M >= 1 or d > M >= 2):
        raise PreconditionError(f"added hypersurface needs d = M >= 1 or d > M >= 2, got d={d}, M={M}")
    pair = step1_chain(f, list(wnames[:M]), t_param, block)
    if d > M:
        pair = step2_deform(pair, d, M, wnames[:M], t_param=t_param)
    return pair


def build_check_f(
    f: Polynomial,
    d: int,
    M: int,
    wnames: Sequence[str] | None = None,
    g: Polynomial | None = None,
    h: Polynomial | None = None,
    block: int | None = None,
    t_stem: str = "t",
    t1_stem: str = "t1",
    t2_stem: str = "t2",
) -> Polynomial:
    """t2 + (f + w_1 + ... + w_M)(t1 - w_M g - t (w_M - delta_{M+1,2}) h).

    For M = 1 this uses t1 = 0 and g = 1.  Defaults: g = w_{M-1}^{M-1}, h = w_M^{d-1}.
    """
    if not (d >= M >= 1):
        raise PreconditionError(f"check-f needs d >= M >= 1, got d={d}, M={M}")
    if wnames is None:
        wnames = [f.ctx.fresh_name(f"w{i}") for i in range(1, M + 1)]
    if len(wnames) != M:
        raise PreconditionError("need exactly M added-variable names")
    ctx = f.ctx
    for name in wnames:
        ctx = add_variable(ctx, name, block)
    ctx, t = add_param(ctx, t_stem)
    ctx, t2 = add_param(ctx, t2_stem)
    t1: Polynomial
    if M >= 2:
        ctx, t1name = add_param(ctx, t1_stem)
        t1 = Polynomial.param(ctx, t1name)
    else:
        t1 = Polynomial.zero(ctx)
    ws = [Polynomial.var(ctx, n) for n in wnames]
    wM = ws[-1]
    if g is None:
        g = Polynomial.one(ctx) if M == 1 else ws[-2] ** (M - 1)
    else:
        g = embed(g, ctx)
        if g.total_degree() != M - 1:
            raise PreconditionError(f"g must have degree M-1 = {M - 1}")
    if h is None:
        h = wM ** (d - 1)
    else:
        h = embed(h, ctx)
        if h.total_degree() != d - 1:
            raise PreconditionError(f"h must have degree d-1 = {d - 1}")
    delta = 1 if M == 1 else 0
    lin = embed(f, ctx)
    for w in ws:
        lin = lin + w
    factor = t1 - wM * g - Polynomial.param(ctx, t) * (wM - delta) * h
    return Polynomial.param(ctx, t2) + lin * factor
