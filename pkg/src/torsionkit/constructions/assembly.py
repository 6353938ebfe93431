"""Assembly of affine complete intersections and product hypersurfaces."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

from ..errors import PreconditionError
from ..ordering import MonomialOrder
from ..polyring import Polynomial, VarContext, common_context, embed, substitute
from .addhypers import add_hypers, build_check_f, step1_chain, step2_alt_m2
from .base import GeneratedFamily, base_hypersurface, lift_all
from .fixed import CI33_VARS, ci33_pair, hpt_chart_quadrics, hpt_quartic


def ci_dimension_bound(n: int, m: int) -> int:
    """Largest N allowed for the affine complete intersections with witness n."""
    return n + 2**n - 1 + sum(math.comb(n, j) * (j // m) for j in range(n))


def _distribute(total: int, lows: Sequence[int], highs: Sequence[int]) -> list[int]:
    """Integers in [low_i, high_i] summing to total, filled greedily from the front."""
    out = list(lows)
    spare = total - sum(out)
    if spare < 0 or total > sum(highs):
        raise PreconditionError(f"cannot split {total} into parts within {list(zip(lows, highs))}")
    for i, hi in enumerate(highs):
        take = min(spare, hi - out[i])
        out[i] += take
        spare -= take
    return out


def _finish(
    family: str,
    params: dict,
    polys: list[Polynomial],
    designated: str,
    obstruction: Polynomial,
    priority: Sequence[str],
    declared: Sequence[int],
    claims_coprime: bool,
    notes: Sequence[str] = (),
) -> GeneratedFamily:
    ctx = common_context(polys)
    polys = lift_all(polys, ctx)
    order = MonomialOrder.from_names(ctx, list(priority))
    return GeneratedFamily(
        family,
        params,
        polys,
        designated,
        embed(obstruction, ctx),
        order,
        list(declared),
        claims_coprime=claims_coprime,
        notes=list(notes),
    )


def assemble_ci(degrees: Sequence[int], N: int, M: int, n: int, m: int) -> GeneratedFamily:
    """g_1..g_s of the given degrees in N + M variables (x.., z, y_1..y_M)."""
    degrees = [int(d) for d in degrees]
    s = len(degrees)
    if s < 1:
        raise PreconditionError("at least one degree is required")
    if n < 2 or m < 2:
        raise PreconditionError("assembly needs n >= 2 and m >= 2")
    if any(d < 1 for d in degrees):
        raise PreconditionError("degrees must be positive")
    if degrees[0] < n + m:
        raise PreconditionError(f"d_1 >= n + m fails: {degrees[0]} < {n + m}")
    if not (s - 1 <= M):
        raise PreconditionError(f"s - 1 <= M fails: M = {M}, s = {s}")
    if not (M <= sum(degrees) - n - m):
        raise PreconditionError(f"M <= sum(d) - n - m fails: M = {M}, bound {sum(degrees) - n - m}")
    if not (4 <= N <= ci_dimension_bound(n, m)):
        raise PreconditionError(f"4 <= N <= {ci_dimension_bound(n, m)} fails: N = {N}")

    linear = [i for i, d in enumerate(degrees) if d == 1 and i > 0]
    if linear:
        core_idx = [i for i in range(s) if i not in linear]
        core = assemble_ci([degrees[i] for i in core_idx], N, M - len(linear), n, m)
        extra = [f"y{M - len(linear) + k + 1}" for k in range(len(linear))]
        ctx = core.ctx.with_variables(extra, block=0)
        polys: list[Polynomial | None] = [None] * s
        for i, p in zip(core_idx, core.polys):
            polys[i] = embed(p, ctx)
        for i, name in zip(linear, extra):
            polys[i] = Polynomial.var(ctx, name)
        fam = _finish(
            core.family,
            {"degrees": degrees, "N": N, "M": M, "n": n, "m": m},
            polys,
            core.designated,
            core.obstruction,
            core.order.priority_names() + extra,
            degrees,
            s <= M,
            core.notes + [f"degree-1 entries {linear} are coordinate hyperplanes"],
        )
        return fam

    params = {"degrees": degrees, "N": N, "M": M, "n": n, "m": m}
    ys = [f"y{i}" for i in range(1, M + 1)]

    if s == 1:
        base = base_hypersurface(N, degrees[0] - M, n, m)
        f = base.polys[0]
        if M > 0:
            f = build_check_f(f, M, M, wnames=ys)
        priority = list(base.ctx.variables) + ys
        return _finish("CI_S1", params, [f], base.designated, base.obstruction, priority, degrees, M >= 1)

    if M >= 2 * s - 2:
        return _case_a(degrees, N, M, n, m, ys, params)
    if s <= M:
        return _case_b(degrees, N, M, n, m, ys, params)
    return _case_c(degrees, N, M, n, m, ys, params)


def _case_a(degrees, N, M, n, m, ys, params) -> GeneratedFamily:
    s = len(degrees)
    d_first = min(degrees[0], sum(degrees) - M)
    M1 = degrees[0] - d_first
    Ms = _distribute(M - M1, [2] * (s - 1), degrees[1:])
    base = base_hypersurface(N, d_first, n, m)
    f = base.polys[0]
    if M1 > 0:
        f = build_check_f(f, M1, M1, wnames=ys[:M1])
    others: list[Polynomial] = []
    pos = M1
    for d_i, M_i in zip(degrees[1:], Ms):
        names = ys[pos : pos + M_i]
        pos += M_i
        f, g_i = add_hypers(f, d_i, M_i, names)
        others.append(g_i)
    priority = list(base.ctx.variables) + ys
    return _finish(
        "CI_CASE_A",
        {**params, "M_i": [M1] + Ms},
        [f] + others,
        base.designated,
        base.obstruction,
        priority,
        degrees,
        s <= M,
    )


def _case_b(degrees, N, M, n, m, ys, params) -> GeneratedFamily:
    s = len(degrees)
    sp = M + 2 - s
    base = base_hypersurface(N, degrees[0], n, m)
    f = base.polys[0]
    others: list[Polynomial] = []
    for i in range(2, sp + 1):
        names = ys[2 * i - 4 : 2 * i - 2]
        d_i = degrees[i - 1]
        if i < sp:
            f, g_i = add_hypers(f, d_i, 2, names)
        else:
            f, g_i = step2_alt_m2(step1_chain(f, names), d_i, names, t_param="b", t2_param="a")
        others.append(g_i)
    ctx = f.ctx.with_variables([y for y in ys if y not in f.ctx.var_index])
    chain = []
    for k in range(1, s - sp + 1):
        new, prev = ys[2 * sp - 3 + k], ys[2 * sp - 4 + k]
        chain.append(Polynomial.var(ctx, new) + Polynomial.var(ctx, prev, degrees[sp + k - 1]))
    priority = list(base.ctx.variables) + ys
    return _finish(
        "CI_CASE_B",
        {**params, "s_prime": sp},
        [f] + others + chain,
        base.designated,
        base.obstruction,
        priority,
        degrees,
        True,
        [f"g_{sp} has the shape a - y y' + b y^d with a, b kept transcendental"],
    )


def _case_c(degrees, N, M, n, m, ys, params) -> GeneratedFamily:
    base = base_hypersurface(N, degrees[0], n, m)
    f = base.polys[0]
    ctx = f.ctx.with_variables(ys)
    last_x = base.ctx.variables[-2] if base.ctx.variables[-1] == base.designated else base.ctx.variables[-1]
    hs = [Polynomial.var(ctx, last_x, d) for d in degrees[1:]]
    gs = [Polynomial.var(ctx, y) + h for y, h in zip(ys, hs)]
    priority = list(base.ctx.variables) + ys
    return _finish(
        "CI_CASE_C",
        {**params, "h_variable": last_x},
        [embed(f, ctx)] + gs,
        base.designated,
        base.obstruction,
        priority,
        degrees,
        False,
    )


def eliminate_case_c(fam: GeneratedFamily) -> list[Polynomial]:
    """Substitute y_i = -h_i into every polynomial; the base hypersurface and zeros remain."""
    bindings = {}
    for g in fam.polys[1:]:
        ys = [v for v in g.variables_used() if v.startswith("y")]
        (y,) = ys
        bindings[y] = Polynomial.var(g.ctx, y) - g
    return [substitute(p, bindings) for p in fam.polys]


# ---------------------------------------------------------------------------
# low Fano index


def assemble_ci_low_index(degrees: Sequence[int], M: int) -> GeneratedFamily:
    """f_1..f_s of the given degrees (all >= 2) in 4 + M variables."""
    degrees = sorted((int(d) for d in degrees), reverse=True)
    s = len(degrees)
    if s < 1 or any(d < 2 for d in degrees):
        raise PreconditionError("low-index assembly needs degrees >= 2")
    if not (s <= M <= sum(degrees) - 3):
        raise PreconditionError(f"s <= M <= sum(d) - 3 fails: s = {s}, M = {M}, bound {sum(degrees) - 3}")
    if degrees[0] >= 4:
        if M == sum(degrees) - 3:
            fam = assemble_ci(degrees, 5, M - 1, 2, 2)
        else:
            fam = assemble_ci(degrees, 4, M, 2, 2)
        fam.notes.append("delegated to the general assembly with n = m = 2")
        fam.claims_coprime = True
        return fam
    if degrees[0] == 2:
        return _low_case_a(degrees, M)
    if M != 3 * s - 3:
        return _low_case_b(degrees, M)
    return _low_case_c(degrees, M)


def _low_case_a(degrees, M) -> GeneratedFamily:
    s = len(degrees)
    if s < 3:
        raise PreconditionError("all-quadric case needs s >= 3")
    s0 = 2 * s - M
    names = [f"x{i}" for i in range(1, 5 + s0)]
    base = hpt_chart_quadrics()
    ctx = VarContext.create(names)
    q1, q2, q3 = (embed(p, ctx) for p in base.polys)
    qs = [Polynomial.var(ctx, f"x{4 + i}") + Polynomial.var(ctx, f"x{3 + i}", 2) for i in range(4, s0 + 1)]
    f = q2
    others: list[Polynomial] = []
    nxt = 5 + s0
    for _ in range(s - s0):
        pair_names = [f"x{nxt}", f"x{nxt + 1}"]
        nxt += 2
        f, g = step1_chain(f, pair_names)
        others.append(g)
    priority = ["x2"] + [f"x{i}" for i in range(3, 5 + M)] + ["x1"]
    return _finish(
        "CI_LOW_INDEX_A",
        {"degrees": degrees, "M": M, "s0": s0},
        [f, q1, q3] + qs + others,
        "x2",
        Polynomial.var(ctx, "x2") * Polynomial.var(ctx, "x4") * Polynomial.var(ctx, "x5"),
        priority,
        degrees,
        True,
    )


def _low_case_b(degrees, M) -> GeneratedFamily:
    s = len(degrees)
    s1 = min(s - 2, M - s)
    M0 = M - s + s1
    if s1 == 0 and M0 != 0:
        raise PreconditionError("inconsistent parameters for the mixed cubic case")
    Ms = _distribute(M0, [2] * s1, degrees[1 : s1 + 1]) if s1 else []
    zs = [f"z{i}" for i in range(1, s + 2 - s1)]
    ys = [f"y{i}" for i in range(1, M0 + 1)]
    quartic = hpt_quartic().polys[0]
    f = quartic
    others: list[Polynomial] = []
    pos = 0
    for d_i, M_i in zip(degrees[1 : s1 + 1], Ms):
        names = ys[pos : pos + M_i]
        pos += M_i
        f, g = add_hypers(f, d_i, M_i, names)
        others.append(g)
    ctx = VarContext.create(["x1", "x2", "x3"] + zs + ys, f.ctx.params)
    h = embed(f - embed(quartic, f.ctx), ctx)
    V = lambda name, k=1: Polynomial.var(ctx, name, k)  # noqa: E731
    ds = degrees[-1]
    # x1 x2 z3^2 becomes x1 x3 z3^(3 - d_s) once x3 = x2 z3^(d_s - 1)
    f1 = (
        V("x1") * V("z1", 2)
        + V("x2") * V("z2", 2)
        + V("x1") * V("x3") * V("z3", 3 - ds)
        + (1 + V("x1", 2) + V("x2", 2) - 2 * V("x1") - 2 * V("x2") - 2 * V("x1") * V("x2"))
        + h
    )
    chain = []
    for j in range(s1 + 2, s):
        dj = degrees[j - 1]
        if j == s1 + 2:
            chain.append(V("z2", dj) + V("z4"))
        else:
            chain.append(V(f"z{j + 1 - s1}", dj) + V(f"z{j + 2 - s1}"))
    fs = V("x3") - V("x2") * V("z3", ds - 1)
    priority = ["x1", "z1", "x2", "x3"] + zs[1:] + ys
    return _finish(
        "CI_LOW_INDEX_B",
        {"degrees": degrees, "M": M, "s1": s1, "M_i": Ms},
        [f1] + [embed(g, ctx) for g in others] + chain + [fs],
        "z3",
        V("x1") * V("x2") * V("z1") * V("z2") * V("z3"),
        priority,
        degrees,
        True,
        ["f_1 uses x1 x3 z3^(3 - d_s) so that substituting f_s recovers x1 x2 z3^2"],
    )


def _low_case_c(degrees, M) -> GeneratedFamily:
    s = len(degrees)
    pair = ci33_pair()
    c1, f = pair.polys
    others: list[Polynomial] = []
    names = [f"w{i}" for i in range(1, 3 * (s - 2) + 1)]
    for k in range(s - 2):
        f, g = add_hypers(f, 3, 3, names[3 * k : 3 * k + 3])
        others.append(g)
    return _finish(
        "CI_LOW_INDEX_C",
        {"degrees": degrees, "M": M},
        [c1, f] + others,
        pair.designated,
        pair.obstruction,
        list(CI33_VARS) + names,
        degrees,
        True,
    )


# ---------------------------------------------------------------------------
# products of projective spaces


def product_dimension_bound(n: int, m: int) -> int:
    return ci_dimension_bound(n, m)


def assemble_product_hypersurface(Ms: Sequence[int], ds: Sequence[int], n: int, m: int) -> GeneratedFamily:
    """One polynomial in blocks y{i}_1..y{i}_{M_i} of multidegree (d_0, ..., d_s)."""
    Ms, ds = [int(x) for x in Ms], [int(x) for x in ds]
    if len(Ms) != len(ds) or not Ms:
        raise PreconditionError("Ms and ds must be nonempty and of equal length")
    if n < 2 or m < 2:
        raise PreconditionError("product assembly needs n >= 2 and m >= 2")
    if ds[0] < n + m:
        raise PreconditionError(f"d_0 >= n + m fails: {ds[0]} < {n + m}")
    for i in range(1, len(Ms)):
        if Ms[i] < 1:
            raise PreconditionError(f"M_{i} >= 1 fails")
        if ds[i] < Ms[i] + 1:
            raise PreconditionError(f"d_{i} >= M_{i} + 1 fails: {ds[i]} < {Ms[i] + 1}")
    if not (4 <= Ms[0] <= product_dimension_bound(n, m)):
        raise PreconditionError(f"4 <= M_0 <= {product_dimension_bound(n, m)} fails: M_0 = {Ms[0]}")
    base = base_hypersurface(Ms[0], ds[0], n, m)
    f0 = base.polys[0]
    rename = {v: f"y0_{k + 2}" for k, v in enumerate(v for v in base.ctx.variables if v != base.designated)}
    rename[base.designated] = "y0_1"
    names0 = ["y0_1"] + [f"y0_{k}" for k in range(2, Ms[0] + 1)]
    ctx0 = VarContext.create([(v, 0) for v in names0], base.ctx.params)
    f = _rename(f0, rename, ctx0)
    l = _rename(base.obstruction, rename, ctx0)
    for i in range(1, len(Ms)):
        names = [f"y{i}_{j}" for j in range(1, Ms[i] + 1)]
        f = build_check_f(
            f, ds[i] - 1, Ms[i], wnames=names, block=i, t_stem=f"t_{i}", t1_stem=f"t1_{i}", t2_stem=f"t2_{i}"
        )
    ctx = f.ctx
    fam = GeneratedFamily(
        "PRODUCT_HYP",
        {"Ms": Ms, "ds": ds, "n": n, "m": m},
        [f],
        "y0_1",
        embed(l, ctx),
        MonomialOrder.grlex(ctx),
        [ds[0] + sum(d - 1 for d in ds[1:])],
        declared_blocks=[tuple(ds)],
    )
    return fam


def _rename(p: Polynomial, mapping: dict[str, str], ctx: VarContext) -> Polynomial:
    idx = [ctx.var_index[mapping[v]] for v in p.ctx.variables]
    if p.ctx.params != ctx.params:
        raise PreconditionError("renaming keeps the parameter list")
    terms = {}
    for e, c in p.terms.items():
        ne = [0] * ctx.nvars
        for i, k in zip(idx, e):
            ne[i] = k
        terms[tuple(ne)] = c
    return Polynomial._raw(ctx, terms)


def ci_sweep_grid(
    ns: Sequence[int] = (2, 3),
    ms: Sequence[int] = (2, 3),
    s_max: int = 4,
    d_max: int = 8,
) -> list[tuple[tuple[int, ...], int, int, int, int]]:
    """(degrees, N, M, n, m) covering every case of :func:`assemble_ci`.

    Degrees run over non-increasing tuples (reordering is harmless), M over the
    case boundaries s-1, s, 2s-3, 2s-2 and the maximum, and N alternates between
    the two ends of its admissible range.
    """
    grid = []
    flip = 0
    for n in ns:
        for m in ms:
            lo_N, hi_N = 4, ci_dimension_bound(n, m)
            for s in range(1, s_max + 1):
                for degs in itertools.combinations_with_replacement(range(d_max, 0, -1), s):
                    if degs[0] < n + m:
                        continue
                    hi = sum(degs) - n - m
                    for M in sorted({s - 1, s, 2 * s - 3, 2 * s - 2, hi}):
                        if s - 1 <= M <= hi:
                            grid.append((degs, hi_N if flip else lo_N, M, n, m))
                            flip ^= 1
    return grid
