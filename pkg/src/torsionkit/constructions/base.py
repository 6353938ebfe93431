"""Base hypersurfaces: g, f0, the N=3 family, the double cone, and the dispatcher."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..errors import PreconditionError, ShapeError
from ..ordering import MonomialOrder, leading_monomial, pairwise_coprime
from ..polyring import (
    Polynomial,
    VarContext,
    degrees,
    embed,
    format_poly,
    poly_to_json,
)


@dataclass
class GeneratedFamily:
    """Polynomials of one construction with the data needed to check its claims."""

    family: str
    params: dict[str, Any]
    polys: list[Polynomial]
    designated: str
    obstruction: Polynomial
    order: MonomialOrder
    declared_degrees: list[int]
    declared_blocks: list[tuple[int, ...]] | None = None
    claims_coprime: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def ctx(self) -> VarContext:
        return self.order.ctx

    def degree_report(self) -> list[int]:
        return [p.total_degree() for p in self.polys]

    def block_report(self) -> list[tuple]:
        tags = self.ctx.block_tags
        return [degrees(p).block_tuple(tags) for p in self.polys]

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [leading_monomial(p, self.order)[0] for p in self.polys]

    def coprime(self) -> tuple[bool, tuple[int, int] | None]:
        return pairwise_coprime(self.leading_monomials())

    def validate(self) -> list[str]:
        """Problems with the declared degrees or coprimality claim; empty when consistent."""
        problems = []
        if self.degree_report() != list(self.declared_degrees):
            problems.append(f"degrees {self.degree_report()} != declared {self.declared_degrees}")
        if self.declared_blocks is not None and self.block_report() != [tuple(b) for b in self.declared_blocks]:
            problems.append(f"block degrees {self.block_report()} != declared {self.declared_blocks}")
        if self.claims_coprime:
            ok, pair = self.coprime()
            if not ok:
                problems.append(f"leading monomials of polynomials {pair} share a variable")
        return problems

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "context": self.ctx.to_json(),
            "order": self.order.to_json(),
            "polys": [format_poly(p, self.order) for p in self.polys],
            "degrees": self.degree_report(),
            "designated": self.designated,
            "obstruction": format_poly(self.obstruction, self.order),
            "claims_coprime": self.claims_coprime,
            "notes": list(self.notes),
        }

    def to_json_full(self) -> dict:
        out = self.to_json()
        out["terms"] = [poly_to_json(p)["terms"] for p in self.polys]
        return out


# ---------------------------------------------------------------------------
# small helpers shared by the construction modules


def x_names(count: int, stem: str = "x", start: int = 1) -> list[str]:
    return [f"{stem}{i}" for i in range(start, start + count)]


def lift_all(polys: Sequence[Polynomial], ctx: VarContext) -> list[Polynomial]:
    return [embed(p, ctx) for p in polys]


def add_variable(ctx: VarContext, name: str, block: int | None = None) -> VarContext:
    if ctx.has(name):
        raise PreconditionError(f"name {name!r} is already used in the context")
    return ctx.with_variables([name], block)


def add_param(ctx: VarContext, stem: str) -> tuple[VarContext, str]:
    name = ctx.fresh_name(stem)
    return ctx.with_params([name]), name


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionError(message)


# ---------------------------------------------------------------------------
# g and f0


def build_g(n: int, m: int, ctx: VarContext | None = None) -> Polynomial:
    """pi*(1 + sum x_i^e)^m - (-1)^n x_1...x_n with e = ceil((n+1)/m)."""
    _require(n >= 2 and m >= 2, "build_g needs n >= 2 and m >= 2")
    if ctx is None:
        ctx = VarContext.create(x_names(n), ["pi"])
    e = ceil_div(n + 1, m)
    xs = [Polynomial.var(ctx, f"x{i}") for i in range(1, n + 1)]
    inner = Polynomial.one(ctx)
    for x in xs:
        inner = inner + x**e
    prod = Polynomial.one(ctx)
    for x in xs:
        prod = prod * x
    return Polynomial.param(ctx, "pi") * inner**m - prod.scale((-1) ** n)


def c_coefficient(j: int, n: int, ctx: VarContext) -> Polynomial:
    """c_j from the binary digits of j, with c_1 = x_1."""
    if j == 1:
        return Polynomial.var(ctx, "x1")
    out = Polynomial.one(ctx)
    for i in range(n):
        if (j >> i) & 1:
            out = out * (-Polynomial.var(ctx, f"x{i + 1}"))
    return out


def build_f0(n: int, m: int, N: int) -> GeneratedFamily:
    _require(n >= 2 and m >= 2, "f0 needs n >= 2 and m >= 2")
    _require(n + 1 <= N <= n + 2**n - 2, f"f0 needs n+1 <= N <= n+2^n-2, got N={N}")
    ctx = VarContext.create(x_names(N) + ["z"], ["pi"])
    f = build_g(n, m, ctx)
    for j in range(1, N - n + 1):
        f = f + c_coefficient(j, n, ctx) * Polynomial.var(ctx, f"x{n + j}", m)
    mono = Polynomial.one(ctx)
    for i in range(1, n + 1):
        mono = mono * Polynomial.var(ctx, f"x{i}")
    f = f + mono.scale((-1) ** n) * Polynomial.var(ctx, "z", m)
    return GeneratedFamily(
        "F0",
        {"n": n, "m": m, "N": N},
        [f],
        "z",
        Polynomial.one(ctx),
        MonomialOrder.grlex(ctx),
        [n + m],
    )


def build_base_n3(d: int, m: int) -> GeneratedFamily:
    _require(m >= 2, "base_n3 needs m >= 2")
    _require(d >= 2 + m, f"base_n3 needs d >= m+2, got d={d}, m={m}")
    ctx = VarContext.create(["x1", "x2", "x3", "z"], ["pi", "rho"])
    x1, x2, x3, z = (Polynomial.var(ctx, v) for v in ("x1", "x2", "x3", "z"))
    e = ceil_div(3, m)
    f = (
        Polynomial.param(ctx, "rho") * x3**d
        + Polynomial.param(ctx, "pi") * (1 + x1**e + x2**e) ** m
        - x1 * x2
        + x1 * x3**m
        + x1 * x2 * z**m
    )
    return GeneratedFamily(
        "BASE_N3", {"d": d, "m": m}, [f], "z", Polynomial.one(ctx), MonomialOrder.grlex(ctx), [d]
    )


# ---------------------------------------------------------------------------
# double cone


@dataclass
class DoubleConeForm:
    b: Polynomial
    a: list[Polynomial]
    degree: int


def recognize_double_cone_form(f: Polynomial, j0: str, z: str, m: int, check_degrees: bool = True) -> DoubleConeForm:
    """Split f as b*z^m + sum a_i x_j0^i with b, a_i free of x_j0 and a_i free of z."""
    ctx = f.ctx
    if j0 not in ctx.var_index or z not in ctx.var_index:
        raise ShapeError(f"variables {j0!r} and {z!r} must both be present")
    ji, zi = ctx.var_index[j0], ctx.var_index[z]
    b_terms: dict = {}
    a_terms: list[dict] = [dict() for _ in range(m + 1)]
    for e, c in f.terms.items():
        if e[zi] == m and e[ji] == 0:
            ne = list(e)
            ne[zi] = 0
            b_terms[tuple(ne)] = c
        elif e[zi] == 0 and e[ji] <= m:
            ne = list(e)
            k = ne[ji]
            ne[ji] = 0
            a_terms[k][tuple(ne)] = c
        else:
            raise ShapeError(f"term with exponents {e} does not fit b*z^m + sum a_i*{j0}^i")
    if not b_terms:
        raise ShapeError("no z^m part found")
    b = Polynomial._raw(ctx, b_terms)
    a = [Polynomial._raw(ctx, t) for t in a_terms]
    d = f.total_degree()
    if check_degrees:
        if 2 * m > d:
            raise PreconditionError(f"double cone needs 2m <= d, got m={m}, d={d}")
        if b.total_degree() != d - m:
            raise PreconditionError(f"deg b = {b.total_degree()} but d - m = {d - m}")
        for i, ai in enumerate(a):
            if ai.terms and ai.total_degree() > d - 2 * i:
                raise PreconditionError(f"deg a_{i} = {ai.total_degree()} exceeds d - 2i = {d - 2 * i}")
    return DoubleConeForm(b, a, d)


def double_cone(
    f: Polynomial,
    j0: str,
    z: str,
    m: int,
    w_name: str = "w0",
    lam_stem: str = "lambda",
    t_stem: str = "t",
) -> Polynomial:
    """b z^m + sum a_i (w0 x_j0 - 1/lambda)^i + w0 + t*lambda*x_j0 in the extended context."""
    form = recognize_double_cone_form(f, j0, z, m)
    ctx = add_variable(f.ctx, w_name)
    ctx, lam = add_param(ctx, lam_stem)
    ctx, t = add_param(ctx, t_stem)
    w = Polynomial.var(ctx, w_name)
    x = Polynomial.var(ctx, j0)
    L = Polynomial.param(ctx, lam)
    shift = w * x - Polynomial.constant(ctx, ctx.field.param(ctx.param_index[lam]).inverse())
    out = embed(form.b, ctx) * Polynomial.var(ctx, z, m)
    power = Polynomial.one(ctx)
    for i, ai in enumerate(form.a):
        if i:
            power = power * shift
        if ai.terms:
            out = out + embed(ai, ctx) * power
    return out + w + Polynomial.param(ctx, t) * L * x


def double_cone_budget(n: int, m: int) -> int:
    """Number of admissible double-cone steps starting from f0 at N = n + 2^n - 2."""
    _require(n >= 2 and m >= 2, "double_cone_budget needs n, m >= 2")
    by_popcount = sum((n - bin(j).count("1")) // m for j in range(1, 2**n - 1))
    by_binomial = sum(math.comb(n, l) * (l // m) for l in range(n))
    if by_popcount != by_binomial:
        raise AssertionError(f"double cone counts disagree at n={n}, m={m}")
    return by_binomial


def double_cone_schedule(n: int, m: int) -> list[int]:
    """Indices j (for j0 = x_{n+j}) in application order, one entry per double cone."""
    out = []
    for j in range(1, 2**n - 1):
        out.extend([j] * ((n - bin(j).count("1")) // m))
    return out


def f0_with_double_cones(n: int, m: int, N: int) -> GeneratedFamily:
    """Degree n+m hypersurface in x_1..x_N, z for n+1 <= N <= n+2^n-2+budget."""
    top = n + 2**n - 2
    budget = double_cone_budget(n, m)
    _require(n + 1 <= N <= top + budget, f"need n+1 <= N <= {top + budget}, got {N}")
    fam = build_f0(n, m, min(N, top))
    f = fam.polys[0]
    l = fam.obstruction
    schedule = double_cone_schedule(n, m)[: max(0, N - top)]
    for k, j in enumerate(schedule):
        new = f"x{top + k + 1}"
        f = double_cone(f, f"x{n + j}", "z", m, w_name=new)
        l = embed(l, f.ctx) * Polynomial.var(f.ctx, new)
    ctx = f.ctx
    return GeneratedFamily(
        "F0_DOUBLE_CONE" if schedule else "F0",
        {"n": n, "m": m, "N": N, "double_cones": len(schedule)},
        [f],
        "z",
        embed(l, ctx),
        MonomialOrder.grlex(ctx),
        [n + m],
    )


def base_hypersurface_bound(n: int, m: int) -> int:
    """Largest x-variable count reachable with witness n (z not counted)."""
    return n + 2**n - 2 + double_cone_budget(n, m)


def choose_base_n(n_vars: int, m: int, n_max: int | None = None) -> int:
    """Smallest n >= 2 whose base family reaches ``n_vars`` x-variables."""
    n = 2
    while base_hypersurface_bound(n, m) < n_vars:
        n += 1
        if n_max is not None and n > n_max:
            raise PreconditionError(f"{n_vars} variables exceed the bound for n <= {n_max}")
    return n


def base_hypersurface(N_total: int, d: int, n: int, m: int) -> GeneratedFamily:
    """Irreducible degree-d hypersurface in N_total variables (x_1.., z) with designated z.

    ``n`` caps the witness used to reach the variable count; the smallest
    sufficient witness is chosen.
    """
    from .addhypers import build_check_f

    _require(n >= 2 and m >= 2, "base hypersurface needs n, m >= 2")
    _require(d >= n + m, f"base hypersurface needs d >= n+m, got d={d}")
    n_vars = N_total - 1
    _require(3 <= n_vars <= base_hypersurface_bound(n, m), f"base hypersurface needs 4 <= N <= {base_hypersurface_bound(n, m) + 1}")
    if n_vars == 3:
        fam = build_base_n3(d, m)
        fam.params.update({"N": N_total})
        return fam
    n0 = choose_base_n(n_vars, m)
    if d == n0 + m:
        fam = f0_with_double_cones(n0, m, n_vars)
        fam.params.update({"N": N_total, "d": d})
        return fam
    inner = f0_with_double_cones(n0, m, n_vars - 1)
    f = build_check_f(inner.polys[0], d - n0 - m, 1, wnames=[f"x{n_vars}"])
    ctx = f.ctx
    return GeneratedFamily(
        "BASE_CHECK_F",
        {"n": n0, "m": m, "N": N_total, "d": d},
        [f],
        "z",
        embed(inner.obstruction, ctx),
        MonomialOrder.grlex(ctx),
        [d],
        notes=[f"degree raised from {n0 + m} to {d} with one added variable"],
    )


# ---------------------------------------------------------------------------
# recipes


FAMILIES = (
    "G",
    "F0",
    "BASE_N3",
    "DOUBLE_CONE",
    "STEP1",
    "STEP2",
    "STEP2_ALT_M2",
    "CHECK_F",
    "CI_CASE_A",
    "CI_CASE_B",
    "CI_CASE_C",
    "CI_LOW_INDEX_A",
    "CI_LOW_INDEX_B",
    "CI_LOW_INDEX_C",
    "PRODUCT_HYP",
    "HPT_QUARTIC",
    "HPT_QUADRICS",
    "HPT_CHART",
    "CI_23",
    "CI_33",
)


@dataclass
class ConstructionRecipe:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    choices: dict[str, str | None] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise PreconditionError(f"unknown family {self.family!r}")

    def to_json(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "choices": {"h": None, "g": None, **self.choices}}

    @classmethod
    def from_json(cls, obj: dict) -> "ConstructionRecipe":
        return cls(obj["family"], dict(obj.get("params", {})), dict(obj.get("choices", {})))
