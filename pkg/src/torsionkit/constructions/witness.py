"""Rational-point witnesses: a substitution that leaves one linear equation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import InputError, PreconditionError, ShapeError
from ..polyring import (
    Param,
    Polynomial,
    VarContext,
    common_context,
    embed,
    format_poly,
    parse_poly,
    partial_derivative,
    substitute,
)
from .base import build_f0, ceil_div
from .fixed import ci23_pair, hpt_chart_quadrics, hpt_quartic


@dataclass
class WitnessCheck:
    """Targets, an ordered list of bindings, elements that must stay invertible, and the solved variable."""

    targets: list[Polynomial]
    bindings: list[tuple[str, Polynomial]]
    inverted: list[Polynomial]
    variable: str
    q_param: str = "q"
    label: str = ""

    def validate(self) -> None:
        bound: list[str] = []
        for v, val in self.bindings:
            if v in bound:
                raise PreconditionError(f"variable {v} is bound twice")
            bound.append(v)
            for earlier in bound:
                if earlier in val.variables_used():
                    raise PreconditionError(f"binding for {v} uses the already bound variable {earlier}")
        if self.variable in bound:
            raise PreconditionError("the solved variable must stay free")
        params = {p.name for t in self.targets for p in t.ctx.params}
        if self.q_param not in params:
            raise PreconditionError(f"the shift {self.q_param!r} is not a declared parameter")


@dataclass
class WitnessResult:
    ok: bool
    residual: Polynomial | None
    solution: Polynomial | None = None
    reasons: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "residual": None if self.residual is None else format_poly(self.residual),
            "solution": None if self.solution is None else format_poly(self.solution),
            "reasons": list(self.reasons),
        }


def check_star_witness(wc: WitnessCheck) -> WitnessResult:
    """Apply the bindings in order and accept a single residual a*v + b with a a nonzero constant."""
    wc.validate()
    ctx = common_context(list(wc.targets) + list(wc.inverted) + [val for _, val in wc.bindings])
    targets = [embed(t, ctx) for t in wc.targets]
    inverted = [embed(t, ctx) for t in wc.inverted]
    for v, val in wc.bindings:
        val = embed(val, ctx)
        try:
            targets = [substitute(t, {v: val}) for t in targets]
            inverted = [substitute(t, {v: val}) for t in inverted]
        except InputError as exc:
            raise ShapeError(f"binding {v} could not be applied: {exc}") from exc
    residuals = [t for t in targets if not t.is_zero()]
    reasons: list[str] = []
    if len(residuals) != 1:
        reasons.append(f"expected one nonzero residual, found {len(residuals)}")
        return WitnessResult(False, residuals[0] if residuals else None, None, reasons)
    (res,) = residuals
    extra = res.variables_used() - {wc.variable}
    if extra:
        reasons.append(f"residual involves {sorted(extra)}")
    if res.degree_in(wc.variable) != 1 or res.total_degree() != 1:
        reasons.append("residual is not of degree one in the solved variable")
    if reasons:
        return WitnessResult(False, res, None, reasons)
    i = ctx.var_index[wc.variable]
    lead = next(c for e, c in res.terms.items() if e[i] == 1)
    const = res.constant_term()
    if lead.is_zero():
        return WitnessResult(False, res, None, ["vanishing leading coefficient"])
    root = Polynomial.constant(ctx, -const / lead)
    for t in inverted:
        if substitute(t, {wc.variable: root}).is_zero():
            reasons.append(f"inverted element {format_poly(t)} vanishes at the solution")
    return WitnessResult(not reasons, res, root, reasons)


# ---------------------------------------------------------------------------
# the witnesses used for the base families


def _with_q(ctx: VarContext, extra: Sequence[Param | str] = ()) -> VarContext:
    return ctx.with_params(list(extra) + ["q"])


def f0_witness(n: int, m: int, N: int | None = None) -> WitnessCheck:
    """x2 = zeta x1, x3 = ... = x_{n+1} = 1, z = 1 with zeta^ceil((n+1)/m) = -1."""
    N = n + 1 if N is None else N
    fam = build_f0(n, m, N)
    e = ceil_div(n + 1, m)
    if e == 1:
        ctx = _with_q(fam.ctx)
        zeta = Polynomial.constant(ctx, -1)
    else:
        ctx = _with_q(fam.ctx, [Param("zeta", (e, -1))])
        zeta = Polynomial.param(ctx, "zeta")
    f0 = embed(fam.polys[0], ctx)
    q = Polynomial.param(ctx, "q")
    x = lambda i: Polynomial.var(ctx, f"x{i}")  # noqa: E731
    one = Polynomial.one(ctx)
    bindings = [("x2", zeta * x(1))] + [(f"x{i}", one) for i in range(3, n + 2)]
    bindings += [(f"x{i}", Polynomial.zero(ctx)) for i in range(n + 2, N + 1)]
    bindings.append(("z", one))
    return WitnessCheck([f0 + q], bindings, [partial_derivative(f0, "z")], "x1", label=f"f0 n={n} m={m} N={N}")


def quartic_witness() -> WitnessCheck:
    """x2 = 1 - x1, z1 = 1, z2 = 0, z3 = 2."""
    fam = hpt_quartic()
    ctx = _with_q(fam.ctx)
    f = embed(fam.polys[0], ctx)
    P = lambda t: parse_poly(t, ctx)  # noqa: E731
    bindings = [("x2", P("1 - x1")), ("z1", P("1")), ("z2", P("0")), ("z3", P("2"))]
    return WitnessCheck([f + P("q")], bindings, [P("2*x1*x2*z3")], "x1", label="quartic")


def ci23_witness() -> WitnessCheck:
    """z3 = alpha, x2 = x3, x1 = x2 + 1, z1 = sqrt(-1) x3, z2 = 2."""
    fam = ci23_pair()
    ctx = _with_q(fam.ctx, [Param("i", (2, -1)), "alpha"])
    f1, f2 = (embed(p, ctx) for p in fam.polys)
    P = lambda t: parse_poly(t, ctx)  # noqa: E731
    bindings = [
        ("x1", P("x2 + 1")),
        ("x2", P("x3")),
        ("z1", P("i*x3")),
        ("z2", P("2")),
        ("z3", P("alpha")),
    ]
    return WitnessCheck([f1 + P("q"), f2], bindings, [P("x1*x2*z3")], "x3", label="(2,3)")


def chart_witness() -> WitnessCheck:
    """Solve q1, q3 for x4, x1, then x2 = x3 = x7 = 1, x5 = 0."""
    fam = hpt_chart_quadrics()
    ctx = _with_q(fam.ctx)
    q1, q2, q3 = (embed(p, ctx) for p in fam.polys)
    P = lambda t: parse_poly(t, ctx)  # noqa: E731
    bindings = [
        ("x4", P("2*x5^2 + x6*x5 - x3^2")),
        ("x1", P("x5^2 + x7^2 + x6*x7")),
        ("x2", P("1")),
        ("x3", P("1")),
        ("x5", P("0")),
        ("x7", P("1")),
    ]
    return WitnessCheck([q1, q2 + P("q"), q3], bindings, [P("2*x2")], "x6", label="three quadrics")


WITNESSES = {
    "f0": f0_witness,
    "quartic": quartic_witness,
    "ci23": ci23_witness,
    "chart": chart_witness,
}
