"""Fixed examples built from the special quartic fourfold, and their isomorphism chains."""

from __future__ import annotations

from ..errors import InputError
from ..groebner import MembershipStep, SubstitutionStep
from ..ordering import MonomialOrder
from ..polyring import Polynomial, VarContext, parse_poly
from .base import GeneratedFamily

QUARTIC_VARS = ("x1", "x2", "z1", "z2", "z3")
QUADRIC_VARS = ("y1", "y2", "z1", "z2", "z3", "z4", "z5")
CHART_VARS = tuple(f"x{i}" for i in range(1, 8))
CI23_VARS = ("x1", "x2", "x3", "z1", "z2", "z3")
CI33_VARS = ("x1", "x2", "x3", "x4", "z1", "z2", "z3")

# 1 + x1^2 + x2^2 - 2x1 - 2x2 - 2x1x2
_TAIL = "1 + x1^2 + x2^2 - 2*x1 - 2*x2 - 2*x1*x2"
QUARTIC = f"x1*z1^2 + x2*z2^2 + x1*x2*z3^2 + {_TAIL}"
P1 = "-y1 + z2^2 + z3*z4 - 2"
P2 = "y1 + y2*z3 + z1^2 - 2"
P3 = "y1*z5 - y2*z4 + 1 + z5^2"
Q1 = "-x6*x5 + x3^2 + x4 - 2*x5^2"
Q2 = "x6*x5 + x1*x4 + x2^2 - 2*x5^2"
Q3 = "x6*x7 - x1 + x5^2 + x7^2"
F1_23 = "x3 - z3^2"
F2_23 = f"x1*z1^2 + x2*z2^2 + x1*x2*x3 + {_TAIL}"


def _ctx(names, params=()) -> VarContext:
    return VarContext.create(list(names), list(params))


def _polys(ctx: VarContext, *texts: str) -> list[Polynomial]:
    return [parse_poly(t, ctx) for t in texts]


def _family(name, ctx, polys, designated, obstruction, priority=None, coprime=False) -> GeneratedFamily:
    order = MonomialOrder.grlex(ctx) if priority is None else MonomialOrder.from_names(ctx, priority)
    return GeneratedFamily(
        name,
        {},
        polys,
        designated,
        parse_poly(obstruction, ctx),
        order,
        [p.total_degree() for p in polys],
        claims_coprime=coprime,
    )


def hpt_quartic() -> GeneratedFamily:
    ctx = _ctx(QUARTIC_VARS)
    return _family("HPT_QUARTIC", ctx, _polys(ctx, QUARTIC), "z3", "x1*x2*z1*z2*z3")


def hpt_quadrics() -> GeneratedFamily:
    ctx = _ctx(QUADRIC_VARS)
    return _family("HPT_QUADRICS", ctx, _polys(ctx, P1, P2, P3), "z3", "z3")


def hpt_chart_quadrics() -> GeneratedFamily:
    ctx = _ctx(CHART_VARS)
    priority = ["x2", "x3", "x4", "x5", "x6", "x7", "x1"]
    return _family("HPT_CHART", ctx, _polys(ctx, Q1, Q2, Q3), "x2", "x2*x4*x5", priority, coprime=True)


def ci23_pair() -> GeneratedFamily:
    ctx = _ctx(CI23_VARS)
    return _family("CI_23", ctx, _polys(ctx, F1_23, F2_23), "z3", "x1*x2*z1*z2*z3")


def ci33_pair() -> GeneratedFamily:
    ctx = _ctx(CI33_VARS, ["t"])
    c1 = parse_poly(f"t - x4*({F1_23} + x4)", ctx)
    (c2,) = _polys(ctx, F2_23)
    priority = list(CI33_VARS)
    return _family("CI_33", ctx, [c1, c2], "z1", "x1*x2*z1*z3", priority, coprime=True)


FIXED = {
    "HPT_QUARTIC": hpt_quartic,
    "HPT_QUADRICS": hpt_quadrics,
    "HPT_CHART": hpt_chart_quadrics,
    "CI_23": ci23_pair,
    "CI_33": ci33_pair,
}


def fixed_example(name: str) -> GeneratedFamily:
    try:
        return FIXED[name.upper()]()
    except KeyError:
        raise InputError(f"unknown fixed example {name!r}; expected one of {sorted(FIXED)}") from None


# ---------------------------------------------------------------------------
# isomorphism chains

_CHAIN_VARS = QUADRIC_VARS + ("x1", "x2")


def hpt_birational_chain() -> list[SubstitutionStep | MembershipStep]:
    """Three quadrics to the quartic, with z3 inverted throughout."""
    ctx = _ctx(_CHAIN_VARS)
    P = (
        "z3*((z2^2 + z3*z4 - 2)*z5 + 1 + z5^2) + (z1^2 + z2^2 + z3*z4 - 4)*z4"
    )
    p1, p2, p3, pp, f, z3 = _polys(ctx, P1, P2, P3, P, QUARTIC, "z3")
    y1_val, y2_num = _polys(ctx, "z2^2 + z3*z4 - 2", "4 - z1^2 - z2^2 - z3*z4")
    e1, e2 = _polys(ctx, "y1 - (z2^2 + z3*z4 - 2)", "z3*y2 + z1^2 + z2^2 + z3*z4 - 4")
    l1, l2 = _polys(ctx, "x1*z3 - z4", "x2 - x1 - z5")
    z4_val, z5_val = _polys(ctx, "x1*z3", "x2 - x1")
    return [
        SubstitutionStep([p1, p2, p3], [pp], {"y1": (y1_val, 0), "y2": (y2_num, 1)}, z3, "eliminate y1, y2"),
        MembershipStep([p1, p2, p3], [e1, e2, pp], [z3], "solve p1, p2 for y1, y2"),
        SubstitutionStep([pp], [f], {"z4": (z4_val, 0), "z5": (z5_val, 0)}, z3, "z4 = x1 z3, z5 = x2 - x1"),
        MembershipStep([pp, l1, l2], [f, l1, l2], [z3], "introduce x1, x2"),
        MembershipStep([p1, p2, p3, l1, l2], [f, e1, e2, l1, l2], [z3], "end to end"),
    ]


def hpt_chart_chain() -> list[SubstitutionStep | MembershipStep]:
    """The three quadrics against their chart where z4 is inverted."""
    ctx = _ctx(QUADRIC_VARS + CHART_VARS)
    p1, p2, p3, q1, q2, q3 = _polys(ctx, P1, P2, P3, Q1, Q2, Q3)
    x5, z4 = _polys(ctx, "x5", "z4")
    forward = {
        "z4": "1",
        "y2": "x1",
        "z1": "x2",
        "z2": "x3",
        "z3": "x4",
        "y1": "x6",
        "z5": "x7",
    }
    backward = {
        "x1": "y2",
        "x2": "z1",
        "x3": "z2",
        "x4": "z3",
        "x5": "1",
        "x6": "y1",
        "x7": "z5",
    }
    fwd = {v: (parse_poly(t, ctx), 1) for v, t in forward.items()}
    bwd = {v: (parse_poly(t, ctx), 1) for v, t in backward.items()}
    graph = [
        parse_poly(t, ctx)
        for t in ("x5*z4 - 1", "x1*z4 - y2", "x2*z4 - z1", "x3*z4 - z2", "x4*z4 - z3", "x6*z4 - y1", "x7*z4 - z5")
    ]
    return [
        SubstitutionStep([p1, p2, p3], [q1, q2, q3], fwd, x5, "p to q"),
        SubstitutionStep([q1, q2, q3], [p1, p2, p3], bwd, z4, "q to p"),
        MembershipStep([p1, p2, p3] + graph, [q1, q2, q3] + graph, [z4], "graph of the chart"),
    ]
