"""Division, S-polynomials, Buchberger completion, membership and closure checks."""

from __future__ import annotations

import heapq
import operator
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    ContextMismatch,
    InputError,
    ShapeError,
    StepLimitExceeded,
    TermLimitExceeded,
)
from .ordering import (
    MonomialOrder,
    coprime,
    leading_monomial,
    monomial_divides,
    monomial_lcm,
    pairwise_coprime,
)
from .polyring import (
    Coefficient,
    Monomial,
    Polynomial,
    VarContext,
    common_context,
    embed,
    format_poly,
    homogenize,
    poly_to_json,
    substitute,
)

DEFAULT_MAX_STEPS = 10_000
DEFAULT_MAX_TERMS = 1_000_000


@dataclass(frozen=True)
class Limits:
    """Resource caps: S-pair reductions per completion and terms per intermediate polynomial."""

    max_steps: int = DEFAULT_MAX_STEPS
    max_terms: int = DEFAULT_MAX_TERMS
    parallel: bool = False


DEFAULT_LIMITS = Limits()


@dataclass
class DivisionResult:
    quotients: list[Polynomial]
    remainder: Polynomial


# ---------------------------------------------------------------------------
# reduction kernel


class _Reducer:
    """Monic divisors prepared for repeated reduction under a fixed order."""

    def __init__(self, divisors: Sequence[Polynomial], order: MonomialOrder, limits: Limits):
        self.order = order
        self.limits = limits
        self.lms: list[Monomial] = []
        self.lcs: list[Coefficient] = []
        self.tails: list[list[tuple[Monomial, Coefficient]]] = []
        for g in divisors:
            self.add(g)

    def add(self, g: Polynomial) -> None:
        if not g.terms:
            raise InputError("zero polynomial in the divisor list")
        lm, lc = leading_monomial(g, self.order)
        inv = lc.inverse()
        self.lms.append(lm)
        self.lcs.append(lc)
        self.tails.append([(e, c if lc.is_one() else c * inv) for e, c in g.terms.items() if e != lm])

    def reduce(self, terms: Mapping[Monomial, Coefficient], want_quotients: bool = False):
        key = self.order.key
        max_terms = self.limits.max_terms
        p = dict(terms)
        heap = [tuple(-x for x in key(e)) + (e,) for e in p]
        heapq.heapify(heap)
        rem: dict = {}
        quots: list[dict] | None = [dict() for _ in self.lms] if want_quotients else None
        lms, tails = self.lms, self.tails
        sub = operator.sub
        add = operator.add
        while heap:
            m = heapq.heappop(heap)[-1]
            c = p.pop(m, None)
            if c is None:
                continue
            for i, lm in enumerate(lms):
                if all(a <= b for a, b in zip(lm, m)):
                    break
            else:
                rem[m] = c
                continue
            shift = tuple(map(sub, m, lm))
            if quots is not None:
                quots[i][shift] = c
            for e, gc in tails[i]:
                ne = tuple(map(add, e, shift))
                prev = p.get(ne)
                delta = c * gc
                if prev is None:
                    p[ne] = -delta
                    heapq.heappush(heap, tuple(-x for x in key(ne)) + (ne,))
                else:
                    v = prev - delta
                    if v.num:
                        p[ne] = v
                    else:
                        del p[ne]
            if len(p) > max_terms:
                raise TermLimitExceeded(f"intermediate polynomial exceeded {max_terms} terms")
        return rem, quots


def _check_same_context(polys: Iterable[Polynomial], order: MonomialOrder) -> None:
    for p in polys:
        if p.ctx != order.ctx:
            raise ContextMismatch("polynomial context does not match the order")


def divide(
    f: Polynomial,
    divisors: Sequence[Polynomial],
    order: MonomialOrder,
    limits: Limits = DEFAULT_LIMITS,
) -> DivisionResult:
    """Multivariate division; each step uses the first divisor whose LM divides the current term."""
    _check_same_context([f, *divisors], order)
    red = _Reducer(divisors, order, limits)
    rem, quots = red.reduce(f.terms, want_quotients=True)
    ctx = f.ctx
    quotients = []
    for q, lc in zip(quots, red.lcs):
        inv = lc.inverse()
        quotients.append(Polynomial._raw(ctx, {e: c if lc.is_one() else c * inv for e, c in q.items()}))
    return DivisionResult(quotients, Polynomial._raw(ctx, rem))


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    if not f.terms or not g.terms:
        raise InputError("S-polynomial of a zero polynomial")
    _check_same_context([f, g], order)
    lf, cf = leading_monomial(f, order)
    lg, cg = leading_monomial(g, order)
    lcm = monomial_lcm(lf, lg)
    a = f.shift(tuple(map(operator.sub, lcm, lf)), cf.inverse())
    b = g.shift(tuple(map(operator.sub, lcm, lg)), cg.inverse())
    return a - b


def _monic(f: Polynomial, order: MonomialOrder) -> Polynomial:
    _, lc = leading_monomial(f, order)
    return f if lc.is_one() else f.scale(lc.inverse())


def _pair_remainder(args) -> bool:
    basis, i, j, order, limits = args
    s = s_polynomial(basis[i], basis[j], order)
    rem, _ = _Reducer(basis, order, limits).reduce(s.terms)
    return not rem


def is_groebner(
    basis: Sequence[Polynomial],
    order: MonomialOrder,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    """Buchberger's criterion: every S-pair reduces to zero.

    Pairs with coprime leading monomials are reduced as well rather than skipped.
    """
    basis = [g for g in basis]
    if any(not g.terms for g in basis):
        raise InputError("zero polynomial in basis")
    _check_same_context(basis, order)
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    if limits.parallel and len(pairs) > 1:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_pair_remainder, [(basis, i, j, order, limits) for i, j in pairs]))
        return all(results)
    red = _Reducer(basis, order, limits)
    for i, j in pairs:
        s = s_polynomial(basis[i], basis[j], order)
        rem, _ = red.reduce(s.terms)
        if rem:
            return False
    return True


def buchberger_complete(
    gens: Sequence[Polynomial],
    order: MonomialOrder,
    limits: Limits = DEFAULT_LIMITS,
) -> list[Polynomial]:
    """Interreduced Groebner basis; pairs chosen by smallest lcm (normal strategy).

    Pairs are discarded by the product criterion and the chain criterion.
    Each S-pair reduction counts as one step toward ``limits.max_steps``.
    """
    _check_same_context(gens, order)
    basis = [_monic(g, order) for g in gens if g.terms]
    if not basis:
        return []
    key = order.key
    red = _Reducer(basis, order, limits)
    lms = red.lms
    heap: list = []
    done: set[tuple[int, int]] = set()

    def push_pairs(j: int) -> None:
        for i in range(j):
            lcm = monomial_lcm(lms[i], lms[j])
            heapq.heappush(heap, (key(lcm), i, j, lcm))

    for j in range(1, len(basis)):
        push_pairs(j)
    steps = 0
    while heap:
        _, i, j, lcm = heapq.heappop(heap)
        done.add((i, j))
        if coprime(lms[i], lms[j]):
            continue
        if _chain_criterion(i, j, lcm, lms, done):
            continue
        steps += 1
        if steps > limits.max_steps:
            raise StepLimitExceeded(f"Buchberger completion exceeded {limits.max_steps} steps")
        s = s_polynomial(basis[i], basis[j], order)
        rem, _ = red.reduce(s.terms)
        if rem:
            g = _monic(Polynomial._raw(order.ctx, rem), order)
            basis.append(g)
            red.add(g)
            push_pairs(len(basis) - 1)
    return interreduce(basis, order, limits)


def _chain_criterion(i: int, j: int, lcm: Monomial, lms: Sequence[Monomial], done: set) -> bool:
    for k in range(len(lms)):
        if k == i or k == j:
            continue
        if not monomial_divides(lms[k], lcm):
            continue
        if (min(i, k), max(i, k)) in done and (min(j, k), max(j, k)) in done:
            return True
    return False


def interreduce(basis: Sequence[Polynomial], order: MonomialOrder, limits: Limits = DEFAULT_LIMITS) -> list[Polynomial]:
    """Minimal, tail-reduced, monic basis sorted by descending leading monomial."""
    polys = [_monic(g, order) for g in basis if g.terms]
    lms = [leading_monomial(g, order)[0] for g in polys]
    keep = []
    for i, lm in enumerate(lms):
        redundant = False
        for j, other in enumerate(lms):
            if j == i or not monomial_divides(other, lm):
                continue
            if other != lm or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(i)
    polys = [polys[i] for i in keep]
    out = []
    for i, g in enumerate(polys):
        others = polys[:i] + polys[i + 1 :]
        lm, lc = leading_monomial(g, order)
        tail = {e: c for e, c in g.terms.items() if e != lm}
        if others and tail:
            rem, _ = _Reducer(others, order, limits).reduce(tail)
        else:
            rem = tail
        rem[lm] = lc
        out.append(Polynomial._raw(order.ctx, rem))
    out.sort(key=lambda g: order.key(leading_monomial(g, order)[0]), reverse=True)
    return out


# ---------------------------------------------------------------------------
# membership


class GroebnerIdeal:
    """An ideal with its Groebner basis computed once for repeated membership tests."""

    def __init__(self, gens: Sequence[Polynomial], order: MonomialOrder, limits: Limits = DEFAULT_LIMITS):
        self.gens = list(gens)
        self.order = order
        self.limits = limits
        self.basis = buchberger_complete(self.gens, order, limits)
        self._reducer = _Reducer(self.basis, order, limits) if self.basis else None

    def reduce(self, f: Polynomial) -> Polynomial:
        if f.ctx != self.order.ctx:
            f = embed(f, self.order.ctx)
        if self._reducer is None:
            return f
        rem, _ = self._reducer.reduce(f.terms)
        return Polynomial._raw(f.ctx, rem)

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f).terms


def ideal_member(
    f: Polynomial,
    gens: Sequence[Polynomial],
    order: MonomialOrder,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    return GroebnerIdeal(gens, order, limits).contains(f)


def localized_ideal(
    gens: Sequence[Polynomial],
    inverted: Sequence[Polynomial],
    order: MonomialOrder | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> GroebnerIdeal:
    """Ideal of gens in the ring with each element of ``inverted`` made a unit.

    Each inverted s gets a fresh variable u and the relation u*s - 1; the
    fresh variables sit at the bottom of the priority.
    """
    polys = list(gens) + list(inverted)
    ctx = order.ctx if order is not None else common_context(polys)
    ctx = common_context([Polynomial.zero(ctx), *polys])
    names = []
    for k in range(len(inverted)):
        name = ctx.fresh_name(f"u{k + 1}")
        names.append(name)
        ctx = ctx.with_variables([name], block=max(ctx.blocks, default=0) + 1)
    base_order = order if order is not None else MonomialOrder.grlex(ctx)
    ext_order = base_order.extended(ctx)
    relations = []
    for name, s in zip(names, inverted):
        if not s.terms:
            raise InputError("cannot invert the zero polynomial")
        relations.append(Polynomial.var(ctx, name) * embed(s, ctx) - 1)
    return GroebnerIdeal([embed(g, ctx) for g in gens] + relations, ext_order, limits)


def ideal_member_localized(
    f: Polynomial,
    gens: Sequence[Polynomial],
    inverted: Sequence[Polynomial],
    order: MonomialOrder | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    if order is None:
        order = MonomialOrder.grlex(common_context([f, *gens, *inverted]))
    return localized_ideal(gens, inverted, order, limits).contains(f)


# ---------------------------------------------------------------------------
# projective closure


def random_ideal_elements(
    gens: Sequence[Polynomial],
    count: int,
    rng: random.Random,
    coeff_bound: int = 3,
) -> list[Polynomial]:
    """Sums r_i * g_i with random multipliers of degree <= 1 and small integer coefficients."""
    if not gens:
        return []
    ctx = gens[0].ctx
    out = []
    for _ in range(count):
        h = Polynomial.zero(ctx)
        for g in gens:
            r = Polynomial.constant(ctx, rng.randint(-coeff_bound, coeff_bound))
            v = ctx.variables[rng.randrange(ctx.nvars)]
            r = r + Polynomial.var(ctx, v).scale(rng.randint(-coeff_bound, coeff_bound))
            h = h + r * g
        out.append(h)
    return out


@dataclass
class SampleVerdict:
    poly: Polynomial
    passed: bool
    exponent: int | None


@dataclass
class ClosureReport:
    coprime: bool
    offending: tuple[int, int] | None
    homogenized: list[Polynomial]
    order: MonomialOrder
    samples: list[SampleVerdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.coprime and all(s.passed for s in self.samples)

    def to_json(self) -> dict:
        return {
            "coprime": self.coprime,
            "offending": list(self.offending) if self.offending else None,
            "homogenized": [format_poly(h, self.order) for h in self.homogenized],
            "samples": [{"poly": format_poly(s.poly), "pass": s.passed} for s in self.samples],
        }


def projective_closure_basis(
    gens: Sequence[Polynomial],
    order: MonomialOrder,
    samples: Sequence[Polynomial] = (),
    limits: Limits = DEFAULT_LIMITS,
    hom_name: str = "x0",
) -> ClosureReport:
    """Check the leading-monomial criterion for I^h = (f_1^h, ..., f_r^h) on samples.

    For each sample h in the affine ideal, searches the smallest e <= deg h
    with x0^e * h^h in the ideal of homogenized generators.
    """
    _check_same_context(gens, order)
    if order.hom_var is not None:
        raise InputError("closure checks take an affine graded order")
    for g in gens:
        if not g.terms or g.total_degree() < 1:
            raise InputError("closure generators must have degree >= 1")
    lms = [leading_monomial(g, order)[0] for g in gens]
    ok, offending = pairwise_coprime(lms)
    name = order.ctx.fresh_name(hom_name)
    block = max(order.ctx.blocks, default=-1) + 1
    homog = [homogenize(g, name, block) for g in gens]
    hctx = homog[0].ctx
    horder = order.extended(hctx, hom_var=name)
    report = ClosureReport(ok, offending, homog, horder)
    if not ok:
        return report
    ideal = GroebnerIdeal(homog, horder, limits)
    x0 = Polynomial.var(hctx, name)
    for h in samples:
        if h.ctx != order.ctx:
            raise ContextMismatch("sample context does not match the order")
        if not h.terms:
            report.samples.append(SampleVerdict(h, True, 0))
            continue
        hh = homogenize(h, name, block)
        found = None
        cur = hh
        for e in range(h.total_degree() + 1):
            if ideal.contains(cur):
                found = e
                break
            cur = cur * x0
        report.samples.append(SampleVerdict(h, found is not None, found))
    return report


# ---------------------------------------------------------------------------
# isomorphism chains


@dataclass
class SubstitutionStep:
    """Bindings v -> numerator / s^k send ``source`` to ``target``.

    After substituting, each image is multiplied by the smallest power of s
    that clears denominators, then divided by s as long as that is exact.
    Zeros are dropped and the results compared with ``target`` as multisets.
    """

    source: list[Polynomial]
    target: list[Polynomial]
    bindings: dict[str, tuple[Polynomial, int]]
    denominator: Polynomial | None = None
    label: str = "substitution"


@dataclass
class MembershipStep:
    """The ideals of ``left`` and ``right`` agree after inverting ``inverted``."""

    left: list[Polynomial]
    right: list[Polynomial]
    inverted: list[Polynomial] = field(default_factory=list)
    label: str = "membership"


def _strip_factor(f: Polynomial, s: Polynomial) -> Polynomial:
    if s.is_constant() or not f.terms:
        return f
    while True:
        q = f.exact_divide(s)
        if q is None:
            return f
        f = q


def apply_substitution_step(step: SubstitutionStep) -> list[Polynomial]:
    polys = list(step.source) + [p for p, _ in step.bindings.values()]
    if step.denominator is not None:
        polys.append(step.denominator)
    ctx = common_context(polys)
    uname = ctx.fresh_name("u_den")
    uctx = ctx.with_variables([uname])
    u = Polynomial.var(uctx, uname)
    s = embed(step.denominator, ctx) if step.denominator is not None else None
    images: dict[str, Polynomial] = {}
    for v, (num, k) in step.bindings.items():
        if k and s is None:
            raise InputError(f"binding for {v} has a denominator but none was declared")
        images[v] = embed(num, uctx) * u**k if k else embed(num, uctx)
    out = []
    for p in step.source:
        img = substitute(embed(p, uctx), {v: images[v] for v in images if v in p.ctx.var_index})
        img = embed(img, uctx)
        ui = uctx.var_index[uname]
        top = max((e[ui] for e in img.terms), default=0)
        cleared = Polynomial.zero(ctx)
        groups: dict[int, dict] = {}
        for e, c in img.terms.items():
            groups.setdefault(e[ui], {})[e[:ui] + e[ui + 1 :]] = c
        for k, terms in groups.items():
            piece = Polynomial._raw(ctx, terms)
            if top - k:
                piece = piece * s ** (top - k)
            cleared = cleared + piece
        if s is not None:
            cleared = _strip_factor(cleared, s)
        if cleared.terms:
            out.append(cleared)
    return out


def _multiset_equal(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> bool:
    a = [p for p in a if p.terms]
    b = [p for p in b if p.terms]
    if len(a) != len(b):
        return False
    ctx = common_context(a + b) if a else None
    if ctx is None:
        return True
    sa = sorted(format_poly(embed(p, ctx)) for p in a)
    sb = sorted(format_poly(embed(p, ctx)) for p in b)
    return sa == sb


def verify_iso_chain(
    steps: Sequence[SubstitutionStep | MembershipStep],
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[bool, list[str]]:
    log: list[str] = []
    ok = True
    for n, step in enumerate(steps, 1):
        if isinstance(step, SubstitutionStep):
            images = apply_substitution_step(step)
            good = _multiset_equal(images, step.target)
            log.append(f"step {n} [{step.label}] substitution: {'ok' if good else 'FAILED'}")
            if not good:
                log.append("  images: " + "; ".join(format_poly(p) for p in images))
        elif isinstance(step, MembershipStep):
            ctx = common_context(step.left + step.right + step.inverted)
            order = MonomialOrder.grlex(ctx)
            left = [embed(p, ctx) for p in step.left]
            right = [embed(p, ctx) for p in step.right]
            inv = [embed(p, ctx) for p in step.inverted]
            ideal_r = localized_ideal(right, inv, order, limits)
            fwd = all(ideal_r.contains(p) for p in left)
            ideal_l = localized_ideal(left, inv, order, limits)
            bwd = all(ideal_l.contains(p) for p in right)
            good = fwd and bwd
            log.append(
                f"step {n} [{step.label}] membership: left in right {'ok' if fwd else 'FAILED'}, "
                f"right in left {'ok' if bwd else 'FAILED'}"
            )
        else:
            raise ShapeError(f"unknown chain step {type(step).__name__}")
        ok = ok and good
    return ok, log
