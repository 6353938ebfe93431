"""Graded monomial orders with a configurable variable priority."""

from __future__ import annotations

import enum
from typing import Mapping, Sequence

from .errors import ContextMismatch, InputError, UndeclaredIdentifier
from .polyring import Coefficient, Monomial, Polynomial, VarContext


class Cmp(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


class MonomialOrder:
    """Total degree first, then lexicographic along ``priority`` (index 0 highest).

    With ``hom_var`` set, ties in total degree are broken first by the degree
    in the remaining variables.  On homogenized polynomials this reproduces the
    affine order, so the leading monomial of f^h is the leading monomial of f
    times a power of the homogenizing variable.
    """

    __slots__ = ("ctx", "priority", "hom_var", "_hom_index")

    def __init__(self, ctx: VarContext, priority: Sequence[int], hom_var: str | None = None):
        priority = tuple(int(i) for i in priority)
        if sorted(priority) != list(range(ctx.nvars)):
            raise InputError("priority must be a permutation of the variable indices")
        self.ctx = ctx
        self.priority = priority
        self.hom_var = hom_var
        self._hom_index = None if hom_var is None else ctx.var_index[hom_var]

    # constructors --------------------------------------------------------
    @classmethod
    def grlex(cls, ctx: VarContext) -> "MonomialOrder":
        return cls(ctx, range(ctx.nvars))

    @classmethod
    def from_names(cls, ctx: VarContext, names: Sequence[str], hom_var: str | None = None) -> "MonomialOrder":
        """Order with the named variables first (in the given order), the rest after in context order."""
        try:
            head = [ctx.var_index[n] for n in names]
        except KeyError as exc:
            raise UndeclaredIdentifier(f"unknown variable {exc.args[0]!r} in priority") from None
        if len(set(head)) != len(head):
            raise InputError("priority lists a variable twice")
        rest = [i for i in range(ctx.nvars) if i not in set(head)]
        return cls(ctx, head + rest, hom_var)

    def extended(self, ctx: VarContext, hom_var: str | None = None) -> "MonomialOrder":
        """Same priority on the old variables; new variables appended lowest."""
        names = [self.ctx.variables[i] for i in self.priority]
        return MonomialOrder.from_names(ctx, names, hom_var if hom_var is not None else self.hom_var)

    # comparison ----------------------------------------------------------
    def key(self, a: Monomial) -> tuple:
        total = sum(a)
        lead = [total]
        if self._hom_index is not None:
            lead.append(total - a[self._hom_index])
        return tuple(lead) + tuple(a[i] for i in self.priority)

    def compare(self, a: Monomial, b: Monomial) -> Cmp:
        if len(a) != self.ctx.nvars or len(b) != self.ctx.nvars:
            raise ContextMismatch("monomial arity does not match the order")
        ka, kb = self.key(a), self.key(b)
        return Cmp.GT if ka > kb else Cmp.LT if ka < kb else Cmp.EQ

    def priority_names(self) -> list[str]:
        return [self.ctx.variables[i] for i in self.priority]

    def to_json(self) -> dict:
        out: dict = {"priority": self.priority_names()}
        if self.hom_var is not None:
            out["hom_var"] = self.hom_var
        return out

    @classmethod
    def from_json(cls, obj: Mapping, ctx: VarContext) -> "MonomialOrder":
        names = obj.get("priority")
        if names is None:
            return cls.grlex(ctx)
        if sorted(names) != sorted(ctx.variables):
            raise InputError("order priority must list every variable exactly once")
        return cls.from_names(ctx, names, obj.get("hom_var"))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonomialOrder)
            and self.ctx == other.ctx
            and self.priority == other.priority
            and self.hom_var == other.hom_var
        )

    def __hash__(self) -> int:
        return hash((self.ctx, self.priority, self.hom_var))

    def __repr__(self) -> str:
        return f"MonomialOrder({' > '.join(self.priority_names())})"


def compare(order: MonomialOrder, a: Monomial, b: Monomial) -> Cmp:
    return order.compare(a, b)


def leading_monomial(f: Polynomial, order: MonomialOrder) -> tuple[Monomial, Coefficient]:
    if not f.terms:
        raise InputError("the zero polynomial has no leading monomial")
    if f.ctx != order.ctx:
        raise ContextMismatch("order context does not match polynomial")
    m = max(f.terms, key=order.key)
    return m, f.terms[m]


def monomial_gcd(a: Monomial, b: Monomial) -> Monomial:
    if len(a) != len(b):
        raise ContextMismatch("monomial arity mismatch")
    return tuple(min(x, y) for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    if len(a) != len(b):
        raise ContextMismatch("monomial arity mismatch")
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def coprime(a: Monomial, b: Monomial) -> bool:
    return not any(x and y for x, y in zip(a, b))


def pairwise_coprime(lms: Sequence[Monomial]) -> tuple[bool, tuple[int, int] | None]:
    """Whether every pair of monomials is coprime; otherwise the first offending index pair."""
    for i in range(len(lms)):
        for j in range(i + 1, len(lms)):
            if len(lms[i]) != len(lms[j]):
                raise ContextMismatch("monomial arity mismatch")
            if not coprime(lms[i], lms[j]):
                return False, (i, j)
    return True, None
