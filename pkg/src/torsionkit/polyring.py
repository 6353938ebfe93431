"""Sparse multivariate polynomials over a field of rational functions in named parameters.

A :class:`VarContext` fixes the variables (each with a block tag) and the
parameters.  Parameters are either transcendental or algebraic with a single
rewrite rule ``zeta^e -> c`` for a rational constant ``c``.  Coefficients are
fractions of integer polynomials in the parameters, kept in a canonical form
(content reduced, common monomial factors cancelled, leading coefficient of
the denominator positive under grlex on the parameters).

Polynomials are immutable maps from exponent tuples to nonzero coefficients.
"""

from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    CoefficientDivisionByZero,
    ContextMismatch,
    ExponentOverflow,
    InputError,
    ParseError,
    UndeclaredIdentifier,
)

MAX_EXPONENT = 2**63 - 1
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Monomial = tuple[int, ...]
ParamPoly = dict[tuple[int, ...], int]


# ---------------------------------------------------------------------------
# integer polynomials in the parameters


def _pp_key(e: tuple[int, ...]) -> tuple:
    return (sum(e), e)


def _pp_add(a: Mapping, b: Mapping, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _pp_mul(a: Mapping, b: Mapping) -> dict:
    if len(a) == 1 and len(b) == 1:
        (ea, ca), = a.items()
        (eb, cb), = b.items()
        return {tuple(map(operator.add, ea, eb)): ca * cb}
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(map(operator.add, ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _pp_content(a: Mapping) -> int:
    g = 0
    for c in a.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _pp_lead(a: Mapping) -> tuple[int, ...]:
    return max(a, key=_pp_key)


def _pp_divexact(a: Mapping, b: Mapping) -> dict | None:
    """Return a/b if b divides a over the integers, else None."""
    lb = _pp_lead(b)
    cb = b[lb]
    rem = dict(a)
    quo: dict = {}
    while rem:
        la = _pp_lead(rem)
        if any(x < y for x, y in zip(la, lb)):
            return None
        ca = rem[la]
        if ca % cb:
            return None
        qe = tuple(x - y for x, y in zip(la, lb))
        qc = ca // cb
        quo[qe] = qc
        rem = _pp_add(rem, _pp_mul({qe: qc}, b), -1)
    return quo


def _pp_eval_mod(a: Mapping, point: Sequence[int], p: int) -> int:
    total = 0
    for e, c in a.items():
        v = c % p
        for x, k in zip(point, e):
            if k:
                v = v * pow(x, k, p) % p
        total += v
    return total % p


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class Param:
    """A coefficient parameter; ``rewrite=(e, c)`` imposes ``name^e = c``."""

    name: str
    rewrite: tuple[int, Fraction] | None = None

    def __post_init__(self) -> None:
        if not _IDENT.match(self.name):
            raise InputError(f"invalid parameter name {self.name!r}")
        if self.rewrite is not None:
            e, c = self.rewrite
            if int(e) < 1:
                raise InputError(f"rewrite exponent for {self.name} must be >= 1")
            object.__setattr__(self, "rewrite", (int(e), Fraction(c)))


@dataclass(frozen=True)
class VarContext:
    """Ordered variables with block tags, plus ordered parameters."""

    variables: tuple[str, ...]
    blocks: tuple[int, ...]
    params: tuple[Param, ...] = ()

    def __post_init__(self) -> None:
        if len(self.blocks) != len(self.variables):
            raise InputError("one block tag per variable is required")
        names = list(self.variables) + [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise InputError("variable and parameter names must be distinct")
        for v in self.variables:
            if not _IDENT.match(v):
                raise InputError(f"invalid variable name {v!r}")

    @classmethod
    def create(
        cls,
        variables: Iterable[str | tuple[str, int]] = (),
        params: Iterable[str | Param] = (),
    ) -> "VarContext":
        names, blocks = [], []
        for v in variables:
            if isinstance(v, tuple):
                names.append(v[0])
                blocks.append(int(v[1]))
            else:
                names.append(v)
                blocks.append(0)
        ps = tuple(p if isinstance(p, Param) else Param(p) for p in params)
        return cls(tuple(names), tuple(blocks), ps)

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def param_index(self) -> dict[str, int]:
        return {p.name: i for i, p in enumerate(self.params)}

    @cached_property
    def field(self) -> "CoefficientField":
        return CoefficientField.for_params(self.params)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def block_tags(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.blocks)))

    def has(self, name: str) -> bool:
        return name in self.var_index or name in self.param_index

    def with_variables(self, names: Iterable[str], block: int | None = None) -> "VarContext":
        names = list(names)
        if block is None:
            block = self.blocks[-1] if self.blocks else 0
        return VarContext(self.variables + tuple(names), self.blocks + (block,) * len(names), self.params)

    def with_params(self, params: Iterable[str | Param]) -> "VarContext":
        extra = tuple(p if isinstance(p, Param) else Param(p) for p in params)
        extra = tuple(p for p in extra if p not in self.params)
        return VarContext(self.variables, self.blocks, self.params + extra)

    def without_variables(self, names: Iterable[str]) -> "VarContext":
        drop = set(names)
        keep = [i for i, v in enumerate(self.variables) if v not in drop]
        return VarContext(tuple(self.variables[i] for i in keep), tuple(self.blocks[i] for i in keep), self.params)

    def without_params(self, names: Iterable[str]) -> "VarContext":
        drop = set(names)
        return VarContext(self.variables, self.blocks, tuple(p for p in self.params if p.name not in drop))

    def fresh_name(self, stem: str) -> str:
        if not self.has(stem):
            return stem
        k = 1
        while self.has(f"{stem}_{k}"):
            k += 1
        return f"{stem}_{k}"

    def merge(self, other: "VarContext") -> "VarContext":
        """Union of two contexts; self's ordering comes first."""
        if other == self:
            return self
        variables, blocks = list(self.variables), list(self.blocks)
        for v, b in zip(other.variables, other.blocks):
            if v in self.var_index:
                if self.blocks[self.var_index[v]] != b:
                    raise ContextMismatch(f"variable {v} has conflicting block tags")
                continue
            if v in self.param_index:
                raise ContextMismatch(f"{v} is a parameter in one context and a variable in the other")
            variables.append(v)
            blocks.append(b)
        params = list(self.params)
        for p in other.params:
            if p.name in self.param_index:
                if self.params[self.param_index[p.name]] != p:
                    raise ContextMismatch(f"parameter {p.name} has conflicting rewrites")
                continue
            if p.name in self.var_index:
                raise ContextMismatch(f"{p.name} is a variable in one context and a parameter in the other")
            params.append(p)
        return VarContext(tuple(variables), tuple(blocks), tuple(params))

    def to_json(self) -> dict:
        return {
            "vars": [{"name": v, "block": b} for v, b in zip(self.variables, self.blocks)],
            "params": [
                {
                    "name": p.name,
                    "rewrite": None if p.rewrite is None else {"exp": p.rewrite[0], "to": str(p.rewrite[1])},
                }
                for p in self.params
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "VarContext":
        try:
            variables = [(v["name"], int(v.get("block", 0))) for v in obj.get("vars", [])]
            params = []
            for p in obj.get("params", []):
                rw = p.get("rewrite")
                params.append(Param(p["name"], None if rw is None else (int(rw["exp"]), Fraction(rw["to"]))))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed context JSON: {exc}") from exc
        return cls.create(variables, params)


# ---------------------------------------------------------------------------
# coefficients

_HASH_PRIME = (1 << 61) - 1


class CoefficientField:
    """Arithmetic on :class:`Coefficient` values for a fixed parameter list."""

    _cache: dict[tuple[Param, ...], "CoefficientField"] = {}

    def __init__(self, params: tuple[Param, ...]):
        self.params = params
        self.nparams = len(params)
        self.zero_exp = (0,) * self.nparams
        self.one_pp: dict = {self.zero_exp: 1}
        self.rewrites = tuple(
            (i, p.rewrite[0], p.rewrite[1]) for i, p in enumerate(params) if p.rewrite is not None
        )
        self._point = tuple(1_000_003 * (i + 1) + 17 for i in range(self.nparams))
        self.zero = Coefficient(self, {}, self.one_pp)
        self.one = Coefficient(self, {self.zero_exp: 1}, self.one_pp)

    def __reduce__(self):
        return (CoefficientField.for_params, (self.params,))

    @classmethod
    def for_params(cls, params: tuple[Param, ...]) -> "CoefficientField":
        fld = cls._cache.get(params)
        if fld is None:
            fld = cls._cache[params] = cls(params)
        return fld

    # construction -----------------------------------------------------
    def from_int(self, n: int) -> "Coefficient":
        if n == 0:
            return self.zero
        if n == 1:
            return self.one
        return Coefficient(self, {self.zero_exp: n}, self.one_pp)

    def from_fraction(self, q: Fraction | int) -> "Coefficient":
        q = Fraction(q)
        if q.denominator == 1:
            return self.from_int(q.numerator)
        return self.make({self.zero_exp: q.numerator}, {self.zero_exp: q.denominator})

    def param(self, index: int, power: int = 1) -> "Coefficient":
        e = [0] * self.nparams
        e[index] = power
        return self.make({tuple(e): 1}, self.one_pp)

    def coerce(self, value: Union[int, Fraction, "Coefficient"]) -> "Coefficient":
        if isinstance(value, Coefficient):
            if value.field is not self:
                raise ContextMismatch("coefficient belongs to a different parameter set")
            return value
        if isinstance(value, (int, Fraction)):
            return self.from_fraction(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to a coefficient")

    # canonical form ---------------------------------------------------
    def _rewrite(self, pp: Mapping) -> dict:
        out: dict = {}
        for e, c in pp.items():
            val: Fraction | int = c
            if any(e[i] >= k for i, k, _ in self.rewrites):
                e = list(e)
                for i, k, to in self.rewrites:
                    if e[i] >= k:
                        q, e[i] = divmod(e[i], k)
                        val = val * to**q
                e = tuple(e)
            v = out.get(e, 0) + val
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return out

    def reduce_pp(self, pp: Mapping) -> dict:
        return self._rewrite(pp) if self.rewrites else dict(pp)

    def make(self, num: Mapping, den: Mapping) -> "Coefficient":
        if self.rewrites:
            num = self._rewrite(num)
            den = self._rewrite(den)
            fr = [c for c in list(num.values()) + list(den.values()) if isinstance(c, Fraction)]
            if fr:
                lcm = 1
                for c in fr:
                    lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
                num = {e: int(c * lcm) for e, c in num.items()}
                den = {e: int(c * lcm) for e, c in den.items()}
        if not den:
            raise CoefficientDivisionByZero("zero denominator")
        if not num:
            return self.zero
        if len(den) == 1:
            return self._make_monomial_den(num, den)
        num, den = dict(num), dict(den)
        if self.nparams:
            low = None
            for e in num:
                low = list(e) if low is None else [min(a, b) for a, b in zip(low, e)]
            for e in den:
                low = [min(a, b) for a, b in zip(low, e)]
            if any(low):
                num = {tuple(a - b for a, b in zip(e, low)): c for e, c in num.items()}
                den = {tuple(a - b for a, b in zip(e, low)): c for e, c in den.items()}
            if len(den) > 1:
                q = _pp_divexact(num, den)
                if q is not None:
                    num, den = q, {self.zero_exp: 1}
        g = math.gcd(_pp_content(num), _pp_content(den))
        if g > 1:
            num = {e: c // g for e, c in num.items()}
            den = {e: c // g for e, c in den.items()}
        if den[_pp_lead(den)] < 0:
            num = {e: -c for e, c in num.items()}
            den = {e: -c for e, c in den.items()}
        if len(den) == 1 and den.get(self.zero_exp) == 1:
            den = self.one_pp
        return Coefficient(self, num, den)


    def _make_monomial_den(self, num: Mapping, den: Mapping) -> "Coefficient":
        ((de, dc),) = den.items()
        if dc == 1 and de == self.zero_exp:
            return Coefficient(self, dict(num), self.one_pp)
        if any(de):
            low = list(de)
            for e in num:
                low = [a if a < b else b for a, b in zip(low, e)]
                if not any(low):
                    break
            if any(low):
                num = {tuple(a - b for a, b in zip(e, low)): c for e, c in num.items()}
                de = tuple(a - b for a, b in zip(de, low))
        g = dc
        for c in num.values():
            g = math.gcd(g, c)
            if g == 1:
                break
        if dc < 0:
            g = -abs(g)
        else:
            g = abs(g)
        if g != 1:
            num = {e: c // g for e, c in num.items()}
            dc //= g
        if dc == 1 and not any(de):
            return Coefficient(self, dict(num), self.one_pp)
        return Coefficient(self, dict(num), {de: dc})


class Coefficient:
    """An element num/den of the parameter rational function field."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: CoefficientField, num: dict, den: dict):
        self.field = field
        self.num = num
        self.den = den
        self._hash: int | None = None

    def __reduce__(self):
        return (_rebuild_coefficient, (self.field, self.num, self.den))

    # predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.den is self.field.one_pp and self.num == self.field.one_pp

    def is_constant(self) -> bool:
        z = self.field.zero_exp
        return all(e == z for e in self.num) and all(e == z for e in self.den)

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise InputError("coefficient involves parameters")
        z = self.field.zero_exp
        return Fraction(self.num.get(z, 0), self.den[z])

    # arithmetic ----------------------------------------------------------
    def _other(self, other) -> "Coefficient":
        if isinstance(other, Coefficient):
            if other.field is not self.field:
                raise ContextMismatch("coefficients from different parameter sets")
            return other
        return self.field.coerce(other)

    def __add__(self, other) -> "Coefficient":
        other = self._other(other)
        fld = self.field
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den is fld.one_pp and other.den is fld.one_pp:
            num = _pp_add(self.num, other.num)
            if fld.rewrites:
                return fld.make(num, fld.one_pp)
            return Coefficient(fld, num, fld.one_pp) if num else fld.zero
        if self.den == other.den:
            return fld.make(_pp_add(self.num, other.num), self.den)
        num = _pp_add(_pp_mul(self.num, other.den), _pp_mul(other.num, self.den))
        return fld.make(num, _pp_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self) -> "Coefficient":
        return Coefficient(self.field, {e: -c for e, c in self.num.items()}, self.den)

    def __sub__(self, other) -> "Coefficient":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "Coefficient":
        return self._other(other) + (-self)

    def __mul__(self, other) -> "Coefficient":
        other = self._other(other)
        fld = self.field
        if not self.num or not other.num:
            return fld.zero
        if self.den is fld.one_pp and other.den is fld.one_pp:
            # an integer factor needs neither rewriting nor cancellation
            c = _as_int(other, fld)
            if c is not None:
                return Coefficient(fld, {e: v * c for e, v in self.num.items()}, fld.one_pp)
            c = _as_int(self, fld)
            if c is not None:
                return Coefficient(fld, {e: v * c for e, v in other.num.items()}, fld.one_pp)
            if not fld.rewrites:
                return Coefficient(fld, _pp_mul(self.num, other.num), fld.one_pp)
        elif other.is_one():
            return self
        elif self.is_one():
            return other
        return fld.make(_pp_mul(self.num, other.num), _pp_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "Coefficient":
        if not self.num:
            raise CoefficientDivisionByZero("inverse of zero coefficient")
        return self.field.make(self.den, self.num)

    def __truediv__(self, other) -> "Coefficient":
        other = self._other(other)
        if not other.num:
            raise CoefficientDivisionByZero("division by zero coefficient")
        return self.field.make(_pp_mul(self.num, other.den), _pp_mul(self.den, other.num))

    def __rtruediv__(self, other) -> "Coefficient":
        return self._other(other) / self

    def __pow__(self, k: int) -> "Coefficient":
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.field.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Coefficient):
            if isinstance(other, (int, Fraction)):
                other = self.field.from_fraction(other)
            else:
                return NotImplemented
        if other.field is not self.field:
            return False
        if self.den == other.den:
            return self.num == other.num
        fld = self.field
        return fld.reduce_pp(_pp_mul(self.num, other.den)) == fld.reduce_pp(_pp_mul(other.num, self.den))

    def __hash__(self) -> int:
        if self._hash is None:
            fld = self.field
            z = fld.zero_exp
            if not fld.nparams or (len(self.den) == 1 and z in self.den):
                self._hash = hash((frozenset(self.num.items()), self.den.get(z, 1)))
            else:
                p = _HASH_PRIME
                d = _pp_eval_mod(self.den, fld._point, p)
                n = _pp_eval_mod(self.num, fld._point, p)
                self._hash = hash(n * pow(d, p - 2, p) % p) if d else 0
        return self._hash

    def __repr__(self) -> str:
        return f"Coefficient({self.format()})"

    def format(self) -> str:
        names = [p.name for p in self.field.params]
        num = format_param_poly(self.num, names)
        if self.den is self.field.one_pp:
            return num
        return f"({num})/({format_param_poly(self.den, names)})"


def _as_int(c: Coefficient, fld: CoefficientField) -> int | None:
    if len(c.num) == 1 and c.den is fld.one_pp:
        v = c.num.get(fld.zero_exp)
        if v is not None and isinstance(v, int):
            return v
    return None


def _rebuild_coefficient(fld: CoefficientField, num: dict, den: dict) -> Coefficient:
    return Coefficient(fld, num, fld.one_pp if den == fld.one_pp else den)


def format_param_poly(pp: Mapping, names: Sequence[str]) -> str:
    if not pp:
        return "0"
    parts = []
    for e in sorted(pp, key=_pp_key, reverse=True):
        c = pp[e]
        mono = _format_mono(e, names)
        parts.append(_signed_term(c, mono))
    return _join_terms(parts)


def _format_mono(e: Sequence[int], names: Sequence[str]) -> str:
    bits = []
    for name, k in zip(names, e):
        if k == 1:
            bits.append(name)
        elif k > 1:
            bits.append(f"{name}^{k}")
    return "*".join(bits)


def _signed_term(c: int, mono: str) -> tuple[bool, str]:
    neg = c < 0
    a = abs(c)
    if not mono:
        return neg, str(a)
    if a == 1:
        return neg, mono
    return neg, f"{a}*{mono}"


def _join_terms(parts: Sequence[tuple[bool, str]]) -> str:
    out = []
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# polynomials


class NegInfinity:
    """Degree of the zero polynomial; compares below every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return not isinstance(other, NegInfinity)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, NegInfinity)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self) -> str:
        return "-inf"


NEG_INF = NegInfinity()


Scalar = Union[int, Fraction, Coefficient]


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[Monomial, Coefficient] | None = None):
        self.ctx = ctx
        self.terms: dict[Monomial, Coefficient] = dict(terms) if terms else {}
        self._hash: int | None = None

    @classmethod
    def _raw(cls, ctx: VarContext, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    # constructors --------------------------------------------------------
    @classmethod
    def zero(cls, ctx: VarContext) -> "Polynomial":
        return cls._raw(ctx, {})

    @classmethod
    def constant(cls, ctx: VarContext, value: Scalar) -> "Polynomial":
        c = ctx.field.coerce(value)
        if c.is_zero():
            return cls.zero(ctx)
        return cls._raw(ctx, {(0,) * ctx.nvars: c})

    @classmethod
    def one(cls, ctx: VarContext) -> "Polynomial":
        return cls.constant(ctx, 1)

    @classmethod
    def var(cls, ctx: VarContext, name: str, power: int = 1) -> "Polynomial":
        try:
            i = ctx.var_index[name]
        except KeyError:
            raise UndeclaredIdentifier(f"unknown variable {name!r}") from None
        e = [0] * ctx.nvars
        e[i] = power
        return cls._raw(ctx, {tuple(e): ctx.field.one})

    @classmethod
    def param(cls, ctx: VarContext, name: str, power: int = 1) -> "Polynomial":
        try:
            i = ctx.param_index[name]
        except KeyError:
            raise UndeclaredIdentifier(f"unknown parameter {name!r}") from None
        return cls.constant(ctx, ctx.field.param(i, power))

    @classmethod
    def monomial(cls, ctx: VarContext, exps: Monomial, coeff: Scalar = 1) -> "Polynomial":
        if len(exps) != ctx.nvars:
            raise ContextMismatch("monomial arity does not match context")
        c = ctx.field.coerce(coeff)
        return cls._raw(ctx, {tuple(exps): c} if not c.is_zero() else {})

    # basic queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Coefficient]]:
        return iter(self.terms.items())

    def coefficient(self, exps: Monomial) -> Coefficient:
        return self.terms.get(tuple(exps), self.ctx.field.zero)

    def is_constant(self) -> bool:
        z = (0,) * self.ctx.nvars
        return all(e == z for e in self.terms)

    def constant_term(self) -> Coefficient:
        return self.coefficient((0,) * self.ctx.nvars)

    def variables_used(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.ctx.variables[i])
        return used

    def total_degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str):
        i = self.ctx.var_index[name]
        if not self.terms:
            return NEG_INF
        return max(e[i] for e in self.terms)

    def _max_exponent(self) -> int:
        return max((max(e) for e in self.terms if e), default=0)

    # arithmetic ----------------------------------------------------------
    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatch("polynomials live in different contexts")
            return other
        if isinstance(other, (int, Fraction, Coefficient)):
            return Polynomial.constant(self.ctx, other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = prev + c
                if s.num:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def scale(self, c: Scalar) -> "Polynomial":
        c = self.ctx.field.coerce(c)
        if c.is_zero():
            return Polynomial.zero(self.ctx)
        if c.is_one():
            return self
        return Polynomial._raw(self.ctx, {e: v * c for e, v in self.terms.items()})

    def shift(self, exps: Monomial, c: Scalar = 1) -> "Polynomial":
        """Multiply by the term c * x^exps."""
        c = self.ctx.field.coerce(c)
        if c.is_zero():
            return Polynomial.zero(self.ctx)
        _check_exponents(self._max_exponent() + max(exps, default=0))
        out = {}
        one = c.is_one()
        for e, v in self.terms.items():
            out[tuple(map(operator.add, e, exps))] = v if one else v * c
        return Polynomial._raw(self.ctx, out)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction, Coefficient)):
            return self.scale(other)
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if not self.terms or not other.terms:
            return Polynomial.zero(self.ctx)
        _check_exponents(self._max_exponent() + other._max_exponent())
        a, b = (self, other) if len(self.terms) >= len(other.terms) else (other, self)
        out: dict = {}
        add = operator.add
        for eb, cb in b.terms.items():
            for ea, ca in a.terms.items():
                e = tuple(map(add, ea, eb))
                c = ca * cb
                prev = out.get(e)
                out[e] = c if prev is None else prev + c
        return Polynomial._raw(self.ctx, {e: c for e, c in out.items() if c.num})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise InputError("polynomial exponent must be a non-negative integer")
        _check_exponents(self._max_exponent() * k)
        out = Polynomial.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def exact_divide(self, other: "Polynomial") -> "Polynomial | None":
        """Return self/other when other divides self exactly, else None."""
        from .ordering import MonomialOrder  # local import avoids a cycle
        from .groebner import divide

        other = self._lift(other)
        res = divide(self, [other], MonomialOrder.grlex(self.ctx))
        if res.remainder.terms:
            return None
        return res.quotients[0]

    # comparison ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Coefficient)):
            other = Polynomial.constant(self.ctx, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx.variables, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self)})"

    def __str__(self) -> str:
        return format_poly(self)


def _check_exponents(bound: int) -> None:
    if bound > MAX_EXPONENT:
        raise ExponentOverflow(f"exponent {bound} exceeds the machine-word limit")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            pos = m.end()
            continue
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: VarContext):
        self.text = text
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in "+-" and self.peek()[0] != "end":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            f = self.factor()
            if op[0] == "*":
                acc = acc * f
            else:
                if not f.is_constant() or f.is_zero():
                    raise ParseError("division only by a nonzero variable-free expression", op[2], self.text)
                acc = acc.scale(f.constant_term().inverse())
        return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise self.error("expected a natural-number exponent")
            self.take()
            k = int(tok[1])
            if k > MAX_EXPONENT:
                raise ExponentOverflow(f"exponent {k} exceeds the machine-word limit")
            base = base**k
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        kind, val, _ = tok
        if kind == "int":
            return Polynomial.constant(self.ctx, int(val))
        if kind == "ident":
            if val in self.ctx.var_index:
                return Polynomial.var(self.ctx, val)
            if val in self.ctx.param_index:
                return Polynomial.param(self.ctx, val)
            raise UndeclaredIdentifier(f"undeclared identifier {val!r} at position {tok[2]}")
        if kind == "(":
            inner = self.expr()
            if self.peek()[0] != ")":
                raise self.error("expected ')'")
            self.take()
            return inner
        raise self.error(f"unexpected token {val!r}" if val else "unexpected end of input", tok)


def parse_poly(text: str, ctx: VarContext) -> Polynomial:
    """Parse an expression in the documented grammar into a canonical polynomial."""
    return _Parser(text, ctx).parse()


def parse_param_poly(text: str, params: tuple[Param, ...]) -> dict:
    """Parse an integer-coefficient polynomial in the parameters."""
    ctx = VarContext((), (), params)
    p = parse_poly(text, ctx)
    c = p.constant_term()
    if c.den is not c.field.one_pp:
        raise InputError(f"expected an integer polynomial in the parameters, got {text!r}")
    return dict(c.num)


# ---------------------------------------------------------------------------
# formatting


def _term_body(c: Coefficient, mono: str, names: Sequence[str]) -> tuple[bool, str]:
    fld = c.field
    if len(c.num) == 1:
        (pe, pc), = c.num.items()
        neg = pc < 0
        pm = _format_mono(pe, names)
        bits = [b for b in (pm, mono) if b]
        if abs(pc) != 1 or not bits:
            bits.insert(0, str(abs(pc)))
        body = "*".join(bits)
    else:
        neg = False
        body = f"({format_param_poly(c.num, names)})"
        if mono:
            body = f"{body}*{mono}"
    if c.den is not fld.one_pp:
        den = c.den
        simple = len(den) == 1 and (
            next(iter(den.values())) == 1 and sum(1 for k in next(iter(den)) if k) <= 1
            or not any(next(iter(den)))
        )
        dtext = format_param_poly(den, names)
        body = f"{body}/{dtext}" if simple else f"{body}/({dtext})"
    return neg, body


def format_poly(f: Polynomial, order=None) -> str:
    """Render f in the input grammar with terms in descending order."""
    from .ordering import MonomialOrder

    if not f.terms:
        return "0"
    if order is None:
        order = MonomialOrder.grlex(f.ctx)
    elif order.ctx != f.ctx:
        raise ContextMismatch("order context does not match polynomial")
    names = [p.name for p in f.ctx.params]
    parts = []
    for e in sorted(f.terms, key=order.key, reverse=True):
        parts.append(_term_body(f.terms[e], _format_mono(e, f.ctx.variables), names))
    return _join_terms(parts)


# ---------------------------------------------------------------------------
# JSON


def poly_to_json(f: Polynomial) -> dict:
    from .ordering import MonomialOrder

    names = [p.name for p in f.ctx.params]
    order = MonomialOrder.grlex(f.ctx)
    terms = []
    for e in sorted(f.terms, key=order.key, reverse=True):
        c = f.terms[e]
        terms.append({"exp": list(e), "num": format_param_poly(c.num, names), "den": format_param_poly(c.den, names)})
    out = f.ctx.to_json()
    out["terms"] = terms
    return out


def poly_from_json(obj: Mapping, ctx: VarContext | None = None) -> Polynomial:
    if ctx is None:
        ctx = VarContext.from_json(obj)
    fld = ctx.field
    terms: dict = {}
    try:
        for t in obj["terms"]:
            e = tuple(int(k) for k in t["exp"])
            if len(e) != ctx.nvars or any(k < 0 for k in e):
                raise InputError("term exponent vector does not match the variables")
            c = fld.make(parse_param_poly(t["num"], ctx.params), parse_param_poly(t.get("den", "1"), ctx.params))
            prev = terms.get(e)
            c = c if prev is None else prev + c
            if c.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = c
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed polynomial JSON: {exc}") from exc
    return Polynomial._raw(ctx, terms)


# ---------------------------------------------------------------------------
# structural operations


def embed(f: Polynomial, ctx: VarContext) -> Polynomial:
    """Re-express f in a larger context containing all of its names."""
    if f.ctx == ctx:
        return f
    try:
        vmap = [ctx.var_index[v] for v in f.ctx.variables]
        pmap = [ctx.param_index[p.name] for p in f.ctx.params]
    except KeyError as exc:
        raise ContextMismatch(f"target context lacks {exc.args[0]!r}") from None
    for p in f.ctx.params:
        if ctx.params[ctx.param_index[p.name]] != p:
            raise ContextMismatch(f"parameter {p.name} has conflicting rewrites")
    fld = ctx.field
    same_params = f.ctx.params == ctx.params

    def remap_pp(pp: Mapping) -> dict:
        out = {}
        for e, c in pp.items():
            ne = [0] * fld.nparams
            for i, k in zip(pmap, e):
                ne[i] = k
            out[tuple(ne)] = c
        return out

    terms = {}
    n = ctx.nvars
    for e, c in f.terms.items():
        ne = [0] * n
        for i, k in zip(vmap, e):
            ne[i] = k
        if same_params:
            nc = c if c.field is fld else Coefficient(fld, c.num, fld.one_pp if c.den is c.field.one_pp else c.den)
        else:
            nc = fld.make(remap_pp(c.num), remap_pp(c.den))
        terms[tuple(ne)] = nc
    return Polynomial._raw(ctx, terms)


def common_context(polys: Iterable[Polynomial]) -> VarContext:
    ctx = None
    for p in polys:
        ctx = p.ctx if ctx is None else ctx.merge(p.ctx)
    if ctx is None:
        raise InputError("no polynomials given")
    return ctx


def substitute(f: Polynomial, bindings: Mapping[str, Polynomial]) -> Polynomial:
    """Simultaneously replace variables by polynomials.

    Binding targets may live in larger contexts; the result lives in the merge
    of f's context with all binding contexts.
    """
    ctx = f.ctx
    for v, p in bindings.items():
        if v not in f.ctx.var_index:
            raise UndeclaredIdentifier(f"cannot bind unknown variable {v!r}")
        ctx = ctx.merge(p.ctx)
    g = embed(f, ctx)
    images = {ctx.var_index[v]: embed(p, ctx) for v, p in bindings.items()}
    if not images:
        return g
    power_cache: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, k: int) -> Polynomial:
        key = (i, k)
        if key not in power_cache:
            power_cache[key] = images[i] ** k
        return power_cache[key]

    result = Polynomial.zero(ctx)
    groups: dict[tuple, dict] = {}
    bound = sorted(images)
    for e, c in g.terms.items():
        key = tuple(e[i] for i in bound)
        rest = list(e)
        for i in bound:
            rest[i] = 0
        groups.setdefault(key, {})[tuple(rest)] = c
    for key, rest_terms in groups.items():
        prod = Polynomial._raw(ctx, rest_terms)
        for i, k in zip(bound, key):
            if k:
                prod = prod * power(i, k)
        result = result + prod
    return result


def partial_derivative(f: Polynomial, v: str) -> Polynomial:
    try:
        i = f.ctx.var_index[v]
    except KeyError:
        raise UndeclaredIdentifier(f"unknown variable {v!r}") from None
    out = {}
    for e, c in f.terms.items():
        k = e[i]
        if k:
            ne = list(e)
            ne[i] = k - 1
            out[tuple(ne)] = c * k
    return Polynomial._raw(f.ctx, out)


@dataclass(frozen=True)
class Degrees:
    total: object
    blocks: dict[int, object] = field(default_factory=dict)

    def block_tuple(self, tags: Sequence[int]) -> tuple:
        return tuple(self.blocks.get(t, NEG_INF) for t in tags)


def degrees(f: Polynomial) -> Degrees:
    """Total degree and per-block degree; the zero polynomial gives NEG_INF."""
    tags = f.ctx.block_tags
    if not f.terms:
        return Degrees(NEG_INF, {t: NEG_INF for t in tags})
    total = 0
    blocks = {t: 0 for t in tags}
    for e in f.terms:
        total = max(total, sum(e))
        sums: dict[int, int] = {}
        for b, k in zip(f.ctx.blocks, e):
            if k:
                sums[b] = sums.get(b, 0) + k
        for b, s in sums.items():
            if s > blocks[b]:
                blocks[b] = s
    return Degrees(total, blocks)


def block_degree(f: Polynomial, tag: int):
    return degrees(f).blocks.get(tag, NEG_INF)


def is_homogeneous(f: Polynomial) -> bool:
    return len({sum(e) for e in f.terms}) <= 1


def homogenize(f: Polynomial, new_var: str, block: int | None = None) -> Polynomial:
    """x0^deg(f) * f(x/x0) in the context extended by ``new_var``."""
    if f.ctx.has(new_var):
        raise InputError(f"name {new_var!r} already used")
    if block is None:
        block = max(f.ctx.blocks, default=-1) + 1
    ctx = f.ctx.with_variables([new_var], block)
    if not f.terms:
        return Polynomial.zero(ctx)
    d = f.total_degree()
    return Polynomial._raw(ctx, {e + (d - sum(e),): c for e, c in f.terms.items()})


def homogenize_blocks(f: Polynomial, new_vars: Mapping[int, str]) -> Polynomial:
    """Multihomogenize: one new variable per block tag, each block made homogeneous."""
    ctx = f.ctx
    for tag, name in new_vars.items():
        if ctx.has(name):
            raise InputError(f"name {name!r} already used")
        ctx = ctx.with_variables([name], tag)
    degs = degrees(f).blocks
    tags = list(new_vars)
    blocks = f.ctx.blocks
    out = {}
    for e, c in f.terms.items():
        extra = []
        for t in tags:
            s = sum(k for b, k in zip(blocks, e) if b == t)
            extra.append(degs[t] - s)
        out[e + tuple(extra)] = c
    return Polynomial._raw(ctx, out)


def dehomogenize(f: Polynomial, v: str) -> Polynomial:
    """Set v = 1 and drop it from the context."""
    try:
        i = f.ctx.var_index[v]
    except KeyError:
        raise UndeclaredIdentifier(f"unknown variable {v!r}") from None
    ctx = f.ctx.without_variables([v])
    out: dict = {}
    for e, c in f.terms.items():
        ne = e[:i] + e[i + 1 :]
        prev = out.get(ne)
        out[ne] = c if prev is None else prev + c
    return Polynomial._raw(ctx, {e: c for e, c in out.items() if c.num})


def specialize_params(f: Polynomial, bindings: Mapping[str, Fraction | int]) -> Polynomial:
    """Replace parameters by rationals and drop them from the context."""
    if not bindings:
        return f
    ctx0 = f.ctx
    for name in bindings:
        if name not in ctx0.param_index:
            raise UndeclaredIdentifier(f"unknown parameter {name!r}")
    ctx = ctx0.without_params(bindings)
    fld = ctx.field
    keep = [ctx0.param_index[p.name] for p in ctx.params]
    bound = [(ctx0.param_index[n], Fraction(v)) for n, v in bindings.items()]

    def spec(pp: Mapping) -> dict:
        out: dict = {}
        for e, c in pp.items():
            val = Fraction(c)
            for i, v in bound:
                if e[i]:
                    val *= v ** e[i]
            if val:
                ne = tuple(e[i] for i in keep)
                out[ne] = out.get(ne, 0) + val
        return {e: c for e, c in out.items() if c}

    def to_int(num: dict, den: dict) -> tuple[dict, dict]:
        lcm = 1
        for c in list(num.values()) + list(den.values()):
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        return {e: int(c * lcm) for e, c in num.items()}, {e: int(c * lcm) for e, c in den.items()}

    terms = {}
    for e, c in f.terms.items():
        num, den = spec(c.num), spec(c.den)
        if not den:
            raise CoefficientDivisionByZero("a coefficient denominator vanishes under the bindings")
        if not num:
            continue
        nc = fld.make(*to_int(num, den))
        if not nc.is_zero():
            terms[e] = nc
    return Polynomial._raw(ctx, terms)


def monomial_divides_all_terms(f: Polynomial, m: Monomial) -> bool:
    if len(m) != f.ctx.nvars:
        raise ContextMismatch("monomial arity does not match context")
    return all(all(a >= b for a, b in zip(e, m)) for e in f.terms)


def ring_arith(op: str, f: Polynomial, g) -> Polynomial:
    """Dispatch helper mirroring the documented operation names."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "pow":
        return f**g
    raise InputError(f"unknown operation {op!r}")


def monomial_of(ctx: VarContext, **powers: int) -> Monomial:
    e = [0] * ctx.nvars
    for name, k in powers.items():
        e[ctx.var_index[name]] = k
    return tuple(e)
