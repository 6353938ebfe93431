"""Closed-form torsion-order bounds and the theorem dispatch built on them.

Every certificate is conditional: it speaks about a very general member of
the family described by the query, never about a specific variety.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .constructions.base import double_cone_budget
from .errors import InputError

THEOREMS = (
    "CI_MAIN",
    "CI_LOG",
    "CI_2TORSION_CLOSED",
    "CI_LOW_INDEX",
    "PRODUCT",
    "PRODUCT_INTRO",
    "GRASS",
    "GRASS_INTRO",
    "NONE",
)

VERY_GENERAL = "statement about a very general member of the family"
NONE_NOTE = "NONE (this package's theorems); external results are not consulted"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def _check_characteristic(char: int) -> None:
    if char != 0 and not _is_prime(char):
        raise InputError(f"characteristic must be 0 or a prime, got {char}")


def invertible(m: int, char: int) -> bool:
    """m is a unit in a field of characteristic ``char``."""
    return char == 0 or m % char != 0


@dataclass(frozen=True)
class CIQuery:
    degrees: tuple[int, ...]
    dimension: int
    m: int
    characteristic: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if not self.degrees:
            raise InputError("at least one degree is required")
        if any(d < 1 for d in self.degrees):
            raise InputError(f"degrees must be >= 1, got {self.degrees}")
        if self.dimension < 1:
            raise InputError(f"dimension must be >= 1, got {self.dimension}")
        if self.m < 1:
            raise InputError(f"m must be >= 1, got {self.m}")
        _check_characteristic(self.characteristic)


@dataclass
class Certificate:
    """Outcome of one theorem dispatch.

    ``checks`` holds the theorem's inequalities as (label, lhs, rhs) with the
    claim lhs <= rhs; a certified result re-verifies them on construction.
    """

    certified: bool
    theorem: str
    witness_n: int | None
    fano_index: int | None
    upper_bound: int | None = None
    caveats: list[str] = field(default_factory=list)
    checks: list[tuple[str, int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown theorem {self.theorem!r}")
        if self.certified:
            if self.theorem == "NONE":
                raise AssertionError("a certified result needs a theorem")
            failed = [label for label, lhs, rhs in self.checks if not lhs <= rhs]
            if failed:
                raise AssertionError(f"{self.theorem}: inequalities do not re-verify: {failed}")
        elif self.theorem != "NONE" or self.witness_n is not None:
            raise AssertionError("an uncertified result carries no theorem or witness")

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "theorem": self.theorem,
            "witness_n": self.witness_n,
            "fano_index": self.fano_index,
            "upper_bound": None if self.upper_bound is None else str(self.upper_bound),
            "caveats": list(self.caveats),
        }

    def to_text(self) -> str:
        lines = [
            f"certified: {'yes' if self.certified else 'no'}",
            f"theorem: {self.theorem}",
            f"witness n: {'-' if self.witness_n is None else self.witness_n}",
            f"fano index: {'-' if self.fano_index is None else self.fano_index}",
            f"upper bound: {'not applicable' if self.upper_bound is None else self.upper_bound}",
        ]
        lines += [f"check: {label}: {lhs} <= {rhs}" for label, lhs, rhs in self.checks]
        lines += [f"caveat: {c}" for c in self.caveats]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# bounds


def fano_index(degrees: Sequence[int], D: int) -> int:
    return D + len(degrees) + 1 - sum(degrees)


def floor_binomial_sum(n: int, m: int) -> int:
    """sum_{j<n} C(n, j) floor(j/m)."""
    return sum(math.comb(n, j) * (j // m) for j in range(n))


def bound_B(n: int, m: int) -> int:
    if n < 2 or m < 2:
        raise InputError(f"bound_B needs n, m >= 2, got n={n}, m={m}")
    return 2**n + floor_binomial_sum(n, m) - m


def closed_form_2bound(d: int) -> int:
    if d < 4:
        raise InputError(f"closed_form_2bound needs d >= 4, got {d}")
    value = (d + 1) * 2 ** (d - 4) - (d + 2) // 2
    if value != bound_B(d - 2, 2):
        raise AssertionError(f"closed form disagrees with bound_B at d={d}")
    return value


def variable_bound(n: int, m: int) -> int:
    """n + 2^n - 1 + sum_{j<n} C(n, j) floor(j/m): the largest M0 of the product theorem."""
    return n + 2**n - 1 + floor_binomial_sum(n, m)


def grass_bound(n: int, m: int, d: int) -> int:
    """Largest Grassmannian dimension allowed by witness n at degree d."""
    return 2**n - 1 + floor_binomial_sum(n, m) + d - m


def log_form_holds(d: int, r: int, m: int) -> bool:
    """d >= log2(r + m) + m, decided in integers."""
    return d >= m and 2 ** (d - m) >= r + m


def rojtman_upper_bound(degrees: Sequence[int]) -> int:
    """d_1! * ... * d_s!; a divisor bound stated for Fano complete intersections."""
    if not degrees:
        raise InputError("at least one degree is required")
    out = 1
    for d in degrees:
        out *= math.factorial(d)
    return out


# ---------------------------------------------------------------------------
# complete intersections


def _unit_caveat(m: int) -> str:
    return f"requires {m} invertible in the ground field"


def _none(r: int | None, caveats: list[str], upper: int | None = None) -> Certificate:
    return Certificate(False, "NONE", None, r, upper, [NONE_NOTE, *caveats])


def _main_witness(degrees: Sequence[int], r: int, m: int) -> int | None:
    top = max(degrees)
    for n in range(2, top - m + 1):
        if r <= bound_B(n, m):
            return n
    return None


def certify_ci(q: CIQuery) -> Certificate:
    """Try the low-index theorem, then the n-search; the log form is only reported.

    Degree-one entries are dropped first: they cut out a linear subspace and
    leave the Fano index unchanged.
    """
    degrees = sorted((d for d in q.degrees if d > 1), reverse=True)
    r = fano_index(q.degrees, q.dimension)
    m, char, D = q.m, q.characteristic, q.dimension
    upper = rojtman_upper_bound(q.degrees) if r > 0 else None
    notes = [VERY_GENERAL]
    if not degrees:
        return _none(r, notes + ["all degrees are one: a linear subspace"], upper)
    if m == 1:
        return Certificate(True, "CI_MAIN", None, r, upper, notes + ["divisibility by 1 is automatic"])

    log_ok = r > 0 and log_form_holds(degrees[0], r, m) and invertible(m, char)
    if log_ok:
        notes.append("the weaker log form CI_LOG also applies")

    if m == 2 and char != 2 and D >= 4 and r <= 2:
        checks = [("4 <= D", 4, D), ("r <= 2", r, 2), ("2 <= min degree", 2, degrees[-1])]
        return Certificate(True, "CI_LOW_INDEX", None, r, upper, notes + ["char != 2"], checks)

    if invertible(m, char) and D >= 4:
        n = _main_witness(degrees, r, m)
        if n is not None:
            checks = [("n + m <= d_1", n + m, degrees[0]), ("r <= bound_B(n, m)", r, bound_B(n, m)), ("4 <= D", 4, D)]
            extra = []
            if m == 2 and degrees[0] >= 4 and r <= closed_form_2bound(degrees[0]):
                extra.append("the closed form CI_2TORSION_CLOSED also applies")
            return Certificate(True, "CI_MAIN", n, r, upper, notes + extra + [_unit_caveat(m)], checks)

    if D == 3 and log_ok and m == 2 and degrees == [4] and len(q.degrees) == 1:
        checks = [("log2(r + m) + m <= d", r + m, 2 ** (degrees[0] - m))]
        return Certificate(
            True,
            "CI_LOG",
            degrees[0] - m,
            r,
            upper,
            notes + [_unit_caveat(m), "dimension 3 rests on the cited quartic threefold result"],
            checks,
        )
    reasons = []
    if not invertible(m, char):
        reasons.append(f"{m} is not invertible in characteristic {char}")
    if D < 4:
        reasons.append(f"dimension {D} < 4")
    return _none(r, [n for n in notes if "CI_LOG" not in n] + reasons, upper)


# ---------------------------------------------------------------------------
# hypersurfaces in products of projective spaces


def certify_product(Ms: Sequence[int], ds: Sequence[int], m: int, characteristic: int = 0) -> Certificate:
    """Hypersurface of multidegree ds in P^{M_0} x ... x P^{M_s}."""
    Ms, ds = list(Ms), list(ds)
    if not Ms or len(Ms) != len(ds):
        raise InputError("Ms and ds must be nonempty and of equal length")
    if any(M < 1 for M in Ms) or any(d < 1 for d in ds):
        raise InputError("all Ms and ds must be >= 1")
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    _check_characteristic(characteristic)
    notes = [VERY_GENERAL, _unit_caveat(m)]
    M0, d0 = Ms[0], ds[0]
    tail_ok = all(d >= M + 1 for M, d in zip(Ms[1:], ds[1:]))
    if not (m >= 2 and invertible(m, characteristic) and tail_ok and M0 >= 4):
        return _none(None, notes)
    intro = 2 ** max(d0 - m, 0) >= M0 and d0 >= m
    for n in range(2, d0 - m + 1):
        if M0 <= variable_bound(n, m):
            checks = [("n + m <= d_0", n + m, d0), ("4 <= M_0", 4, M0), ("M_0 <= bound", M0, variable_bound(n, m))]
            checks += [(f"M_{i} + 1 <= d_{i}", M + 1, d) for i, (M, d) in enumerate(zip(Ms[1:], ds[1:]), 1)]
            if intro:
                notes.append("the log form PRODUCT_INTRO also applies")
            return Certificate(True, "PRODUCT", n, None, None, notes, checks)
    if intro:
        raise AssertionError("log form holds but no witness n was found")
    return _none(None, notes)


# ---------------------------------------------------------------------------
# hypersurfaces in Grassmannians


def grass_intro_holds(dim: int, d: int) -> bool:
    return d >= 4 and 4 <= dim <= (d + 1) * 2 ** (d - 4)


def grass_dimension_certified(dim: int, d: int, m: int) -> int | None:
    """Smallest witness n' for a Grassmannian of dimension ``dim``, if any."""
    if dim < 4 or m < 2:
        return None
    for n in range(2, d - m + 1):
        if dim <= grass_bound(n, m, d):
            return n
    return None


def certify_grassmannian(l: int, n: int, d: int, m: int, characteristic: int = 0) -> Certificate:
    """Gr(l, n) cut by a degree-d hypersurface under a fixed Pluecker embedding."""
    if not 1 <= l <= n:
        raise InputError(f"need 1 <= l <= n, got l={l}, n={n}")
    if d < 1 or m < 1:
        raise InputError("d and m must be >= 1")
    _check_characteristic(characteristic)
    dim = l * (n - l)
    notes = [VERY_GENERAL, "stated over the complex numbers"]
    if characteristic != 0:
        return _none(None, notes + ["only characteristic 0 is covered"])
    witness = grass_dimension_certified(dim, d, m)
    if m == 2 and grass_intro_holds(dim, d) and witness is None:
        raise AssertionError(f"closed form holds for dim={dim}, d={d} but no witness was found")
    if witness is None:
        return _none(None, notes)
    checks = [
        ("n' + m <= d", witness + m, d),
        ("4 <= l(n-l)", 4, dim),
        ("l(n-l) <= bound", dim, grass_bound(witness, m, d)),
    ]
    if m == 2 and grass_intro_holds(dim, d):
        notes.append("the closed form GRASS_INTRO also applies")
    return Certificate(True, "GRASS", witness, None, None, notes, checks)


# ---------------------------------------------------------------------------
# identities


@dataclass
class IdentityReport:
    checked: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"checked": self.checked, "failures": list(self.failures), "ok": self.ok}


def identity_suite(n_max: int, m_max: int, cone_n_max: int = 12) -> IdentityReport:
    """Brute-force the binomial identities behind the closed forms.

    The double-cone count enumerates 2^n indices, so it stops at ``cone_n_max``.
    """
    if n_max < 2:
        raise InputError("identity_suite needs n_max >= 2")
    rep = IdentityReport()
    for n in range(2, n_max + 1):
        lhs = floor_binomial_sum(n, 2)
        rhs = (n - 1) * 2 ** (n - 2) - n // 2
        rep.checked += 1
        if lhs != rhs:
            rep.failures.append({"identity": "floor-sum", "n": n, "lhs": lhs, "rhs": rhs})
        d = n + 2
        rep.checked += 1
        try:
            closed_form_2bound(d)
        except AssertionError:
            rep.failures.append({"identity": "closed-form", "d": d})
        for m in range(2, m_max + 1 if n <= cone_n_max else 2):
            rep.checked += 1
            try:
                double_cone_budget(n, m)
            except AssertionError:
                rep.failures.append({"identity": "double-cone", "n": n, "m": m})
    return rep
