"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 input error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Callable, Sequence, TextIO

from . import __version__
from .certify import (
    CIQuery,
    Certificate,
    bound_B,
    certify_ci,
    certify_grassmannian,
    certify_product,
    closed_form_2bound,
    grass_dimension_certified,
    variable_bound,
)
from .constructions import (
    ConstructionRecipe,
    GeneratedFamily,
    WitnessCheck,
    assemble_ci,
    assemble_ci_low_index,
    build,
    check_star_witness,
    fixed_example,
    hpt_birational_chain,
    hpt_chart_chain,
)
from .constructions.fixed import FIXED
from .constructions.witness import WITNESSES, f0_witness
from .errors import InputError, ResourceLimit, TorsionKitError
from .groebner import (
    DEFAULT_MAX_STEPS,
    DEFAULT_MAX_TERMS,
    Limits,
    MembershipStep,
    SubstitutionStep,
    is_groebner,
    projective_closure_basis,
    random_ideal_elements,
    verify_iso_chain,
)
from .ordering import MonomialOrder
from .polyring import Polynomial, VarContext, common_context, embed, format_poly, parse_poly
from .selftest import run_selftest

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3
RANGE_CAP = 4096


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to exit 2."""

    def error(self, message: str):
        raise InputError(message)


# ---------------------------------------------------------------------------
# argument helpers


def int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return out


def int_range(text: str) -> range:
    """'lo..hi' inclusive, or a single integer; lo > hi gives an empty range."""
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}") from None
    if hi - lo + 1 > RANGE_CAP:
        raise argparse.ArgumentTypeError(f"range {text} has more than {RANGE_CAP} values")
    return range(lo, hi + 1)


def _limits(args) -> Limits:
    return Limits(max_steps=args.max_steps, max_terms=args.max_terms, parallel=args.parallel)


def _emit(out: TextIO, payload: Any, as_json: bool, text: str) -> None:
    if as_json:
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _field(obj: dict, key: str) -> Any:
    try:
        return obj[key]
    except (KeyError, TypeError):
        raise InputError(f"input JSON is missing {key!r}") from None


# ---------------------------------------------------------------------------
# JSON schemas for verify inputs


def family_from_json(obj: dict) -> tuple[list[Polynomial], MonomialOrder]:
    """Polynomials and order from a ``construct --json`` document or a hand-written one."""
    ctx = VarContext.from_json(_field(obj, "context"))
    polys = [parse_poly(t, ctx) for t in _field(obj, "polys")]
    order = MonomialOrder.from_json(obj.get("order", {}), ctx)
    return polys, order


def _polys(texts: Sequence[str], ctx: VarContext) -> list[Polynomial]:
    return [parse_poly(t, ctx) for t in texts]


def chain_to_json(steps: Sequence[SubstitutionStep | MembershipStep]) -> dict:
    polys: list[Polynomial] = []
    for st in steps:
        if isinstance(st, SubstitutionStep):
            polys += st.source + st.target + [p for p, _ in st.bindings.values()]
            polys += [st.denominator] if st.denominator is not None else []
        else:
            polys += st.left + st.right + st.inverted
    ctx = common_context(polys)
    fmt = lambda ps: [format_poly(embed(p, ctx)) for p in ps]  # noqa: E731
    out = []
    for st in steps:
        if isinstance(st, SubstitutionStep):
            out.append(
                {
                    "kind": "substitution",
                    "label": st.label,
                    "source": fmt(st.source),
                    "target": fmt(st.target),
                    "bindings": {v: {"value": format_poly(embed(p, ctx)), "power": k} for v, (p, k) in st.bindings.items()},
                    "denominator": None if st.denominator is None else format_poly(embed(st.denominator, ctx)),
                }
            )
        else:
            out.append(
                {
                    "kind": "membership",
                    "label": st.label,
                    "left": fmt(st.left),
                    "right": fmt(st.right),
                    "inverted": fmt(st.inverted),
                }
            )
    return {"context": ctx.to_json(), "steps": out}


def chain_from_json(obj: dict) -> list[SubstitutionStep | MembershipStep]:
    ctx = VarContext.from_json(_field(obj, "context"))
    steps: list[SubstitutionStep | MembershipStep] = []
    for raw in _field(obj, "steps"):
        kind = _field(raw, "kind")
        label = raw.get("label", kind)
        if kind == "substitution":
            bindings = {
                v: (parse_poly(_field(b, "value"), ctx), int(b.get("power", 0))) for v, b in _field(raw, "bindings").items()
            }
            den = raw.get("denominator")
            steps.append(
                SubstitutionStep(
                    _polys(_field(raw, "source"), ctx),
                    _polys(_field(raw, "target"), ctx),
                    bindings,
                    None if den is None else parse_poly(den, ctx),
                    label,
                )
            )
        elif kind == "membership":
            steps.append(
                MembershipStep(
                    _polys(_field(raw, "left"), ctx),
                    _polys(_field(raw, "right"), ctx),
                    _polys(raw.get("inverted", []), ctx),
                    label,
                )
            )
        else:
            raise InputError(f"unknown step kind {kind!r}")
    return steps


def witness_to_json(wc: WitnessCheck) -> dict:
    ctx = common_context(list(wc.targets) + list(wc.inverted) + [p for _, p in wc.bindings])
    fmt = lambda p: format_poly(embed(p, ctx))  # noqa: E731
    return {
        "context": ctx.to_json(),
        "targets": [fmt(p) for p in wc.targets],
        "bindings": [[v, fmt(p)] for v, p in wc.bindings],
        "inverted": [fmt(p) for p in wc.inverted],
        "variable": wc.variable,
        "q_param": wc.q_param,
        "label": wc.label,
    }


def witness_from_json(obj: dict) -> WitnessCheck:
    ctx = VarContext.from_json(_field(obj, "context"))
    try:
        bindings = [(str(v), parse_poly(t, ctx)) for v, t in _field(obj, "bindings")]
    except ValueError:
        raise InputError("bindings must be [variable, polynomial] pairs") from None
    return WitnessCheck(
        _polys(_field(obj, "targets"), ctx),
        bindings,
        _polys(obj.get("inverted", []), ctx),
        _field(obj, "variable"),
        obj.get("q_param", "q"),
        obj.get("label", ""),
    )


BUILTIN_CHAINS: dict[str, Callable[[], list]] = {"birational": hpt_birational_chain, "chart": hpt_chart_chain}


# ---------------------------------------------------------------------------
# construct


def _family_text(fam: GeneratedFamily) -> str:
    lines = [
        f"family: {fam.family}",
        f"variables: {', '.join(fam.ctx.variables)}",
        f"parameters: {', '.join(p.name for p in fam.ctx.params) or '-'}",
        f"order: {' > '.join(fam.order.priority_names())}",
        f"degrees: {fam.degree_report()}",
        f"designated: {fam.designated}",
    ]
    lines += [f"f{i}: {format_poly(p, fam.order)}" for i, p in enumerate(fam.polys, 1)]
    return "\n".join(lines)


def _require(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"construct {args.family} needs {' '.join(missing)}")


def _construct_family(args) -> GeneratedFamily:
    kind = args.family
    choices = {"h": args.h_poly} if args.h_poly is not None else {}
    if kind == "f0":
        _require(args, "n", "m", "N")
        return build(ConstructionRecipe("F0", {"n": args.n, "m": args.m, "N": args.N}))
    if kind == "g":
        _require(args, "n", "m")
        return build(ConstructionRecipe("G", {"n": args.n, "m": args.m}))
    if kind == "base-n3":
        _require(args, "d", "m")
        return build(ConstructionRecipe("BASE_N3", {"d": args.d, "m": args.m}))
    if kind == "double-cone":
        _require(args, "n", "m", "N", "j0")
        return build(ConstructionRecipe("DOUBLE_CONE", {"n": args.n, "m": args.m, "N": args.N, "j0": args.j0}))
    if kind == "check-f":
        _require(args, "n", "m", "N", "d", "M")
        params = {"n": args.n, "m": args.m, "N": args.N, "d": args.d, "M": args.M}
        return build(ConstructionRecipe("CHECK_F", params, choices))
    if kind == "ci":
        _require(args, "degrees", "N", "M", "n", "m")
        fam = assemble_ci(args.degrees, args.N, args.M, args.n, args.m)
    elif kind == "ci-low":
        _require(args, "degrees", "M")
        fam = assemble_ci_low_index(args.degrees, args.M)
    elif kind == "product":
        _require(args, "Ms", "ds", "n", "m")
        return build(ConstructionRecipe("PRODUCT_HYP", {"Ms": args.Ms, "ds": args.ds, "n": args.n, "m": args.m}))
    elif kind == "fixed":
        _require(args, "name")
        fam = fixed_example(args.name)
    else:  # pragma: no cover - argparse restricts the choices
        raise InputError(f"unknown family {kind}")
    problems = fam.validate()
    if problems:
        raise AssertionError("; ".join(problems))
    return fam


def cmd_construct(args, out: TextIO) -> int:
    fam = _construct_family(args)
    _emit(out, fam.to_json(), args.json, _family_text(fam))
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify


def cmd_certify(args, out: TextIO) -> int:
    if args.kind == "ci":
        _need_flags(args, "degrees", "dim", "m")
        cert = certify_ci(CIQuery(tuple(args.degrees), args.dim, args.m, args.char))
    elif args.kind == "product":
        _need_flags(args, "Ms", "ds", "m")
        cert = certify_product(args.Ms, args.ds, args.m, args.char)
    else:
        _need_flags(args, "l", "n", "d", "m")
        cert = certify_grassmannian(args.l, args.n, args.d, args.m, args.char)
    _emit(out, cert.to_json(), args.json, cert.to_text())
    return EXIT_OK if cert.certified else EXIT_NEGATIVE


def _need_flags(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"certify {args.kind} needs {' '.join(missing)}")


# ---------------------------------------------------------------------------
# verify


def _verify_groebner(args) -> tuple[bool, dict, str]:
    polys, order = family_from_json(_load_json(args.input))
    ok = is_groebner(polys, order, _limits(args))
    return ok, {"groebner": ok}, f"groebner basis: {'yes' if ok else 'no'}"


def _verify_closure(args) -> tuple[bool, dict, str]:
    obj = _load_json(args.input)
    polys, order = family_from_json(obj)
    samples = _polys(obj.get("samples", []), order.ctx)
    samples += random_ideal_elements(polys, args.samples, random.Random(args.seed))
    rep = projective_closure_basis(polys, order, samples, _limits(args))
    lines = [f"coprime leading monomials: {'yes' if rep.coprime else 'no'}"]
    if rep.offending:
        lines.append(f"offending pair: {list(rep.offending)}")
    lines += [f"h{i}: {format_poly(h)}" for i, h in enumerate(rep.homogenized, 1)]
    lines += [f"sample {i}: {'pass' if s.passed else 'FAIL'}" for i, s in enumerate(rep.samples, 1)]
    lines.append(f"verdict: {'pass' if rep.passed else 'fail'}")
    return rep.passed, {**rep.to_json(), "passed": rep.passed}, "\n".join(lines)


def _verify_iso_chain(args) -> tuple[bool, dict, str]:
    steps = BUILTIN_CHAINS[args.builtin]() if args.builtin else chain_from_json(_load_json(args.input))
    ok, log = verify_iso_chain(steps, _limits(args))
    return ok, {"verified": ok, "log": log}, "\n".join(log + [f"verdict: {'pass' if ok else 'fail'}"])


def _builtin_witness(name: str) -> WitnessCheck:
    if name.startswith("f0:"):
        try:
            n, m = (int(t) for t in name[3:].split(","))
        except ValueError:
            raise InputError("f0 witness is named f0:n,m") from None
        return f0_witness(n, m)
    return WITNESSES[name]()


def _verify_witness(args) -> tuple[bool, dict, str]:
    wc = _builtin_witness(args.builtin) if args.builtin else witness_from_json(_load_json(args.input))
    res = check_star_witness(wc)
    lines = [
        f"residual: {'-' if res.residual is None else format_poly(res.residual)}",
        f"solution: {'-' if res.solution is None else format_poly(res.solution)}",
    ]
    lines += [f"reason: {r}" for r in res.reasons]
    lines.append(f"verdict: {'pass' if res.ok else 'fail'}")
    return res.ok, res.to_json(), "\n".join(lines)


VERIFIERS = {
    "groebner": _verify_groebner,
    "closure": _verify_closure,
    "iso-chain": _verify_iso_chain,
    "witness": _verify_witness,
}


def cmd_verify(args, out: TextIO) -> int:
    if args.emit_input:
        if not args.builtin:
            raise InputError("--emit-input needs --builtin")
        if args.kind == "iso-chain":
            payload = chain_to_json(BUILTIN_CHAINS[args.builtin]())
        elif args.kind == "witness":
            payload = witness_to_json(_builtin_witness(args.builtin))
        else:
            raise InputError("--emit-input applies to iso-chain and witness")
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    if args.builtin and args.kind not in ("iso-chain", "witness"):
        raise InputError("--builtin applies to iso-chain and witness; groebner and closure take a file")
    if args.builtin and args.kind == "iso-chain" and args.builtin not in BUILTIN_CHAINS:
        raise InputError(f"unknown chain {args.builtin!r}; expected one of {sorted(BUILTIN_CHAINS)}")
    if args.builtin and args.kind == "witness" and args.builtin not in WITNESSES and not args.builtin.startswith("f0:"):
        raise InputError(f"unknown witness {args.builtin!r}; expected f0:n,m or one of {sorted(WITNESSES)}")
    if not args.builtin and not args.input:
        raise InputError(f"verify {args.kind} needs an input file")
    ok, payload, text = VERIFIERS[args.kind](args)
    _emit(out, payload, args.json, text)
    return EXIT_OK if ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# tables


def table_rows(kind: str, args) -> tuple[list[str], list[list[Any]]]:
    """Column names and rows; every cell is an int, bool or str."""
    if kind == "ci-2torsion":
        cols = ["d", "closed_form", "bound_B(d-2,2)"]
        rows = [[d, closed_form_2bound(d), bound_B(d - 2, 2)] for d in args.d if d >= 4]
    elif kind == "ci-general":
        cols = ["n", "m", "min_degree", "bound_B"]
        rows = [[n, m, n + m, bound_B(n, m)] for n in args.n if n >= 2 for m in args.m if m >= 2]
    elif kind == "grass":
        cols = ["d", "m", "dim", "witness_n", "certified"]
        rows = []
        for d in args.d:
            for dim in args.dim:
                w = grass_dimension_certified(dim, d, args.m_single)
                rows.append([d, args.m_single, dim, "-" if w is None else w, w is not None])
    else:
        cols = ["n", "m", "min_d0", "M0_range"]
        rows = [
            [n, m, n + m, f"4..{variable_bound(n, m)}"]
            for n in args.n
            if n >= 2
            for m in args.m
            if m >= 2
        ]
    return cols, rows


def _format_table(cols: list[str], rows: list[list[Any]]) -> str:
    cells = [cols] + [[("yes" if c else "no") if isinstance(c, bool) else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def cmd_table(args, out: TextIO) -> int:
    cols, rows = table_rows(args.kind, args)
    payload = {"columns": cols, "rows": rows}
    _emit(out, payload, args.json, _format_table(cols, rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest


def cmd_selftest(args, out: TextIO) -> int:
    results = run_selftest()
    ok = all(r[1] for r in results)
    payload = {"ok": ok, "checks": [{"name": n, "pass": p, "detail": d} for n, p, d in results]}
    text = "\n".join(f"{'PASS' if p else 'FAIL'}  {n}: {d}" for n, p, d in results)
    _emit(out, payload, args.json, text + f"\n{sum(r[1] for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS, help="S-pair reduction cap")
    common.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS, help="intermediate term cap")
    common.add_argument("--parallel", action="store_true", help="reduce S-pairs in worker processes")

    p = _Parser(prog="torsionkit", description="Polynomial constructions, Groebner checks and torsion-order certificates.")
    p.add_argument("--version", action="version", version=f"torsionkit {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build a polynomial family")
    c.add_argument(
        "family",
        choices=["f0", "g", "base-n3", "double-cone", "check-f", "ci", "ci-low", "product", "fixed"],
    )
    for flag in ("n", "m", "N", "d", "M"):
        c.add_argument(f"--{flag}", type=int)
    c.add_argument("--j0", help="variable receiving the double cone, e.g. x4")
    c.add_argument("--degrees", type=int_list)
    c.add_argument("--Ms", type=int_list)
    c.add_argument("--ds", type=int_list)
    c.add_argument("--name", help=f"fixed example: {', '.join(sorted(FIXED))}")
    c.add_argument("--h-poly", help="polynomial choice h for check-f")
    c.set_defaults(func=cmd_construct)

    ce = sub.add_parser("certify", parents=[common], help="apply the divisibility theorems")
    ce.add_argument("kind", choices=["ci", "product", "grass"])
    ce.add_argument("--degrees", type=int_list)
    ce.add_argument("--dim", type=int)
    ce.add_argument("--m", type=int)
    ce.add_argument("--char", type=int, default=0)
    ce.add_argument("--Ms", type=int_list)
    ce.add_argument("--ds", type=int_list)
    ce.add_argument("--l", type=int)
    ce.add_argument("--n", type=int)
    ce.add_argument("--d", type=int)
    ce.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", parents=[common], help="check a Groebner, closure, chain or witness claim")
    v.add_argument("kind", choices=sorted(VERIFIERS))
    v.add_argument("input", nargs="?", help="JSON input file")
    v.add_argument("--builtin", help="built-in chain (birational, chart) or witness (f0:n,m, quartic, ci23, chart)")
    v.add_argument("--emit-input", action="store_true", help="print the JSON input of a built-in and stop")
    v.add_argument("--samples", type=int, default=5, help="random ideal elements for closure checks")
    v.add_argument("--seed", type=int, default=2024)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", parents=[common], help="tabulate bounds")
    t.add_argument("kind", choices=["ci-2torsion", "ci-general", "grass", "product"])
    t.add_argument("--d", type=int_range, default=range(4, 9), help="degree range lo..hi")
    t.add_argument("--n", type=int_range, default=range(2, 7), help="witness range lo..hi")
    t.add_argument("--m", type=int_range, help="m range lo..hi (default 2..3; grass takes one value, default 2)")
    t.add_argument("--dim", type=int_range, default=range(1, 11), help="Grassmannian dimension range lo..hi")
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("selftest", parents=[common], help="run the built-in consistency checks")
    s.set_defaults(func=cmd_selftest)
    return p


def run(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(list(argv))
        if args.verb == "table":
            if args.kind == "grass":
                if args.m is not None and len(args.m) != 1:
                    raise InputError("table grass takes a single --m value")
                args.m_single = 2 if args.m is None else args.m[0]
            elif args.m is None:
                args.m = range(2, 4)
        return args.func(args, out)
    except ResourceLimit as exc:
        err.write(f"torsionkit: resource limit: {exc}\n")
        return EXIT_LIMIT
    except (InputError, TorsionKitError) as exc:
        err.write(f"torsionkit: error: {exc}\n")
        return EXIT_INPUT
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
