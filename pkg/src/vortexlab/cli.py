"""Command-line front end.

Subcommands: ``generate``, ``verify``, ``roots``, ``export``, ``selftest``.
Exit status is 0 on success, 1 when a check fails and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from .chains import (FAMILIES, ChainTermination, FamilySpec, adler_moser_sequence, adler_moser_translating,
                     bilinear_residual, even_bispectral_sequence, even_step_residual,
                     lambda2_sequence)
from .exact_core import Poly, format_scalar, parse_scalar
from .functions import QuasiFactored
from .verify import (EQUILIBRIUM_TOL, VortexConfiguration, aberth_roots, config_from_eigenfunction,
                     config_from_polys, default_precision, invariant_checks, residual)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


# -- family construction ------------------------------------------------------

def _family_name(family: str, branch: str | None) -> str:
    if family == "lambda2":
        if branch in (None, "+", "plus"):
            return "lambda2_plus"
        if branch in ("-", "minus"):
            return "lambda2_minus"
        raise InputError(f"unknown branch {branch!r}")
    return family


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"parameter {item!r} is not NAME=VALUE")
        name, value = item.split("=", 1)
        try:
            params[name.strip()] = parse_scalar(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad value for {name}: {exc}") from exc
    return params


# charge carried by each generated polynomial in the configuration
def _species(family: str, n: int, polys: dict) -> list[tuple[Poly, int]]:
    if family == "adler_moser":
        return [(polys[f"P{n}"], 1), (polys[f"P{n - 1}"], -1)]
    if family == "lambda2_plus":
        return [(polys[f"q{n}"], 2), (polys[f"p{n - 1}"], -1)]
    if family == "lambda2_minus":
        return [(polys[f"q-{n}"], 2), (polys[f"p-{n}"], -1)]
    if family == "lambda2_terminating":
        return [(polys[f"tau{i}"], 2 if i % 2 == 0 else -1) for i in (n, n - 1)]
    raise InputError(f"family {family!r} has no configuration builder")


def build_family(family: str, n: int, params: dict, k=None, precision_bits: int | None = None):
    """Polynomials and configuration of one family member.

    Returns ``(polys, config)``: ``polys`` maps names to ``Poly`` and
    ``config`` is the :class:`VortexConfiguration` built from them.  With a
    nonzero ``k`` the Adler-Moser family gives the translating pair.
    """
    if family not in FAMILIES or family == "kwcc":
        choices = ", ".join(f for f in FAMILIES if f != "kwcc")
        raise InputError(f"unknown family {family!r}; choose from {choices}")
    if n < 1:
        raise InputError("--n must be at least 1")
    spec = FamilySpec(family, n, params)
    try:
        spec.validate()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    prov = spec.to_json()
    if k:
        if family != "adler_moser":
            raise InputError("--k applies to the adler_moser family only")
        p, q = adler_moser_translating(n, k, params)
        prov["k"] = format_scalar(k)
        polys = {f"p{n}": p, f"P{n}": q}
        return polys, config_from_polys([(p, 1), (q, -1)], k=k, precision_bits=precision_bits, provenance=prov)
    polys = spec.generate()
    if family == "even_bispectral":
        f = QuasiFactored.build([(polys[f"P{n}"], 1), (polys[f"P{n - 1}"], -1)], var="w")
        return polys, config_from_eigenfunction(f, "plane", precision_bits, prov)
    species = [(p, q) for p, q in _species(family, n, polys) if p.degree]
    return polys, config_from_polys(species, precision_bits=precision_bits, provenance=prov)


def _poly_doc(polys: dict) -> dict:
    return {name: p.to_json() for name, p in polys.items()}


# -- subcommands ------------------------------------------------------------------

def _precision(args) -> int:
    return args.precision_bits or default_precision()


def cmd_generate(args) -> int:
    family = _family_name(args.family, args.branch)
    params = _parse_params(args.param)
    k = parse_scalar(args.k) if args.k else None
    try:
        polys, conf = build_family(family, args.n, params, k, _precision(args))
    except ChainTermination as stop:
        print(f"chain terminates: {stop}", file=sys.stderr)
        return EXIT_FAIL
    if args.geometry and args.geometry != conf.geometry:
        raise InputError(f"family {family} produces a {conf.geometry} configuration")
    if args.format == "csv":
        text = conf.to_csv()
    else:
        doc = {"family": family, "n": args.n, "params": {k: format_scalar(v) for k, v in params.items()},
               "polynomials": _poly_doc(polys), "configuration": conf.to_json()}
        if k is not None:
            doc["k"] = format_scalar(k)
        text = json.dumps(doc, indent=2)
    _emit(text, args.out)
    for name, p in polys.items():
        print(f"{name} = {p}", file=sys.stderr)
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _config_of(doc: dict) -> VortexConfiguration:
    inner = doc.get("configuration", doc)
    try:
        return VortexConfiguration.from_json(inner)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else EQUILIBRIUM_TOL
    status = EXIT_OK
    for path in args.paths:
        doc = _load(path)
        conf = _config_of(doc)
        if args.precision_bits:
            conf.precision_bits = args.precision_bits
        if "family" in doc and "polynomials" in doc:
            try:
                params = {k: parse_scalar(str(v)) for k, v in doc.get("params", {}).items()}
                k = parse_scalar(doc["k"]) if "k" in doc else None
                polys, _ = build_family(doc["family"], int(doc["n"]), params, k, conf.precision_bits)
                stored = {name: Poly.from_json(p) for name, p in doc["polynomials"].items()}
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"{path}: malformed document: {exc}") from exc
            same = stored == polys
            print(f"{path}: polynomials {'match' if same else 'DIFFER from'} regeneration")
            if not same:
                status = EXIT_FAIL
        try:
            r = residual(conf)
        except ValueError as exc:
            print(f"{path}: FAIL equilibrium ({exc})")
            status = EXIT_FAIL
            continue
        inv = invariant_checks(conf)
        ok = r < tol
        print(f"{path}: {'PASS' if ok else 'FAIL'} equilibrium residual {mpmath.nstr(r, 5)} (tol {tol:g}); "
              f"scaling_sum {inv.scaling_sum}, neutrality_sum {inv.neutrality_sum}")
        if not ok:
            status = EXIT_FAIL
    return status


def cmd_roots(args) -> int:
    family = _family_name(args.family, args.branch)
    params = _parse_params(args.param)
    k = parse_scalar(args.k) if args.k else None
    bits = _precision(args)
    try:
        polys, _ = build_family(family, args.n, params, k, bits)
    except ChainTermination as stop:
        print(f"chain terminates: {stop}", file=sys.stderr)
        return EXIT_FAIL
    digits = int(bits * 0.30103) + 2
    lines = ["poly,re,im"]
    for name, p in polys.items():
        if p.degree == 0:
            continue
        for r in aberth_roots(p, bits, args.tol_roots):
            lines.append(f"{name},{mpmath.nstr(mpmath.re(r), digits)},{mpmath.nstr(mpmath.im(r), digits)}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    conf = _config_of(_load(args.path))
    text = conf.to_csv() if args.format == "csv" else conf.dumps()
    _emit(text, args.out)
    return EXIT_OK


def _rand(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-20, 20), rng.randint(1, 9))


def selftest_results(seed: int = 0) -> list[tuple[str, bool, str]]:
    """Exact identities per family at random rational parameters."""
    from .darboux import abel_triple, darboux3
    from .sk_hierarchy import sk_params_from_times, sk_tau
    from .streets import SolitonSeed, soliton_tau, street_bilinear_residual
    from .functions import QuasiFactored as QF

    rng = random.Random(seed)
    out = []
    params = {f"s{i}": _rand(rng) for i in range(1, 6)}
    seq = adler_moser_sequence(6, params)
    ok = all(bilinear_residual(seq[i], seq[i + 1], 1).is_zero for i in range(6))
    out.append(("adler_moser", ok, "Tkachenko residual of P_0..P_6"))

    lp = {"r1": _rand(rng), "s2": _rand(rng), "r2": _rand(rng), "s3": _rand(rng), "r3": _rand(rng)}
    ps, qs = lambda2_sequence(3, "+", lp)
    ok = all(bilinear_residual(ps[i], qs[i], 2).is_zero and bilinear_residual(ps[i], qs[i + 1], 2).is_zero
             for i in range(3))
    out.append(("lambda2_plus", ok, "Lambda=2 residual of p_i, q_i and p_i, q_{i+1}"))

    lm = {"s-1": _rand(rng), "r-2": _rand(rng), "s-2": _rand(rng)}
    ps, qs = lambda2_sequence(2, "-", lm)
    ok = all(bilinear_residual(ps[i], qs[i], 2).is_zero for i in range(3))
    out.append(("lambda2_minus", ok, "Lambda=2 residual of p_-i, q_-i"))

    ev = even_bispectral_sequence(4, {"s2": _rand(rng), "s3": _rand(rng)})
    ok = all(even_step_residual(ev[i + 1], ev[i]).is_zero for i in range(4))
    out.append(("even_bispectral", ok, "generalized Tkachenko residual with the origin as third species"))

    tp = {"s2": _rand(rng), "r2": _rand(rng)}
    ok = all(residual(build_family("lambda2_terminating", n, tp)[1]) < EQUILIBRIUM_TOL for n in range(2, 6))
    out.append(("lambda2_terminating", ok, "equilibrium residual of (tau_{n-1}, tau_n), n = 2..5"))

    hat = darboux3(QF.from_poly(Poly.gen()), _rand(rng), _rand(rng))
    triple = abel_triple(QF.from_poly(Poly.gen()), hat)
    out.append(("darboux3", triple.defect()[0].is_zero, "Abel identity after one third-order step"))

    seeds = [SolitonSeed(k, _rand(rng) or Fraction(1)) for k in (1, 2, 3)]
    t = [soliton_tau(seeds[:j]) for j in range(4)]
    ok = all(street_bilinear_residual(t[j], t[j + 1]).is_zero for j in range(3))
    out.append(("soliton_street", ok, "periodic Tkachenko residual of tau_0..tau_3"))

    times = {5: _rand(rng), 7: _rand(rng), 11: _rand(rng)}
    c = {4: _rand(rng)}
    q3 = sk_tau(3, times, c)
    pr = sk_params_from_times(3, times, c)
    pr.setdefault("r3", 0)
    _, q3_chain = lambda2_sequence(3, "+", pr)
    out.append(("sk_pfaffian", q3_chain[3] == q3, "Pfaffian q_3 equals the chain q_3 after re-mapping"))
    return out


def cmd_selftest(args) -> int:
    results = selftest_results(args.seed)
    for name, ok, what in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {what}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAIL


# -- parser ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, family: bool = False) -> None:
    p.add_argument("--precision-bits", type=int, default=None,
                   help="working precision in bits (default: $VORTEXLAB_PRECISION_BITS or 128)")
    p.add_argument("--tol", type=float, default=None, help=f"equilibrium tolerance (default {EQUILIBRIUM_TOL:g})")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")
    if family:
        p.add_argument("--family", required=True, help=f"one of {', '.join(FAMILIES)} or lambda2")
        p.add_argument("--n", type=int, required=True, help="member index (>= 1)")
        p.add_argument("--branch", default=None, help="lambda2 branch: + or - (default +)")
        p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                       help="exact parameter, e.g. s1=1/2 or r1=1/2+3/4i (repeatable)")
        p.add_argument("--geometry", choices=("plane", "cylinder"), default=None,
                       help="expected geometry of the configuration")
        p.add_argument("--k", default=None, help="background k for translating Adler-Moser configurations")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vortexlab", description="Exact vortex equilibrium toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    g = sub.add_parser("generate", help="build a family member and its configuration document")
    _common(g, family=True)
    g.set_defaults(func=cmd_generate)
    v = sub.add_parser("verify", help="check configuration documents against the equilibrium equations")
    v.add_argument("paths", nargs="+")
    _common(v)
    v.set_defaults(func=cmd_verify)
    r = sub.add_parser("roots", help="print roots of the polynomials of a family member")
    _common(r, family=True)
    r.add_argument("--tol-roots", type=float, default=None, help="root residual tolerance (default 1e-30)")
    r.set_defaults(func=cmd_roots)
    e = sub.add_parser("export", help="convert a configuration document to CSV or JSON")
    e.add_argument("path")
    _common(e)
    e.set_defaults(func=cmd_export)
    s = sub.add_parser("selftest", help="run the exact identity checks")
    _common(s)
    s.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
