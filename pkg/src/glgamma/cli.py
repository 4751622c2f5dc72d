"""Command-line surface: inspect objects, run verification suites.

Subcommands: classes, char, bessel, bs, gamma, kloosterman, verify,
cache.  All arithmetic is exact; printed values are serialized elements
of Q(zeta_m)[sqrt q] plus a floating-point approximation for reading.
`verify` writes a canonical JSON document (stable key order, explicit
schema version) to stdout and optionally to --out; human summaries and
timing go to stderr so reports stay byte-identical across reruns.

Exit codes: 0 success, 1 at least one check failed, 2 usage error or
budget refusal.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from pathlib import Path

import numpy as np

from .cache import (cache_clear, cache_entries, cache_load, cache_store,
                    default_cache_dir, format_data, group_key, group_payload,
                    profile_key, profile_payload)
from .characters import (Cusp2Datum, Datum, GL1Datum, InducedCuspidals,
                         PrincipalSeriesRegular, RepSpec, UnsupportedRepError,
                         central_exponent, char_of_repspec, inner_product_int,
                         parse_cuspidal_data, parse_rep_spec, spec_degree)
from .gammafactors import (check_contragredient, check_convolution,
                           check_gamma_norm, check_gj_multiplicativity,
                           check_gk_mult_first, check_gk_mult_second,
                           check_unipotent_average, gamma_gj,
                           gamma_gj_twisted, gamma_gk, gamma_gk_tilde,
                           measure_matching_cuspidal)
from .glclasses import BudgetError, get_group
from .kloosterman import (check_bs_kloosterman, check_kl_multiplicativity,
                          kl_profile, kl_sum)
from .report import (failing_lines, overall_exit, reports_to_json, summarize,
                     write_reports)
from .whittaker import (antidiagonal_embed, bessel_J, special_value_profile,
                        tau_degree)
from .zeta import (_DEFAULT_SEED, _cusp2_orbit_reps, check_appendix_c2,
                   check_dual_routes, check_fe_with_function,
                   check_kaplan_fe, check_macdonald_fe,
                   check_zeta_dual_identity, converse_scan, generic_specs)

# ---------------------------------------------------------------------------
# small shared helpers
# ---------------------------------------------------------------------------

def _parse_matrix(text: str, q: int) -> np.ndarray:
    """Parse 'a,b;c,d' into a square integer matrix with entries mod q."""
    rows = [[int(x) for x in row.split(",")] for row in text.split(";")]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError(f"matrix {text!r} is not square")
    return np.array(rows, dtype=np.int64) % q


def _approx(val) -> str:
    re, im = val.to_complex_approx()
    return f"{re:+.6f}{im:+.6f}i"


def _exact(val) -> str:
    return json.dumps(val.serialize(), sort_keys=True)


def _vacuous(suite: str, params: dict, reason: str) -> dict:
    return {"suite": suite, "params": params, "ok": True,
            "cases": [{"name": "vacuous", "status": "skipped",
                       "reason": reason}]}


def _tau_data_grid(q: int, max_k: int) -> list[tuple[Datum, ...]]:
    """Distinct-cuspidal-data tuples of total degree <= max_k, in a
    fixed deterministic order."""
    out: list[tuple[Datum, ...]] = []
    if max_k >= 1:
        out += [(GL1Datum(a),) for a in range(q - 1)]
    if max_k >= 2:
        out += [tuple(GL1Datum(x) for x in pair)
                for pair in itertools.combinations(range(q - 1), 2)]
        out += [(Cusp2Datum(s),) for s in _cusp2_orbit_reps(q)]
    if max_k >= 3:
        out += [tuple(GL1Datum(x) for x in trip)
                for trip in itertools.combinations(range(q - 1), 3)]
        out += [(GL1Datum(a), Cusp2Datum(s)) for a in range(q - 1)
                for s in _cusp2_orbit_reps(q)]
    return out


def _pi_specs(q: int) -> list[RepSpec]:
    """Irreducible specs of GL_1 and GL_2 in a fixed order."""
    return generic_specs(q, 1) + generic_specs(q, 2)


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _suite_infra(args) -> list[dict]:
    q = args.q
    max_n = args.max_n or 3
    cases = []
    for n in range(1, max_n + 1):
        ctx = get_group(q, n)
        total = sum(info.size for info in ctx.classes)
        good = total == ctx.order
        cases.append({"name": f"class-sizes n={n}",
                      "status": "pass" if good else "fail",
                      "lhs": str(total), "rhs": str(ctx.order)})
    reports = [{"suite": "infra", "params": {"q": q, "max_n": max_n},
                "ok": all(c["status"] == "pass" for c in cases),
                "cases": cases}]
    for spec in _pi_specs(q):
        reports.append(check_dual_routes(q, spec))
    return reports


def _suite_gj_mult(args) -> list[dict]:
    q, t = args.q, args.t
    max_c = args.max_c or 2
    reports = []
    if max_c >= 2:
        for pair in itertools.combinations(range(q - 1), 2):
            reports.append(check_gj_multiplicativity(
                q, PrincipalSeriesRegular(pair), t))
    if max_c >= 3:
        for a in range(q - 1):
            for s in _cusp2_orbit_reps(q):
                reports.append(check_gj_multiplicativity(
                    q, InducedCuspidals((GL1Datum(a), Cusp2Datum(s))), t))
    if not reports:
        reports.append(_vacuous("gj-mult", {"q": q, "t": t, "max_c": max_c},
                                "no factorizable specs with distinct "
                                "cuspidal data at this q"))
    return reports


def _suite_gj_fe(args) -> list[dict]:
    q, t = args.q, args.t
    max_c = args.max_c or 2
    extra = args.extra if args.extra is not None else 4
    specs: list[RepSpec] = list(generic_specs(q, 1))
    if max_c >= 2:
        specs += generic_specs(q, 2)
    reports = []
    for pi in specs:
        for a in range(q - 1):
            reports.append(check_macdonald_fe(q, pi, a, t, extra=extra,
                                              seed=args.seed))
    return reports


def _suite_gk_mult1(args) -> list[dict]:
    q, t = args.q, args.t
    max_k = args.max_k or 2
    reports = []
    for pair in itertools.combinations(range(q - 1), 2):
        pi_data = (GL1Datum(pair[0]), GL1Datum(pair[1]))
        for tau in _tau_data_grid(q, max_k):
            reports.append(check_gk_mult_first(q, pi_data, tau, t))
    if not reports:
        reports.append(_vacuous("gk-mult1", {"q": q, "t": t},
                                "no pair of distinct degree-one data "
                                "at this q"))
    # the convolution and unipotent-average identities underlie the
    # first-argument expansion; run them alongside it
    if q >= 3:
        tau1, tau2 = (GL1Datum(0),), (GL1Datum(1),)
    else:
        tau1, tau2 = (GL1Datum(0),), (Cusp2Datum(1),)
    reports.append(check_convolution(q, tau1, tau2, 1, t))
    if q >= 3:
        reports.append(check_convolution(q, tau1, tau2, 2, t))
    deg2 = [d for d in _tau_data_grid(q, 2) if tau_degree(d) == 2]
    reports.append(check_unipotent_average(q, deg2[0], 1, 1, t))
    return reports


def _suite_gk_mult2(args) -> list[dict]:
    q, t = args.q, args.t
    reports = []
    pairs = list(itertools.combinations(range(q - 1), 2))
    for pi in _pi_specs(q):
        for a, b in pairs:
            reports.append(check_gk_mult_second(q, pi, (GL1Datum(a),),
                                                (GL1Datum(b),), t))
    if not reports:
        reports.append(_vacuous("gk-mult2", {"q": q, "t": t},
                                "no pair of distinct degree-one data "
                                "at this q"))
    return reports


def _suite_gk_norm(args) -> list[dict]:
    q, t = args.q, args.t
    max_k = args.max_k or 2
    reports = []
    for pi in _pi_specs(q):
        for tau in _tau_data_grid(q, max_k):
            reports.append(check_gamma_norm(q, pi, tau, t))
    for s in _cusp2_orbit_reps(q):
        reports.append(measure_matching_cuspidal(q, s, t))
    return reports


def _suite_contragredient(args) -> list[dict]:
    q, t = args.q, args.t
    max_k = args.max_k or 2
    reports = []
    for pi in _pi_specs(q):
        for tau in _tau_data_grid(q, max_k):
            reports.append(check_contragredient(q, pi, tau, t))
    return reports


def _suite_gk_fe(args) -> list[dict]:
    q, t = args.q, args.t
    max_c = args.max_c or 1
    max_k = args.max_k or 2
    extra = args.extra if args.extra is not None else 8
    reports = []
    for c in range(1, max_c + 1):
        pis = generic_specs(q, c)
        taus = [d for d in _tau_data_grid(q, max_k)
                if tau_degree(d) >= 2 and tau_degree(d) * c <= 6]
        for tau in taus:
            for pi in pis:
                reports.append(check_kaplan_fe(q, pi, tau, c, t,
                                               extra=extra, seed=args.seed))
                reports.append(check_fe_with_function(q, pi, tau, c, t,
                                                      extra=min(extra, 4),
                                                      seed=args.seed))
        if taus:
            reports.append(check_zeta_dual_identity(q, pis[0], taus[0], c, t,
                                                    extra=2, seed=args.seed))
    if not reports:
        reports.append(_vacuous("gk-fe", {"q": q, "t": t},
                                "no data tuples of degree >= 2 in range"))
    return reports


def _suite_bs_kloosterman(args) -> list[dict]:
    q, t = args.q, args.t
    k = args.k or 2
    cs = [args.c] if args.c else [1, 2]
    reports = []
    for c in cs:
        if k * c > 6:
            continue
        for expo in itertools.combinations(range(q - 1), k):
            reports.append(check_bs_kloosterman(q, k, c, expo, t))
    if not reports:
        reports.append(_vacuous("bs-kloosterman", {"q": q, "k": k, "t": t},
                                "no tuples of pairwise distinct exponents "
                                "at this q"))
    return reports


def _suite_kl_mult(args) -> list[dict]:
    q, t = args.q, args.t
    ks = [args.k] if args.k else [2, 3]
    c1 = args.c1 or 1
    c2 = args.c2 or 1
    reports = [check_kl_multiplicativity(q, k, c1, c2, None, t) for k in ks]
    if q == 2 and not args.c1 and not args.c2:
        reports.append(check_kl_multiplicativity(2, 2, 1, 2, None, t))
    return reports


def _suite_converse(args) -> list[dict]:
    return [converse_scan(args.q, args.k or 2, args.t)]


def _suite_appendix_c2(args) -> list[dict]:
    q, t = args.q, args.t
    extra = args.extra if args.extra is not None else 4
    return [check_appendix_c2(q, s, t, extra=extra, seed=args.seed)
            for s in _cusp2_orbit_reps(q)]


SUITE_BUILDERS = {
    "infra": _suite_infra,
    "gj-mult": _suite_gj_mult,
    "gj-fe": _suite_gj_fe,
    "gk-mult1": _suite_gk_mult1,
    "gk-mult2": _suite_gk_mult2,
    "gk-norm": _suite_gk_norm,
    "contragredient": _suite_contragredient,
    "gk-fe": _suite_gk_fe,
    "bs-kloosterman": _suite_bs_kloosterman,
    "kl-mult": _suite_kl_mult,
    "converse": _suite_converse,
    "appendix-c2": _suite_appendix_c2,
}

SUITE_ORDER = list(SUITE_BUILDERS)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_classes(args) -> int:
    cache_dir = Path(args.cache_dir) if args.cache_dir else \
        default_cache_dir()
    key = group_key(args.q, args.n)
    payload = cache_load(cache_dir, key)
    if payload is None:
        payload = group_payload(args.q, args.n)
        cache_store(cache_dir, key, payload)
    for entry in payload["classes"]:
        print(f"{entry['label']}  size={entry['size']}")
    total = sum(entry["size"] for entry in payload["classes"])
    print(f"classes={len(payload['classes'])} total={total} "
          f"group_order={payload['order']}")
    return 0 if total == payload["order"] else 1


def cmd_char(args) -> int:
    spec = parse_rep_spec(args.spec, args.n)
    chi = char_of_repspec(args.q, spec)
    norm = inner_product_int(chi, chi)
    print(f"spec={spec!r}")
    print(f"dim={chi.dim()}")
    print(f"central_exponent={central_exponent(args.q, spec)}")
    print(f"norm={norm}")
    if args.values:
        for info, val in zip(chi.ctx.classes, chi.values):
            print(f"{info.label}: {_exact(val)}")
    return 0 if norm == 1 else 1


def cmd_bessel(args) -> int:
    spec = parse_rep_spec(args.spec, args.n)
    chi = char_of_repspec(args.q, spec)
    k = spec_degree(spec)
    if args.matrix:
        g = _parse_matrix(args.matrix, args.q)
        val = bessel_J(chi, g, args.t)
        print(f"J = {_exact(val)}")
        print(f"J ~ {_approx(val)}")
        return 0
    for h in range(1, args.q):
        g = antidiagonal_embed(np.array([[h]], dtype=np.int64), k, 1)
        val = bessel_J(chi, g, args.t)
        print(f"J(antidiag(I_{k - 1}, {h})) = {_exact(val)} ~ {_approx(val)}")
    return 0


def cmd_bs(args) -> int:
    tau = parse_cuspidal_data(args.tau)
    prof = special_value_profile(args.q, tau, args.c, args.t)
    print(f"BS profile q={args.q} tau={format_data(tau)} c={args.c} "
          f"k={prof.k} t={args.t}")
    for info, val in zip(prof.group().classes, prof.values):
        print(f"{info.label}: {_exact(val)} ~ {_approx(val)}")
    return 0


def cmd_gamma(args) -> int:
    pi = parse_rep_spec(args.pi, args.n)
    if args.kind == "gj":
        if args.a is not None:
            gv = gamma_gj_twisted(args.q, pi, args.a, args.t)
        else:
            gv = gamma_gj(args.q, pi, args.t)
    else:
        if not args.tau:
            raise ValueError(f"gamma kind {args.kind!r} needs --tau")
        tau = parse_cuspidal_data(args.tau)
        maker = gamma_gk if args.kind == "gk" else gamma_gk_tilde
        gv = maker(args.q, pi, tau, args.t)
    print(f"definition={gv.definition} pi={gv.pi!r} "
          f"tau={format_data(gv.tau) if gv.tau else None} t={gv.psi_twist}")
    print(f"gamma = {_exact(gv.value)}")
    print(f"gamma ~ {_approx(gv.value)}")
    norm = gv.value * gv.value.conj()
    print(f"|gamma|^2 = {_exact(norm)}")
    return 0


def cmd_kloosterman(args) -> int:
    alphas = tuple(int(x) for x in args.alphas.split(","))
    if args.matrix:
        h = _parse_matrix(args.matrix, args.q)
        val = kl_sum(args.q, args.c, alphas, h, args.t)
        print(f"Kl = {_exact(val)}")
        print(f"Kl ~ {_approx(val)}")
        return 0
    ctx = get_group(args.q, args.c)
    values = kl_profile(args.q, args.c, alphas, args.t)
    print(f"Kl profile q={args.q} c={args.c} alphas={list(alphas)} "
          f"t={args.t}")
    for info, val in zip(ctx.classes, values):
        print(f"{info.label}: {_exact(val)} ~ {_approx(val)}")
    return 0


def cmd_verify(args) -> int:
    names = SUITE_ORDER if args.suite == "all" else [args.suite]
    start = time.perf_counter()
    reports = []
    for name in names:
        reports.extend(SUITE_BUILDERS[name](args))
    sys.stdout.write(reports_to_json(reports))
    for report in reports:
        print(summarize(report), file=sys.stderr)
        for line in failing_lines(report):
            print(line, file=sys.stderr)
    print(f"elapsed: {time.perf_counter() - start:.2f}s", file=sys.stderr)
    if args.out:
        write_reports(args.out, reports)
    return overall_exit(reports)


def cmd_cache(args) -> int:
    cache_dir = Path(args.cache_dir) if args.cache_dir else \
        default_cache_dir()
    if args.action == "show":
        print(f"cache_dir={cache_dir}")
        for key in cache_entries(cache_dir):
            print(key)
        return 0
    if args.action == "clear":
        removed = cache_clear(cache_dir)
        print(f"removed={removed}")
        return 0
    # warm
    if args.q is None:
        raise ValueError("cache warm needs --q")
    stored = []
    if args.tau:
        tau = parse_cuspidal_data(args.tau)
        c = args.c or 1
        key = profile_key(args.q, tau, c, args.t)
        stored.append(cache_store(cache_dir, key,
                                  profile_payload(args.q, tau, c, args.t)))
    else:
        n = args.n or 2
        key = group_key(args.q, n)
        stored.append(cache_store(cache_dir, key,
                                  group_payload(args.q, n)))
    for path in stored:
        print(f"stored {path}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glgamma",
        description="Exact gamma factors, Bessel-Speh functions, and "
                    "twisted matrix Kloosterman sums over small finite "
                    "fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classes", help="conjugacy classes of GL_n(F_q)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("char", help="character of an irreducible spec")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--spec", required=True,
                   help="e.g. ps:0,1 / st:0 / cusp2:t=1 / det:0 / "
                        "ind:gl1:0+cusp2:1")
    p.add_argument("--n", type=int, default=None,
                   help="group size (needed for det twists)")
    p.add_argument("--values", action="store_true",
                   help="print the exact value on every class")
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("bessel", help="Bessel function of a generic spec")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--matrix", default=None, help="e.g. '0,1;1,0'")
    p.set_defaults(func=cmd_bessel)

    p = sub.add_parser("bs", help="Bessel-Speh special-value profile")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--tau", required=True, help="e.g. gl1:0+gl1:1 / cusp2:1")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.set_defaults(func=cmd_bs)

    p = sub.add_parser("gamma", help="exact gamma factor")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--pi", required=True)
    p.add_argument("--tau", default=None, help="cuspidal data of tau")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--a", type=int, default=None,
                   help="det-twist exponent for kind gj")
    p.add_argument("--kind", choices=["gj", "gk", "gk-tilde"], default="gk")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("kloosterman", help="twisted matrix Kloosterman sums")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--alphas", required=True, help="e.g. '0,1'")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--matrix", default=None)
    p.set_defaults(func=cmd_kloosterman)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITE_ORDER + ["all"])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--seed", type=int, default=_DEFAULT_SEED)
    p.add_argument("--extra", type=int, default=None,
                   help="seeded samples beyond class representatives")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--max-c", type=int, default=None)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--c1", type=int, default=None)
    p.add_argument("--c2", type=int, default=None)
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cache", help="inspect or warm the table cache")
    p.add_argument("action", choices=["show", "clear", "warm"])
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tau", default=None)
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_cache)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (UnsupportedRepError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
