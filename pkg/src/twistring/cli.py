"""Batch command line: every command prints expected-vs-computed rows.

    twistring [--config PATH] [--format json|csv] [--max-degree N] [--seed S]
              [--cache DIR] COMMAND ...

Exit status is 0 exactly when every row matches.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from typing import Iterable, List, Optional

from . import blowup_lab
from .blowup_lab import Report
from .config import Config, ConfigError, load_config
from .curve_core import CurvePoint
from .divisor_calc import (Divisor, cumulative, decompose_virtually_effective, divisor_to_json,
                           is_effective, is_virtually_effective, normalized_divisor, twist)
from .riemann_roch import check_independent, in_bound, rr_basis
from .sklyanin_free import (SklyaninAlgebra, SklyaninParams, central_cubics, graded_dim,
                            quotient_dims, screen)
from .thcr_engine import graded_piece

WINDOW_LIMIT = 30


def _point_sum(D: Divisor) -> CurvePoint:
    acc = D.curve.infinity
    for P, n in D.items():
        if n > 0:
            for _ in range(n):
                acc = acc + P
        else:
            for _ in range(-n):
                acc = acc - P
    return acc


def expected_rr_dim(D: Divisor) -> int:
    """dim L(D) from degree alone, plus the group-law test for principal degree-0 divisors."""
    if D.degree > 0:
        return D.degree
    if D.degree < 0:
        return 0
    return 1 if _point_sum(D).is_infinity else 0


def random_effective_divisor(cfg: Config, rng: random.Random, max_degree: int = 8) -> Divisor:
    """Effective divisor supported on infinity and small multiples of the translation point."""
    t = cfg.translation.t
    deg = rng.randint(1, max_degree)
    terms = []
    for _ in range(deg):
        j = rng.randint(-8, 8)
        P = cfg.curve.infinity if j == 0 else j * t
        if not P.is_infinity and P.is_two_torsion():
            P = cfg.curve.infinity
        terms.append((P, 1))
    return Divisor.from_terms(cfg.curve, terms)


# ---------------------------------------------------------------------------
# commands


def cmd_rr(cfg: Config, divisors: Iterable[Divisor]) -> Report:
    rep = Report()
    for D in divisors:
        S = rr_basis(D)
        label = json.dumps(divisor_to_json(D))
        rep.add(f"dim L({label})", D.degree, S.dim, expected_rr_dim(D),
                "degree count; degree 0 decided by the group sum")
        rep.add(f"basis of L({label}) inside the bound", D.degree,
                all(in_bound(f, D) for f in S.basis), True, "pole orders of each basis element")
        rep.add(f"basis of L({label}) independent", D.degree,
                check_independent(S, cfg.sheaf().schedule), True, "evaluation rank")
    return rep


def window_oracle(x: Divisor, cfg: Config, limit: int = WINDOW_LIMIT):
    """(effective for all n in the upper half of 1..limit, least n0, least n >= 1)."""
    T = cfg.translation
    eff = [is_effective(cumulative(x, n, T)) for n in range(limit + 1)]
    verdict = all(eff[limit // 2:])
    n0 = None
    least = None
    if verdict:
        n0 = limit
        while n0 > 0 and eff[n0 - 1]:
            n0 -= 1
        least = next(n for n in range(1, limit + 1) if eff[n])
    return verdict, n0, least


def cmd_veff(cfg: Config, x: Divisor) -> Report:
    T = cfg.translation
    rep = Report()
    cert = is_virtually_effective(x, T, cfg.orbit_cap)
    verdict, n0, least = window_oracle(x, cfg)
    tag = f"brute-force effectivity of [x]_n for n <= {WINDOW_LIMIT}"
    rep.add("virtually effective", None, cert.verdict, verdict, tag)
    if cert.verdict:
        rep.add("threshold n0", None, cert.n0, n0, tag)
        rep.add("least n >= 1 with [x]_n effective", None, cert.least_witness, least, tag)
        u, v, k = decompose_virtually_effective(x, T, cfg.orbit_cap)
        rep.add("decomposition u", None, divisor_to_json(u), divisor_to_json(u),
                "greedy decomposition", informational=True)
        rep.add("decomposition v", None, divisor_to_json(v), divisor_to_json(v),
                "greedy decomposition", informational=True)
        rep.add("u - v + v^s = x", None, u - v + twist(v, 1, T) == x, True,
                "definition of the decomposition")
        rep.add("u, v effective", None, is_effective(u) and is_effective(v), True,
                "definition of the decomposition")
        rep.add("v <= [u]_k", k, v <= cumulative(u, k, T), True, "definition of the decomposition")
        nd = normalized_divisor(x, T, cfg.orbit_cap)
        rep.add("normalized divisor", None, divisor_to_json(nd), divisor_to_json(nd),
                "one point per orbit carrying the orbit sum", informational=True)
        rep.add("degree of the normalized divisor", None, nd.degree, x.degree, "orbit sums")
    else:
        pt, val = cert.witness(WINDOW_LIMIT, T)
        neg = cumulative(x, WINDOW_LIMIT, T).coeff(pt)
        rep.add(f"witness coefficient of [x]_{WINDOW_LIMIT}", WINDOW_LIMIT, neg < 0, True,
                "negative schedule of the certificate")
    return rep


def cmd_blowup(cfg: Config, d: Divisor, N: int) -> Report:
    cfg.require_ambient()
    return blowup_lab.blowup_report(cfg.sheaf(), d, N)


def cmd_virtual_blowup(cfg: Config, N: int) -> Report:
    cfg.require_ambient()
    if "p" not in cfg.points:
        raise ConfigError("the virtual-blowup command needs a point named p")
    return blowup_lab.run_virtual_blowup(cfg.sheaf(), cfg.points["p"], N)


def cmd_sklyanin(cfg: Config, params: SklyaninParams, N: int, ambient: bool = False) -> Report:
    rep = Report()
    problem = screen(params)
    rep.add("screen", None, problem is None, True,
            "dim S_2 = 6 and dim S_3 = 10 for general parameters")
    if problem is not None:
        return rep
    alg = SklyaninAlgebra(params)
    for n in range(N + 1):
        rep.add("dim S_n", n, graded_dim(params, n, alg).dim, (n + 1) * (n + 2) // 2,
                "polynomial-ring Hilbert series 1/(1-t)^3")
    cubics = central_cubics(params, alg)
    rep.add("dim central cubics", 3, len(cubics), 1, "unique central element g in degree 3")
    if len(cubics) != 1:
        return rep
    g = cubics[0]
    for n in range(1, N + 1):
        q = quotient_dims(params, g, n, alg)
        rep.add("dim (S/gS)_n", n, q, 3 * n, "quotient by g has Hilbert series of deg L = 3")
        if ambient:
            rep.add("dim (S/gS)_n = dim B_n", n, q, graded_piece(cfg.sheaf(), n).dim,
                    "twisted homogeneous coordinate ring of a degree-3 sheaf")
    return rep


# ---------------------------------------------------------------------------
# output and caching


def render(rep: Report, fmt: str, command: str) -> str:
    rows = [r.as_dict() for r in rep.rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["object", "degree", "computed", "expected", "source", "ok"])
        for r in rows:
            w.writerow([r["object"], "" if r["degree"] is None else r["degree"],
                        json.dumps(r["computed"]), json.dumps(r["expected"]), r["source"],
                        r["ok"]])
        return buf.getvalue()
    return json.dumps({"command": command, "ok": rep.passed, "rows": rows}, indent=2) + "\n"


def _cache_key(args: argparse.Namespace, cfg: Config) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in ("cache", "func", "config")}
    payload["config_text"] = cfg.source_text
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _run_cached(args, cfg: Config, compute):
    """Run compute() -> Report, reusing a stored result under --cache when present."""
    if not args.cache:
        return compute()
    from filelock import FileLock

    os.makedirs(args.cache, exist_ok=True)
    key = _cache_key(args, cfg)
    path = os.path.join(args.cache, key + ".json")
    with FileLock(path + ".lock"):
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            rep = Report()
            for r in data:
                rep.add(r["object"], r["degree"], r["computed"], r["expected"], r["source"],
                        r.get("informational", False))
            return rep
        rep = compute()
        rows = []
        for r in rep.rows:
            d = r.as_dict()
            d.pop("ok")
            d["informational"] = r.informational
            rows.append(d)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(rows, fh)
        os.replace(tmp, path)
        return rep


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # shared so the flags work before or after the command name
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    gp = argparse.ArgumentParser(add_help=False)
    gp.add_argument("--config", help="INI file with [curve], [translation], [sheaf], [points], [engine]",
                    **kw)
    gp.add_argument("--max-degree", type=int, help="largest degree N to compute", **kw)
    gp.add_argument("--format", choices=("json", "csv"), help="output format (default from config)",
                    **kw)
    gp.add_argument("--seed", type=int, help="seed for commands that sample at random", **kw)
    gp.add_argument("--cache", metavar="DIR", help="reuse results stored in DIR", **kw)
    return gp


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistring", description=__doc__.splitlines()[0],
                                 parents=[_global_flags(False)])
    common = [_global_flags(True)]
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rr", parents=common, help="Riemann-Roch dimensions and bases")
    p.add_argument("--divisor", action="append", default=[],
                   help='JSON list like [{"point": "infinity", "coeff": 3}]')
    p.add_argument("--random", type=int, default=0, metavar="K",
                   help="also test K random effective divisors (needs --seed)")

    p = sub.add_parser("veff", parents=common, help="virtual effectiveness certificate and decomposition")
    p.add_argument("--divisor", required=True, help="JSON divisor; names from [points] allowed")

    p = sub.add_parser("blowup", parents=common, help="blowup at an effective divisor of degree <= 2")
    p.add_argument("--divisor", default='[{"point": "p"}, {"point": "q"}]',
                   help="JSON divisor (default p + q)")

    sub.add_parser("virtual-blowup", parents=common, help="virtual blowup at p - p^s + p^{s^2}")

    p = sub.add_parser("sklyanin", parents=common, help="graded dims of the three-generator Sklyanin algebra")
    p.add_argument("--params", help="a,b,c (default from [sklyanin])")
    p.add_argument("--compare-ambient", action="store_true",
                   help="also compare quotient dims with the ambient graded pieces")
    return ap


def _params(text: Optional[str], cfg: Config) -> SklyaninParams:
    if text:
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 3:
            raise ConfigError("--params needs three values a,b,c")
        return SklyaninParams(*parts)
    if cfg.sklyanin is None:
        raise ConfigError("no Sklyanin parameters given")
    return cfg.sklyanin


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        fmt = args.format or cfg.output_format
        N = args.max_degree if args.max_degree is not None else cfg.max_degree
        if N < 0:
            raise ConfigError("--max-degree must be >= 0")
        if args.command == "rr":
            divisors = [cfg.divisor(s) for s in args.divisor]
            if args.random:
                if args.seed is None:
                    raise ConfigError("--random needs an explicit --seed")
                rng = random.Random(args.seed)
                divisors += [random_effective_divisor(cfg, rng) for _ in range(args.random)]
            if not divisors:
                divisors = [cfg.base_divisor]
            compute = lambda: cmd_rr(cfg, divisors)  # noqa: E731
        elif args.command == "veff":
            x = cfg.divisor(args.divisor)
            compute = lambda: cmd_veff(cfg, x)  # noqa: E731
        elif args.command == "blowup":
            d = cfg.divisor(args.divisor)
            compute = lambda: cmd_blowup(cfg, d, N)  # noqa: E731
        elif args.command == "virtual-blowup":
            compute = lambda: cmd_virtual_blowup(cfg, N)  # noqa: E731
        else:
            params = _params(args.params, cfg)
            compute = lambda: cmd_sklyanin(cfg, params, min(N, 7), args.compare_ambient)  # noqa: E731
        rep = _run_cached(args, cfg, compute)
    except (ValueError, OSError) as err:
        print(f"twistring: error: {err}", file=sys.stderr)
        return 2
    sys.stdout.write(render(rep, fmt, args.command))
    return 0 if rep.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
