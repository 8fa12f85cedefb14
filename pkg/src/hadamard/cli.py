"""Command-line entry point: `hadamard <subcommand> ...`.

Exit codes: 0 success, 2 validation failure, 1 internal error, 64 usage error.
Reports are JSON by default (sorted keys, deterministic for a given seed);
`--format csv|table` gives flat projections of the same data."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import almost_hadamard as ahm
from . import analytics, circulant, constructions, defect, glow, obstructions, partial, quantum
from .core import ButsonMatrix, ValidationError, as_complex, equivalent_screen, read_matrix, \
    verify_butson_exact, verify_hadamard, write_matrix

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# report emission

def _plain(x):
    """JSON-safe, deterministic conversion."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=json.dumps) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "as_dict"):
        return _plain(x.as_dict())
    return str(x)


def _flat_rows(report: dict):
    """A table view: the report's "rows" list when present, otherwise
    key/value pairs of the scalar fields."""
    rep = _plain(report)
    if isinstance(rep.get("rows"), list) and rep["rows"] and isinstance(rep["rows"][0], dict):
        rows = rep["rows"]
        keys = list(dict.fromkeys(k for r in rows for k in r))
        return keys, [[r.get(k, "") for k in keys] for r in rows]
    out = []
    for k in sorted(rep):
        v = rep[k]
        out.append([k, v if not isinstance(v, (list, dict)) else json.dumps(v, sort_keys=True)])
    return ["key", "value"], out


def emit_report(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(_plain(report), sort_keys=True, indent=2) + "\n").encode()
    keys, rows = _flat_rows(report)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        w.writerows(rows)
        return buf.getvalue().encode()
    if fmt == "table":
        cells = [keys] + [[str(c) for c in r] for r in rows]
        width = [max(len(str(r[i])) for r in cells) for i in range(len(keys))]
        lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, width)).rstrip() for r in cells]
        return ("\n".join(lines) + "\n").encode()
    raise UsageError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# helpers

def _load(path):
    obj = read_matrix(path)
    return obj, as_complex(obj.to_complex() if isinstance(obj, ButsonMatrix) else obj)


def _tol(args, default):
    return default if args.tol is None else args.tol


def _phase(text: str) -> complex:
    """A unit scalar given as an angle in radians, or as re,im."""
    if "," in text:
        re, im = text.split(",")
        return complex(float(re), float(im))
    return complex(np.exp(1j * float(text)))


def _real(z, tol: float = 1e-12):
    z = complex(z)
    return z.real if abs(z.imag) <= tol * max(1.0, abs(z)) else z


def _as_butson_if_real(H):
    H = np.asarray(H)
    if not np.iscomplexobj(H) and np.all(np.abs(H) == 1):
        return ButsonMatrix((1 - H.astype(np.int64)) // 2, 2)
    return H


def _fourier_closed(H):
    """(group, closed form) when H is screen-equivalent to some F_G."""
    N = H.shape[0]
    for G in constructions.abelian_groups_upto(N):
        if G.size == N and equivalent_screen(H, constructions.fourier(G).to_complex()):
            return G, defect.defect_fourier_closed(G)
    return None, None


# ---------------------------------------------------------------------------
# subcommands

def cmd_construct(args):
    name, rest = args.name, args.params
    cat = constructions.catalogue()
    if name == "fourier":
        if not rest:
            raise ValidationError("fourier needs cycle orders, e.g. `construct fourier 5`")
        M = constructions.fourier(constructions.group(*[int(x) for x in rest]))
    elif name == "walsh":
        M = constructions.walsh(int(rest[0]) if rest else 1)
    elif name == "paley":
        q = int(rest[0])
        kind = int(rest[1]) if len(rest) > 1 else 1
        M = _as_butson_if_real(constructions.paley(q, kind))
    elif name == "williamson":
        sols = constructions.williamson_search(int(rest[0]), limit=1)
        if not sols:
            raise ValidationError("no Williamson quadruple found")
        M = _as_butson_if_real(constructions.williamson(*sols[0]))
    elif name == "fourier-circulant":
        M = circulant.fourier_circulant_form(int(rest[0])).matrix()
    elif name in constructions.NAMED:
        params = {}
        for tok in rest:
            if "=" not in tok:
                raise UsageError(f"parameters are key=angle, got {tok!r}")
            k, v = tok.split("=", 1)
            params[k] = _phase(v)
        M = constructions.named(name, **params)
    elif name in cat:
        M = cat[name][0]()
    else:
        raise ValidationError(f"unknown construction {name!r}; see `catalogue --list`")
    H = as_complex(M.to_complex() if isinstance(M, ButsonMatrix) else M)
    rep = verify_hadamard(H, _tol(args, 1e-9)).as_dict()
    rep["name"] = name
    if args.out:
        write_matrix(args.out, M)
        rep["written"] = args.out
        return rep, rep["is_hadamard"]
    from .core import format_matrix
    return format_matrix(M), rep["is_hadamard"]


def cmd_verify(args):
    obj, H = _load(args.file)
    rep = verify_hadamard(H, _tol(args, 1e-9)).as_dict()
    if isinstance(obj, ButsonMatrix):
        rep["butson_level"] = obj.level
        rep["butson_exact"] = verify_butson_exact(obj)
    return rep, rep["is_hadamard"]


def cmd_analyze(args):
    _, H = _load(args.file)
    tol = _tol(args, 1e-9)
    every = not (args.excess or args.norms or args.bistochastic_search)
    rep = {"N": H.shape[0]}
    if every or args.excess:
        rep["excess"] = analytics.excess_report(H, tol).as_dict()
        try:
            rep["row_stochastic_promote"] = analytics.row_stochastic_promote(H, tol)
        except ValidationError:
            rep["row_stochastic_promote"] = None
    if every or args.norms:
        U = H / math.sqrt(H.shape[0])
        rep["norms"] = {str(p): analytics.p_norm_report(U, p, tol).as_dict() for p in (1, 4)}
        rep["det"] = analytics.det_report(H, 1e-6)
    if every or args.bistochastic_search:
        r = analytics.bistochastic_search(H, seed=args.seed)
        rep["bistochastic_search"] = {"excess": r["excess"], "target": r["target"],
                                      "success": r["success"]}
    return rep, True


def cmd_glow(args):
    _, H = _load(args.file)
    N = H.shape[0]
    s = math.inf if args.s is None else args.s
    rows = []
    mc = None
    if args.mc:
        mc = glow.glow_mc(H, s=s, samples=args.mc, seed=args.seed, pmax=args.p)
    for p in range(1, args.p + 1):
        row = {"p": p, "exact": None, "mc_estimate": None, "mc_stderr": None}
        if args.exact or not args.mc:
            if s != math.inf:
                raise ValidationError("exact moments are over the full torus; drop --s or use --mc")
            row["exact"] = glow.glow_moment_bruteforce(H, p).real
        if mc is not None:
            row["mc_estimate"], row["mc_stderr"] = mc["moments"][p]
        rows.append(row)
    rep = {"N": N, "s": str(s), "rows": rows}
    if mc is not None:
        edges = mc["edges"]
        rep["histogram"] = [[float((edges[k] + edges[k + 1]) / 2), int(c)]
                            for k, c in enumerate(mc["counts"])]
    return rep, True


def cmd_defect(args):
    obj, H = _load(args.file)
    tol = _tol(args, 1e-8)
    if args.rows:
        S = [int(x) for x in args.rows.split(",")]
        rep = defect.phm_defect(H[S], tol=tol).as_dict()
        rep["rows"] = S
        return rep, True
    G, closed = _fourier_closed(H)
    rep = defect.defect_numeric(H, tol, closed_form=closed).as_dict()
    rep["group"] = str(G) if G is not None else None
    if args.exact:
        if not isinstance(obj, ButsonMatrix):
            raise ValidationError("--exact needs a Butson matrix file")
        rep["exact_defect"] = defect.defect_rational(obj)
    return rep, rep["agree"] is not False


def _family_matrix(args):
    fam, n = args.family, args.n
    if fam == "KN":
        return ahm.build_K_N(n)
    if fam == "LN":
        return ahm.build_L_N(n)
    if fam == "projective":
        return ahm.projective_ahm(n)
    if fam == "abc":
        if not args.abc:
            raise UsageError("--family abc needs --abc A B C")
        return ahm.abc_pattern_matrix(*args.abc)[2]
    raise UsageError(f"unknown family {fam!r}")


def cmd_ahm(args):
    if args.family:
        M = np.asarray(_family_matrix(args))
        # families come either at Hadamard scale (M M^t = N) or rescaled (M M^t = 1)
        U = M / math.sqrt(float(np.real(np.trace(M @ np.conj(M).T))) / M.shape[0])
        H = U * math.sqrt(U.shape[0])
    elif args.file:
        _, H = _load(args.file)
        U = H / math.sqrt(H.shape[0])
        if np.max(np.abs(H.imag)) == 0:
            H, U = H.real, U.real
    else:
        raise UsageError("ahm needs a file or --family")
    rep = {"N": U.shape[0], "family": args.family}
    complex_mode = args.complex or (not args.real and np.iscomplexobj(U))
    if complex_mode:
        U = as_complex(U)
        rep["critical"] = ahm.critical_check(U, "complex")
        search = ahm.phi_counterexample_search(U, seed=args.seed)
        rep["phi_min_sampled"] = search["min_phi"]
        rep["local_max"] = ahm.complex_local_max_check(U, seed=args.seed)
        rep["balanced_semi"] = ahm.balanced_check(U, "semi")
    else:
        ok, ev = ahm.local_max_check_real(np.real(U), return_eigs=True)
        rep["critical"] = ahm.critical_check(np.real(U), "real")
        rep["almost_hadamard"] = ok
        rep["two_smallest_eigs"] = None if ev is None else ev[:2]
        rep["balanced_semi"] = ahm.balanced_check(np.real(U), "semi")
    return rep, True


def cmd_circulant(args):
    rep = {}
    if args.fourier:
        C = circulant.fourier_circulant_form(args.fourier)
        F = constructions.fourier_matrix(args.fourier)
        H = C.matrix()
        rep.update({"N": C.N, "gamma": np.array(C.gamma), "symmetric": C.is_symmetric(),
                    "equivalent_to_fourier": equivalent_screen(H, F)})
    elif args.backelin:
        M, N = int(args.backelin[0]), int(args.backelin[1])
        q = [_phase(t) for t in args.backelin[2:]]
        z = circulant.backelin(M, N, q)
        C = circulant.circulant_from_root(z)
        H = C.matrix()
        rep.update({"M": M, "N": N, "root_valid": z.valid, "symmetric": C.is_symmetric()})
    elif args.from_root:
        obj, R = _load(args.from_root)
        z = circulant.CyclicRoot(R.ravel())
        rep["root_valid"] = z.valid
        rep["residuals"] = z.residuals
        C = circulant.circulant_from_root(z)
        H = C.matrix()
    else:
        raise UsageError("circulant needs --fourier, --backelin or --from-root")
    rep["is_hadamard"] = verify_hadamard(H, _tol(args, 1e-9)).is_hadamard
    if args.phi:
        if not rep["is_hadamard"]:
            raise ValidationError("--phi needs a circulant Hadamard matrix")
        q = circulant.hadamard_eigenvector(H)
        rep["phi"] = circulant.phi_functional(q)
        rep["N_squared"] = H.shape[0] ** 2
    return rep, rep["is_hadamard"]


def cmd_partial(args):
    if args.count:
        M, N = args.count
        rep = {"M": M, "N": N, "count": partial.count_phm(M, N),
               "probability": partial.phm_probability(M, N)}
        if M >= 2 and N % 4 == 0 or M == 2 and N % 2 == 0:
            rep["asymptotic"] = partial.dll_asymptotic(M, N)
        if N <= 12:
            rep["bruteforce"] = partial.count_phm_bruteforce(M, N)
        return rep, rep.get("bruteforce", rep["count"]) == rep["count"]
    if args.complete:
        _, P = _load(args.complete)
        r = partial.five_row_completable(np.real(P).astype(int))
        return r, True
    if args.polar:
        path, r = args.polar
        _, H = _load(path)
        rep = partial.polar_check(np.real(H), int(r), _tol(args, 1e-9))
        return rep, rep["agree"]
    if args.pbm:
        q, M, N = args.pbm
        rep = {"q": q, "M": M, "N": N, "enumerated": partial.pbm_count_enumerate(q, M, N)}
        try:
            rep["formula"] = partial.pbm_count_formula(q, M, N)
        except ValidationError:
            rep["formula"] = None
        rep["probability"] = partial.pbm_probability(q, M, N)
        ok = rep["formula"] is None or rep["formula"] == rep["enumerated"]
        return rep, ok
    raise UsageError("partial needs --count, --complete, --polar or --pbm")


def cmd_obstruct(args):
    N, l = args.N, args.l
    rows = [{"test": "lam-leung", "pass": obstructions.lam_leung(N, l)}]
    if l == 2:
        rows.append({"test": "sylvester", "pass": obstructions.sylvester(N)})
    if obstructions.prime_power(l):
        rows.append({"test": "prime-power", "pass": obstructions.butson_prime_power(N, l)})
    if l in (3, 6):
        rows.append({"test": "de-launey", "pass": obstructions.de_launey_l3(N)})
    if args.circulant:
        rows.append({"test": "turyn-circulant",
                     "pass": obstructions.turyn_circulant_exists(N, l)})
    if args.bistochastic:
        rows.append({"test": "bistochastic",
                     "pass": obstructions.bistochastic_butson_obstruction(N, l)})
    first = next((r["test"] for r in rows if not r["pass"]), None)
    return {"N": N, "l": l, "rows": rows, "first_failing": first}, True


def cmd_quantum(args):
    if args.kesten:
        G, H, p = args.kesten
        exact = quantum.kesten_moment(G, H, p)
        mc = quantum.gram_mc(G, H, p, samples=20_000, seed=args.seed)
        return {"G": G, "H": H, "p": p, "exact": exact, "gram_mc": mc["estimate"],
                "gram_mc_stderr": mc["stderr"]}, True
    if args.semigroup:
        M, N = args.semigroup
        S = quantum.latin_semigroup(quantum.fourier_latin(M, N))
        rep = {"M": M, "N": N, "size": len(S), "elements": sorted(str(s) for s in S)}
        if N > 2 * M - 2:
            rep["equals_interval_shifts"] = S == quantum.interval_shifts(M)
        if N == M:
            rep["cyclic"] = quantum.is_cyclic_group(S)
        return rep, True
    if not args.file:
        raise UsageError("quantum needs a matrix file for --moments / --duality")
    _, H = _load(args.file)
    grid = quantum.magic_from_hadamard(H)
    N = grid.N
    if args.moments:
        p, r = args.moments
        ces = quantum.cesaro_moments(grid, p)
        rep = {"N": N, "p": p, "r": r, "c_p_r": _real(quantum.truncated_moment(grid, p, r)),
               "cesaro_limit": _real(ces["limit"]), "stabilized": ces["stabilized"]}
        return rep, True
    rows = []
    for p in range(1, 5):
        for r in range(1, 6 - p):
            if (r > 1 and N ** p > quantum.MAX_TRANSFER) or (p > 1 and N ** r > quantum.MAX_TRANSFER):
                continue
            d = quantum.duality_check(grid, p, r, _tol(args, quantum.TOL_DUAL))
            rows.append({"p": p, "r": r, "lhs": d["lhs"].real, "rhs": d["rhs"].real,
                         "error": d["error"], "equal": d["equal"]})
    ok = all(r["equal"] for r in rows)
    return {"N": N, "rows": rows, "all_equal": ok}, ok


def cmd_catalogue(args):
    cat = constructions.catalogue()
    if args.name:
        if args.name not in cat:
            raise ValidationError(f"unknown catalogue entry {args.name!r}")
        M = cat[args.name][0]()
        if args.out:
            write_matrix(args.out, M)
            return {"name": args.name, "written": args.out}, True
        from .core import format_matrix
        return format_matrix(M), True
    rows = []
    for name, (build, desc) in cat.items():
        M = build()
        rows.append({"name": name, "N": M.shape[0], "description": desc})
    return {"rows": rows}, True


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="override the default tolerance")
    common.add_argument("--format", choices=["json", "csv", "table"], default="json")
    common.add_argument("--workers", type=int, default=1,
                        help="accepted for compatibility; work runs in one process")
    common.add_argument("--out", default=None, help="output file (matrix or report)")

    ap = _Parser(prog="hadamard", description="Complex Hadamard matrix toolkit")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("construct", parents=[common], help="build a matrix")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="Hadamard verification")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", parents=[common], help="excess, norms, bistochastic search")
    p.add_argument("file")
    p.add_argument("--excess", action="store_true")
    p.add_argument("--norms", action="store_true")
    p.add_argument("--bistochastic-search", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("glow", parents=[common], help="glow moments and histogram")
    p.add_argument("file")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--mc", type=int, default=None, metavar="SAMPLES")
    p.add_argument("--s", type=int, default=None, help="root-of-unity level of the phases")
    p.set_defaults(func=cmd_glow)

    p = sub.add_parser("defect", parents=[common], help="defect report")
    p.add_argument("file")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--rows", default=None, help="comma-separated row subset (partial matrix)")
    p.set_defaults(func=cmd_defect)

    p = sub.add_parser("ahm", parents=[common], help="almost Hadamard checks")
    p.add_argument("file", nargs="?")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--real", action="store_true")
    g.add_argument("--complex", action="store_true")
    p.add_argument("--family", choices=["KN", "LN", "abc", "projective"])
    p.add_argument("--n", type=int, default=3, help="N for KN/LN, q for projective")
    p.add_argument("--abc", type=int, nargs=3, metavar=("A", "B", "C"))
    p.set_defaults(func=cmd_ahm)

    p = sub.add_parser("circulant", parents=[common], help="circulant Hadamard tools")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--from-root", metavar="FILE")
    g.add_argument("--fourier", type=int, metavar="N")
    g.add_argument("--backelin", nargs="+", metavar="M N q")
    p.add_argument("--phi", action="store_true")
    p.set_defaults(func=cmd_circulant)

    p = sub.add_parser("partial", parents=[common], help="partial Hadamard matrices")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", type=int, nargs=2, metavar=("M", "N"))
    g.add_argument("--complete", metavar="FILE")
    g.add_argument("--polar", nargs=2, metavar=("FILE", "R"))
    g.add_argument("--pbm", type=int, nargs=3, metavar=("Q", "M", "N"))
    p.set_defaults(func=cmd_partial)

    p = sub.add_parser("obstruct", parents=[common], help="existence obstructions")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--circulant", action="store_true")
    p.add_argument("--bistochastic", action="store_true")
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("quantum", parents=[common], help="magic grids and moments")
    p.add_argument("file", nargs="?")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--moments", type=int, nargs=2, metavar=("P", "R"))
    g.add_argument("--duality", action="store_true")
    g.add_argument("--kesten", type=int, nargs=3, metavar=("G", "H", "P"))
    g.add_argument("--semigroup", type=int, nargs=2, metavar=("M", "N"))
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("catalogue", parents=[common], help="named matrices")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_catalogue)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError(ap.format_usage().rstrip())
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        report, ok = args.func(args)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    except (ValidationError, FileNotFoundError) as e:
        sys.stderr.write(f"validation error: {e}\n")
        return EXIT_INVALID
    except Exception as e:  # noqa: BLE001
        sys.stderr.write(f"internal error: {type(e).__name__}: {e}\n")
        return EXIT_INTERNAL
    data = report.encode() if isinstance(report, str) else emit_report(report, args.format)
    if args.out and not isinstance(report, str) and args.command not in ("construct", "catalogue"):
        with open(args.out, "wb") as f:
            f.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK if ok else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
