"""Command-line interface.

Exit codes: 0 success, 2 verification failed (certificate still written),
1 usage or IO error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from . import klein
from . import pipelines as pl
from .errors import NotSingular, PolarForgeError
from .forms import SpaceSpec
from .gf import field as gf_field
from .ovoids import OvoidCertificate, PointSet, find_m_ovoid, load_ovoid, ovoid_payload, sweep_sections, pattern_zero_cases, verify_m_ovoid
from .polarspace import build, default_threads
from .search import DEFAULT_BUDGET

OK, USAGE, FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(args, text: str, payload: dict) -> None:
    if args.format == "json":
        sys.stdout.write(pl.dumps(payload))
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _config(args) -> dict:
    skip = {"func", "format", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _manifest(args, **extra) -> dict:
    return pl.run_manifest(args.command, _config(args), args.seed, **extra)


def _write(path, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(pl.dumps(payload))


def _write_with_manifest(args, path, payload: dict, **extra) -> None:
    _write(path, payload)
    _write(path + ".manifest.json", _manifest(args, output=os.path.basename(path), **extra))


def _threads(args) -> int:
    return args.threads if args.threads else default_threads()


# -- subcommands ---------------------------------------------------------------

def cmd_info(args) -> int:
    spec = SpaceSpec.parse(args.spec)
    space = build(spec, generators=not args.no_generators)
    gens = len(space.generators) if not args.no_generators else space.expected_generators()
    d = space.describe()
    d["generators"] = gens
    text = (
        f"{spec} type={spec.type} n={spec.n} q={spec.q}\n"
        f"r={space.rank} e={space.e}\n"
        f"points={space.num_points}\n"
        f"generators={gens}"
    )
    _emit(args, text, {"info": d, "manifest": _manifest(args)})
    return OK


def cmd_generators(args) -> int:
    space = build(args.spec)
    payload = dict(space.F.header())
    payload.update(space=space.label, n=space.n, generators=[[list(r) for r in G.basis] for G in space.generators])
    if args.out:
        _write_with_manifest(args, args.out, payload)
    _emit(args, f"{space.label}: {len(space.generators)} generators of size {space.generator_size()}",
          {"count": len(space.generators), "manifest": _manifest(args)})
    return OK


def cmd_ovoid_search(args) -> int:
    space = build(args.space)
    S = find_m_ovoid(space, args.m, budget=args.budget, seed=args.seed)
    cert = verify_m_ovoid(S, threads=_threads(args))
    if args.out:
        _write_with_manifest(args, args.out, ovoid_payload(S, args.m), certificate=cert.to_json())
    if args.cert:
        _write(args.cert, cert.to_json())
    _emit(args, f"{space.label}: found {len(S)} points, m={cert.m}, ok={cert.ok}",
          {"certificate": cert.to_json(), "manifest": _manifest(args)})
    return OK if cert.ok else FAILED


def cmd_ovoid_verify(args) -> int:
    space = build(args.space)
    with open(args.file) as fh:
        data = json.load(fh)
    try:
        S = load_ovoid(space, data)
    except NotSingular as exc:
        cert = OvoidCertificate(space.label, None, len(data.get("points", [])), {}, False,
                                field=space.F.header(), generators=len(space.gen_bits), note=str(exc))
    else:
        cert = verify_m_ovoid(S, threads=_threads(args))
    claimed = args.m if args.m is not None else data.get("claimed_m")
    if claimed is not None and cert.m != claimed:
        cert.ok = False
        cert.note = (cert.note + "; " if cert.note else "") + f"claimed m={claimed}, observed {cert.m}"
    if args.cert:
        _write_with_manifest(args, args.cert, cert.to_json())
    hist = " ".join(f"{k}:{v}" for k, v in sorted(cert.histogram.items()))
    _emit(args, f"{space.label}: ok={cert.ok} m={cert.m} size={cert.size} histogram {hist}",
          {"certificate": cert.to_json(), "manifest": _manifest(args)})
    return OK if cert.ok else FAILED


def _spread(args):
    F = gf_field(args.q)
    if args.method == "char3":
        return klein.char3_spread(F), klein.case1_quadric(F)
    sp = klein.desarguesian_spread(F, args.alpha)
    return sp, klein.case2_quadric(F, sp.meta["alpha"])


def cmd_spread_build(args) -> int:
    sp, ref = _spread(args)
    klein.spread_census(sp, ref)
    ok = sp.is_spread()
    if args.out:
        _write_with_manifest(args, args.out, sp.to_json())
    _emit(args, f"{len(sp.lines)} lines, spread={ok}", {"spread": sp.to_json(), "manifest": _manifest(args)})
    return OK if ok else FAILED


def cmd_spread_census(args) -> int:
    sp, ref = _spread(args)
    n0, n1, n2 = klein.spread_census(sp, ref)
    payload = {"external": n0, "tangent": n1, "bisecant": n2, "manifest": _manifest(args)}
    if args.out:
        _write_with_manifest(args, args.out, {"external": n0, "tangent": n1, "bisecant": n2})
    _emit(args, f"external={n0} tangent={n1} bisecant={n2}", payload)
    return OK if sp.is_spread() else FAILED


def cmd_klein_map(args) -> int:
    sp, _ = _spread(args)
    F = sp.F
    images = klein.klein_image(F, sp.lines)
    space = build(f"Q+:5:{args.q}")
    S = PointSet.from_points(space, [P.coords for P in images])
    cert = verify_m_ovoid(S, threads=_threads(args))
    ok = cert.ok and cert.m == 1 and len(S) == len(sp.lines)
    if args.out:
        _write_with_manifest(args, args.out, ovoid_payload(S, 1), certificate=cert.to_json())
    _emit(args, f"{len(S)} Klein points on Q+(5,{args.q}), ovoid={ok}",
          {"certificate": cert.to_json(), "manifest": _manifest(args)})
    return OK if ok else FAILED


def cmd_glue(args) -> int:
    rep = pl.glue_construct(args.q, seed=args.seed, budget=args.budget, stretch=args.stretch, threads=_threads(args))
    man = _manifest(args, result=rep.manifest())
    if args.out:
        pl.write_bundle(args.out, man, rep.files())
    c = rep.certificates["union"]
    _emit(args, f"glued set: {c.size} points, m={c.m}, ok={rep.ok}", man)
    return OK if rep.ok else FAILED


def cmd_disjoint_family(args) -> int:
    fam = pl.five_disjoint_2ovoids(seed=args.seed, budget=args.budget, threads=_threads(args))
    files = fam.files()
    unions = {}
    for m in args.m or []:
        U, c = pl.m_ovoids_q3(m, fam, threads=_threads(args))
        files[f"m{m}.json"] = ovoid_payload(U, m)
        files[f"cert_m{m}.json"] = c.to_json()
        unions[m] = c.ok
    ok = fam.ok and all(unions.values())
    man = _manifest(args, result=fam.manifest(), unions={str(k): v for k, v in unions.items()})
    if args.out:
        pl.write_bundle(args.out, man, files)
    lines = [f"O{i}: {c.size} points, m={c.m}, ok={c.ok}" for i, c in enumerate(fam.certificates, 1)]
    lines.append(f"pairwise disjoint={fam.pairwise_disjoint()}")
    lines += [f"m={m}: ok={v}" for m, v in unions.items()]
    _emit(args, "\n".join(lines), man)
    return OK if ok else FAILED


def cmd_patterns(args) -> int:
    if args.zero_cases:
        q, n = args.zero_cases
        cases = pattern_zero_cases(q, n)
        _emit(args, " ".join(f"(c={c},m={m})" for c, m in cases) or "none",
              {"zero_cases": [list(x) for x in cases], "manifest": _manifest(args)})
        return OK
    if not (args.space and args.file):
        raise UsageError("patterns needs --space and --file, or --zero-cases Q N")
    space = build(args.space)
    with open(args.file) as fh:
        S = load_ovoid(space, json.load(fh))
    counts: dict[tuple, int] = {}
    for xc in sweep_sections(S):
        counts[xc] = counts.get(xc, 0) + 1
    text = "\n".join(f"x={x} c={c}: {k}" for (x, c), k in sorted(counts.items()))
    _emit(args, text, {"patterns": [[x, c, k] for (x, c), k in sorted(counts.items())], "manifest": _manifest(args)})
    return OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--threads", type=int, default=None, help="verification threads (default: POLARFORGE_THREADS or all cores)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node budget")

    ap = _Parser(prog="polarforge", description="Polar spaces, m-ovoids and spreads over finite fields.")
    ap.add_argument("--version", action="version", version=f"polarforge {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("info", parents=[common], help="parameters of a polar space")
    p.add_argument("spec", help="TYPE:projdim:q, e.g. Q-:5:3")
    p.add_argument("--no-generators", action="store_true", help="use the count formula instead of enumerating")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("generators", parents=[common], help="enumerate generators")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generators)

    p = sub.add_parser("ovoid-search", parents=[common], help="search an m-ovoid")
    p.add_argument("--space", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--cert")
    p.set_defaults(func=cmd_ovoid_search)

    p = sub.add_parser("ovoid-verify", parents=[common], help="verify a point-set file")
    p.add_argument("--space", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--m", type=int, default=None, help="expected m (default: claimed_m in the file)")
    p.add_argument("--cert")
    p.set_defaults(func=cmd_ovoid_verify)

    for name, func, helptext in (
        ("spread-build", cmd_spread_build, "build a line spread of PG(3,q)"),
        ("spread-census", cmd_spread_census, "tangent census of a spread"),
        ("klein-map", cmd_klein_map, "Klein image of a spread"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--method", choices=["char3", "desarguesian"], default="char3")
        p.add_argument("--alpha", type=int, default=None, help="non-square for the Desarguesian spread")
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("glue", parents=[common], help="glued (q+1)-ovoid of Q+(7,q)")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--stretch", action="store_true", help="allow q = 5")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("disjoint-family", parents=[common], help="five disjoint 2-ovoids of Q+(7,3)")
    p.add_argument("--m", type=int, action="append", choices=[2, 4, 6, 8, 10], help="also emit the union m-ovoid")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_disjoint_family)

    p = sub.add_parser("patterns", parents=[common], help="section intersection patterns")
    p.add_argument("--space")
    p.add_argument("--file")
    p.add_argument("--zero-cases", type=int, nargs=2, metavar=("Q", "N"))
    p.set_defaults(func=cmd_patterns)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"polarforge: error: {exc}", file=sys.stderr)
        return USAGE
    except (OSError, json.JSONDecodeError, ValueError, PolarForgeError) as exc:
        print(f"polarforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
