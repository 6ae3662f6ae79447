"""Command-line interface: ``betti2p <subcommand> ...``.

Exit status is 0 on success, 1 when a computed check fails (engine
disagreement, violated identity, invalid module in ``validate``), and 2 on
usage or parse errors.  ``--format json`` switches any report to JSON with
sorted keys.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .betti_formula import (
    NegativeMultiplicity,
    betti_theorem,
    crosscheck,
    euler_local_check,
    formula_grades,
    hilbert_identity_check,
    random_corpus,
)
from .exact_linalg import PrimeField
from .formats import ParseError, parse_module, parse_zigzag, write_module, write_zigzag
from .grid_module import (
    BettiTable,
    GradeMultiset,
    SearchCapExceeded,
    brute_force_isomorphic,
    free_module,
    gen_cz_family,
    gen_hook,
    gen_simple,
    validate,
)
from .resolution import DEFAULT_PADDING, CoverError, SyzygyError, diagnostic_grades, intersection_diagnostic, resolve
from .zigzag import barcode, gen_from_barcode, y_alpha, y_alpha_barcode, z_alpha, z_alpha_barcode

FIELD_ENV = "BETTI2P_FIELD"

FIG2_BARS = [(1, 4), (2, 4), (1, 3), (1, 1), (2, 2), (3, 4), (1, 1), (2, 3)]


class UsageError(Exception):
    pass


def _default_field() -> int:
    v = os.environ.get(FIELD_ENV)
    if v is None:
        return 2
    try:
        return int(v)
    except ValueError:
        raise UsageError(f"{FIELD_ENV}={v!r} is not an integer") from None


def _field(args) -> PrimeField:
    p = args.field if getattr(args, "field", None) is not None else _default_field()
    try:
        return PrimeField(p)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(str(e)) from None


def _load_module(path, check=True):
    try:
        return parse_module(_read(path), check=check)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def _table_dict(t: BettiTable) -> dict:
    return {f"beta_{j}": t[j].to_list() for j in range(3)}


def _table_lines(t: BettiTable, label: str = "") -> list[str]:
    head = f"{label} " if label else ""
    return [f"{head}beta_{j} = {t[j]}" for j in range(3)]


def _emit(args, data: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(data, sort_keys=True))
    else:
        for line in lines:
            print(line)


# -- subcommands -------------------------------------------------------------

def cmd_validate(args) -> int:
    m = _load_module(args.input, check=False)
    errs = validate(m)
    _emit(args, {"valid": not errs, "violations": errs}, errs or ["ok"])
    return 1 if errs else 0


def cmd_betti(args) -> int:
    m = _load_module(args.input)
    data, lines, code = {"method": args.method}, [], 0
    tables, res = {}, None
    if args.method in ("formula", "both"):
        tables["formula"] = betti_theorem(m, args.padding)
    if args.method in ("resolution", "both"):
        res = resolve(m, args.padding)
        tables["resolution"] = BettiTable(res.xi)
    for name, t in tables.items():
        data[name] = _table_dict(t)
        lines += _table_lines(t, name if len(tables) > 1 else "")
    if args.method == "both":
        rep = crosscheck(m, args.padding, res)
        data["agree"] = rep.agree
        data["mismatches"] = rep.lines()
        lines.append("agree" if rep.agree else "DISAGREE")
        lines += rep.lines()
        code = 0 if rep.agree else 1
    if args.svg:
        from .plotting import plot_betti
        plot_betti(next(iter(tables.values())), args.svg, title=args.input, box=m.box)
    _emit(args, data, lines)
    return code


def cmd_frames(args) -> int:
    m = _load_module(args.input)
    rows, lines, bad = [], ["grade y z"], 0
    for a in formula_grades(m, args.padding):
        y, z = y_alpha(m, a), z_alpha(m, a)
        yb, zb = y_alpha_barcode(m, a), z_alpha_barcode(m, a)
        ok = y == yb and z == zb
        bad += not ok
        rows.append({"grade": [a.x, a.y], "y": y, "z": z, "consistent": ok})
        if y or z or not ok:
            lines.append(f"{a} {y} {z}" + ("" if ok else f"  MISMATCH barcode route y={yb} z={zb}"))
    _emit(args, {"frames": rows, "consistent": not bad}, lines)
    return 1 if bad else 0


def cmd_zigzag(args) -> int:
    try:
        z = parse_zigzag(_read(args.input))
    except ParseError as e:
        raise ParseError(f"{args.input}: {e}") from None
    bc = barcode(z)
    bars = [[iv.start, iv.end] for iv in bc.bars()]
    _emit(args, {"barcode": bars, "dims": list(z.dims)}, [f"[{b},{d}]" for b, d in bars])
    return 0


def cmd_resolve(args) -> int:
    m = _load_module(args.input)
    res = resolve(m, args.padding)
    t = BettiTable(res.xi)
    data = {"xi": [x.to_list() for x in res.xi], "syzygy_ok": res.syzygy_witness, "dims": {}}
    lines = [f"xi_{j} = {res.xi[j]}" for j in range(3)]
    for j, step in enumerate(res.steps):
        for name, mod in ((f"F_{j}", step.free), (f"K_{j}", step.kernel)):
            grid = [[mod.dims[(x, y)] for x in range(mod.box[0] + 1)] for y in range(mod.box[1] + 1)]
            data["dims"][name] = grid
            lines.append(f"{name} dims (rows y={mod.box[1]}..0, columns x=0..{mod.box[0]}):")
            lines += ["  " + " ".join(f"{v:2d}" for v in row) for row in reversed(grid)]
    if args.svg:
        from .plotting import plot_betti
        plot_betti(t, args.svg, title=args.input, box=m.box)
    _emit(args, data, lines)
    return 0


def cmd_check(args) -> int:
    m = _load_module(args.input)
    res = resolve(m, args.padding)
    tables = {"formula": betti_theorem(m, args.padding), "resolution": BettiTable(res.xi)}
    data, lines, bad = {}, [], 0
    for name, t in tables.items():
        for ident, fn in (("hilbert", hilbert_identity_check), ("euler", euler_local_check)):
            flags = fn(m, t, args.padding)
            fails = [[g.x, g.y] for g, ok in flags.items() if not ok]
            data[f"{ident}_{name}"] = {"grades": len(flags), "failures": fails}
            lines.append(f"{ident} identity ({name}): {len(flags) - len(fails)}/{len(flags)} grades hold")
            bad += len(fails)
    cover = res.steps[0]
    lemma_f, ident_f = [], []
    grades = diagnostic_grades(m, args.padding)
    for a in grades:
        d = intersection_diagnostic(m, a, cover)
        if not d.lemma_ok:
            lemma_f.append([a.x, a.y])
        if not d.identity_ok:
            ident_f.append([a.x, a.y])
    k0 = cover.kernel
    zk = [[g.x, g.y] for g in k0.grades() if z_alpha(k0, g) != 0]
    data["lemma"] = {"grades": len(grades), "failures": lemma_f}
    data["intersection_identity"] = {"grades": len(grades), "failures": ident_f}
    data["z_of_K0"] = {"grades": len(k0.grades()), "failures": zk}
    data["syzygy_ok"] = res.syzygy_witness
    lines.append(f"intersection containment: {len(grades) - len(lemma_f)}/{len(grades)} grades hold")
    lines.append(f"dim I = dim K_0 + z: {len(grades) - len(ident_f)}/{len(grades)} grades hold")
    lines.append(f"z(K_0) = 0: {len(k0.grades()) - len(zk)}/{len(k0.grades())} grades hold")
    lines.append(f"K_2 = 0: {'yes' if res.syzygy_witness else 'no'}")
    bad += len(lemma_f) + len(ident_f) + len(zk)
    data["ok"] = not bad
    _emit(args, data, lines)
    return 1 if bad else 0


def cmd_crosscheck(args) -> int:
    if args.input:
        mods = [(args.input, _load_module(args.input))]
    elif args.random:
        f = _field(args)
        mods = [(f"random[{i}]", m) for i, m in enumerate(
            random_corpus(args.random, args.seed, f, args.max_box, args.max_dim))]
    else:
        raise UsageError("crosscheck needs -i FILE or --random N")
    agree, failures = 0, []
    for name, m in mods:
        rep = crosscheck(m, args.padding)
        if rep.agree:
            agree += 1
        else:
            failures.append({"case": name, "mismatches": rep.lines()})
    lines = [f"{agree}/{len(mods)} agree"]
    for fl in failures:
        lines += [f"{fl['case']}: {msg}" for msg in fl["mismatches"]]
    _emit(args, {"cases": len(mods), "agree": agree, "failures": failures}, lines)
    return 0 if agree == len(mods) else 1


def _parse_grade_list(s: str) -> list[tuple[int, int]]:
    out = []
    for part in s.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            x, y = (int(v) for v in part.split(","))
        except ValueError:
            raise UsageError(f"bad grade {part!r}; use 'x,y;x,y'") from None
        out.append((x, y))
    return out


def cmd_gen(args) -> int:
    f = _field(args)
    ex = args.example
    try:
        if ex == "fig2":
            text = write_zigzag(gen_from_barcode(FIG2_BARS, args.directions.split(","), f))
        else:
            if ex == "simple":
                g = _parse_grade_list(args.grade)[0] if args.grade else (0, 0)
                box = tuple(args.box) if args.box else None
                m = gen_simple(g, f, box)
            elif ex == "hook":
                m = gen_hook(f, tuple(args.box) if args.box else (2, 2))
            elif ex == "free":
                grades = _parse_grade_list(args.grade or "0,0")
                s = GradeMultiset(grades)
                box = tuple(args.box) if args.box else (max(g[0] for g in grades) + 1, max(g[1] for g in grades) + 1)
                m = free_module(s, box, f)
            else:
                m = gen_cz_family(args.lam, f)
            text = write_module(m)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_isocheck(args) -> int:
    a, b = _load_module(args.first), _load_module(args.second)
    try:
        iso = brute_force_isomorphic(a, b, cap=args.cap)
    except SearchCapExceeded as e:
        _emit(args, {"isomorphic": None, "error": str(e)}, [f"undecided: {e}"])
        return 1
    _emit(args, {"isomorphic": iso}, ["isomorphic" if iso else "not isomorphic"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="betti2p", description="Bigraded Betti numbers of 2-parameter modules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--padding", type=int, default=DEFAULT_PADDING, help="box enlargement for evaluation")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check shapes and commutativity")
    s.add_argument("-i", "--input", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("betti", parents=[common], help="Betti numbers by formula, resolution or both")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--method", choices=("formula", "resolution", "both"), default="both")
    s.add_argument("--svg", help="write a scatter plot of xi_0..xi_2 (format from extension)")
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("frames", parents=[common], help="y and z per grade")
    s.add_argument("-i", "--input", required=True)
    s.set_defaults(func=cmd_frames)

    s = sub.add_parser("zigzag", parents=[common], help="barcode of a .zz zigzag")
    s.add_argument("-i", "--input", required=True)
    s.set_defaults(func=cmd_zigzag)

    s = sub.add_parser("resolve", parents=[common], help="xi_j and dims of F_j, K_j")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--svg")
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("check", parents=[common], help="Hilbert identities and intersection diagnostics")
    s.add_argument("-i", "--input", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("crosscheck", parents=[common], help="formula vs resolution on a file or random corpus")
    s.add_argument("-i", "--input")
    s.add_argument("--random", type=int, metavar="N")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--field", type=int)
    s.add_argument("--max-box", type=int, default=4)
    s.add_argument("--max-dim", type=int, default=4)
    s.set_defaults(func=cmd_crosscheck)

    s = sub.add_parser("gen", help="write an example module (.pm2) or the fig2 zigzag (.zz)")
    s.add_argument("--example", choices=("simple", "hook", "free", "czfamily", "fig2"), required=True)
    s.add_argument("--lambda", dest="lam", type=int, default=2)
    s.add_argument("--field", type=int)
    s.add_argument("--grade", help="'x,y' for simple; 'x,y;x,y;...' generators for free")
    s.add_argument("--box", type=int, nargs=2)
    s.add_argument("--directions", default="fwd,bwd,fwd", help="fig2 arrow directions, comma separated")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("isocheck", parents=[common], help="exhaustive isomorphism test of two modules")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--cap", type=int, default=10**7)
    s.set_defaults(func=cmd_isocheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError) as e:
        print(f"betti2p {args.command}: {e}", file=sys.stderr)
        return 2
    except (CoverError, SyzygyError, NegativeMultiplicity) as e:
        print(f"betti2p {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
