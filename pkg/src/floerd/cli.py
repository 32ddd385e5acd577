"""Command-line interface.

Exit codes: 0 success, 1 precondition or math error (including bad usage),
2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

from . import linkalg
from .errors import FloerdError
from .expr import knot_complex
from .obstruct import emit, obstruct
from .surgery import DBarTable, SurgeryProblem, compute_d, dbar_table, fmt_rational, theorem_bounds

EXIT_OK, EXIT_MATH, EXIT_IO = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _vectors(text: str) -> List[tuple]:
    """Parse "1,3;0,9" into [(1, 3), (0, 9)]."""
    try:
        return [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip()]
    except ValueError:
        raise _UsageError(f"cannot parse generators {text!r}; use e.g. \"1,3;0,3\"")


def cmd_d(args) -> str:
    c = knot_complex(args.knot, allow_large=args.allow_large)
    res = compute_d(SurgeryProblem(c, args.q, args.m), args.window)
    return _dump({"q": res.q, "m": res.m, "d": fmt_rational(res.d)})


def cmd_dbar(args) -> str:
    c = knot_complex(args.knot, allow_large=args.allow_large)
    table = dbar_table(c, args.p, all_m=args.all_m, window=args.window)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "d", "dbar"])
        db = table.dbar
        for m, v in sorted(table.d.items()):
            w.writerow([m, fmt_rational(v), fmt_rational(db[m])])
        return buf.getvalue()
    return _dump(table.to_dict())


def cmd_bounds(args) -> str:
    return _dump(theorem_bounds(args.p).to_dict())


def _form(args) -> linkalg.LinkingForm:
    return linkalg.LinkingForm.parse(args.p, args.form or "+" * args.n)


def cmd_enumerate(args) -> str:
    form = _form(args)
    ms = linkalg.enumerate_metabolizers(args.p, args.n, form)
    return _dump({
        "schema": "floerd.metabolizers/1",
        "p": args.p,
        "n": args.n,
        "form": str(form),
        "count": len(ms),
        "metabolizers": [{"generators": [list(g) for g in m.gens], "order": m.order} for m in ms],
    })


def cmd_special(args) -> str:
    M = linkalg.Metabolizer.from_generators(args.p, _vectors(args.gens))
    sv = linkalg.special_vector(M)
    return _dump({
        "schema": "floerd.special_vector/1",
        "p": args.p,
        "generators": [list(g) for g in M.gens],
        "z": list(sv.z),
        "pivots": sv.pivots,
        "permutation": sv.permutation,
        "entries_equal_p": sum(1 for x in sv.z if x == args.p),
    })


def cmd_verify(args) -> str:
    dbar = None
    if args.dbar:
        with open(args.dbar, encoding="utf-8") as fh:
            obj = json.load(fh)
        table = DBarTable.from_dict(obj)
        if table.p != args.p:
            raise FloerdError(f"d-bar file is for p={table.p}, not p={args.p}")
        dbar = table.dbar
    res = linkalg.verify_appendix_theorem(args.p, args.n, _form(args), dbar)
    out = res.to_dict()
    out["schema"] = "floerd.appendix/1"
    return _dump(out)


def cmd_obstruct(args) -> str:
    rep = obstruct(args.p, bounds_only=args.bounds_only or None, window=args.window,
                   allow_large=args.allow_large)
    return emit(rep, args.format)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="floerd", description="Correction terms of large surgeries and d-bar obstructions.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, window=True):
        if window:
            p.add_argument("--window", type=int, default=None, help="override the grading window N")
        p.add_argument("--out", default=None, help="write output here instead of stdout")

    p = sub.add_parser("d", help="d(S^3_q(K), s_m)")
    p.add_argument("--knot", required=True, help="knot expression, e.g. torus:4,5 or lp:3")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--allow-large", action="store_true")
    common(p)
    p.set_defaults(func=cmd_d)

    p = sub.add_parser("dbar", help="d and d-bar of p^2-surgery")
    p.add_argument("--knot", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--all-m", action="store_true", help="every label 0..(p^2-1)/2")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--allow-large", action="store_true")
    common(p)
    p.set_defaults(func=cmd_dbar)

    p = sub.add_parser("bounds", help="symbolic bounds for L_p")
    p.add_argument("--p", type=int, required=True)
    common(p, window=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("metab", help="metabolizers of (Z/p^2)^n")
    msub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = msub.add_parser("enumerate")
    e.add_argument("--p", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--form", default=None, help="signs of the diagonal form, e.g. +-")
    common(e, window=False)
    e.set_defaults(func=cmd_enumerate)
    s = msub.add_parser("special-vector")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--gens", required=True, help='generators, e.g. "1,3" or "3,0;0,3"')
    common(s, window=False)
    s.set_defaults(func=cmd_special)
    v = msub.add_parser("verify")
    v.add_argument("--p", type=int, required=True)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--form", default=None)
    v.add_argument("--dbar", default=None, help="JSON d-bar table (output of `floerd dbar`)")
    common(v, window=False)
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("obstruct", help="end-to-end obstruction report for L_p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--bounds-only", action="store_true")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--allow-large", action="store_true")
    common(p)
    p.set_defaults(func=cmd_obstruct)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        text = args.func(args)
        _write(text, args.out)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_MATH
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"floerd: I/O error: {exc.strerror or exc}{where}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"floerd: cannot read JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FloerdError, ValueError, ArithmeticError) as exc:
        print(f"floerd: {exc}", file=sys.stderr)
        return EXIT_MATH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
