"""Command line front door.

Subcommands: table, verify, groups, aut, export.  Exit codes: 0 all good,
1 theorem violation (a failing check -- never expected), 2 usage errors,
out-of-range arguments, or closure-cap exhaustion.
"""

import argparse
import sys

from . import looptable, mltgroups, verify
from .mltgroups import DEFAULT_CAP


def _print_order(label, order, out):
    power = f" = 2^{order.bit_length() - 1}" if order & (order - 1) == 0 else ""
    if order < 1 << 63:
        print(f"{label}: {order}{power}", file=out)
    else:
        print(f"{label}: 2^{order.bit_length() - 1}", file=out)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w"), True


def cmd_table(args):
    if not 0 <= args.n <= looptable.CD_TABLE_MAX_N:
        print(f"error: n must be in [0, {looptable.CD_TABLE_MAX_N}]", file=sys.stderr)
        return 2
    t = looptable.cd_table(args.n)
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            out.write(looptable.table_to_csv(t))
        elif args.format == "json":
            out.write(looptable.table_to_json_text(t))
        else:
            width = max(len(lab) for lab in t.labels)
            for row in t.table:
                out.write(" ".join(t.labels[int(v)].rjust(width) for v in row) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_verify(args):
    if args.n < 2:
        print("error: verify needs n >= 2", file=sys.stderr)
        return 2
    report = verify.theorem_suite(args.n, mode=args.mode, cap=args.cap, seed=args.seed)
    out, close = _open_out(args.out)
    try:
        if args.format == "json":
            out.write(report.to_json(stable=args.stable))
        else:
            for c in report.checks:
                line = f"{c.status.upper():7s} {c.name}"
                if not args.stable:
                    line += f" ({c.ms:.0f} ms)"
                if c.status == "fail":
                    line += f"  witness={c.witness!r}"
                out.write(line + "\n")
            out.write(f"n={report.n} mode={report.mode} seed={report.seed} -> exit {report.exit_status}\n")
    finally:
        if close:
            out.close()
    return report.exit_status


def cmd_groups(args):
    if args.n < 2:
        print("error: groups needs n >= 2", file=sys.stderr)
        return 2
    try:
        inn = mltgroups.inn_group(args.n, args.mode, cap=args.cap)
        mlt = mltgroups.mlt_group(args.n, args.mode, cap=args.cap)
        inn_l = mltgroups.onesided_inn(args.n, "left", args.mode, cap=args.cap)
        mlt_l = mltgroups.onesided_mlt(args.n, "left", args.mode, cap=args.cap)
        K = mltgroups.build_K(args.n)
        n_order = 2 * inn.order
    except mltgroups.CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = sys.stdout
    print(f"Q_{args.n} ({inn.mode} mode)", file=out)
    _print_order("|Inn|", inn.order, out)
    _print_order("|Mlt|", mlt.order, out)
    _print_order("|Inn_l|", inn_l.order, out)
    _print_order("|Mlt_l|", mlt_l.order, out)
    _print_order("|K|", K.order, out)
    _print_order("|N|", n_order, out)
    return 0


def cmd_aut(args):
    if not 1 <= args.n <= 4:
        print("error: automorphism search supports 1 <= n <= 4", file=sys.stderr)
        return 2
    autos = looptable.automorphism_group(looptable.cd_table(args.n))
    print(f"|Aut(Q_{args.n})| = {len(autos)}")
    return 0


def cmd_export(args):
    if args.n < 1:
        print("error: export needs n >= 1", file=sys.stderr)
        return 2
    if args.set == "mlt":
        perms = mltgroups.translation_generators(args.n)
    elif args.set == "mlt-left":
        perms = mltgroups.left_translation_generators(args.n)
    elif args.set == "mlt-right":
        perms = mltgroups.right_translation_generators(args.n)
    elif args.set == "inn":
        gens = mltgroups.inner_generators(args.n)
        perms = [gens.T[x] for x in sorted(gens.T)] + [
            gens.Lxy[k] for k in sorted(gens.Lxy)
        ]
    else:  # k
        if args.n < 2:
            print("error: K needs n >= 2", file=sys.stderr)
            return 2
        perms = mltgroups.build_K(args.n).generators
    out, close = _open_out(args.out)
    try:
        for p in perms:
            out.write(p.to_line() + "\n")
    finally:
        if close:
            out.close()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="loopforge",
        description="Cayley-Dickson loops and their multiplication groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, modes=True):
        p.add_argument("--n", type=int, required=True, help="loop dimension")
        if modes:
            p.add_argument("--mode", choices=["auto", "exhaustive", "rank"], default="auto")
            p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="closure element cap")

    p = sub.add_parser("table", help="emit the multiplication table of Q_n")
    common(p, modes=False)
    p.add_argument("--format", choices=["csv", "json", "text"], default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("verify", help="run the theorem suite")
    common(p)
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.add_argument("--out", default=None)
    p.add_argument("--stable", action="store_true",
                   help="zero out timings for byte-identical reports")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("groups", help="print the group orders for Q_n")
    common(p)
    p.set_defaults(fn=cmd_groups)

    p = sub.add_parser("aut", help="count automorphisms by backtracking")
    common(p, modes=False)
    p.set_defaults(fn=cmd_aut)

    p = sub.add_parser("export", help="write generator permutation files")
    common(p, modes=False)
    p.add_argument("--set", choices=["mlt", "mlt-left", "mlt-right", "inn", "k"], default="mlt")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_export)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
