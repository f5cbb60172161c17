"""Command-line entry point.

Exit codes: 0 success, 1 certificate rejected or network not sorting,
2 usage or parse failure, 3 corrupt or inconsistent data files.
"""

from __future__ import annotations

import argparse
import sys

from . import certificate as cert_mod
from . import network as net_mod
from . import search as search_mod
from .seqset import BoolSeqSet


def _cmd_search(args) -> int:
    n = args.n
    if not 1 <= n <= search_mod.MAX_CHANNELS:
        print(f"error: n must be in 1..{search_mod.MAX_CHANNELS}", file=sys.stderr)
        return 2
    threads = 1 if args.deterministic else args.threads
    value, table = search_mod.min_size(n, threads=threads)
    print(f"s({n}) = {value}")
    if args.dump:
        search_mod.write_dump(table, args.dump, n, value)
    return 0


def _cmd_gen_cert(args) -> int:
    try:
        manifest, parts = search_mod.load_dump(args.dump)
        cert = cert_mod.generate_certificate(manifest, parts, threads=args.threads)
    except (search_mod.DumpError, cert_mod.GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    cert_mod.write_certificate(cert, args.out)
    print(f"{len(cert.steps)} steps")
    return 0


def _cmd_check_cert(args) -> int:
    try:
        with open(args.path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        cert = cert_mod.decode(raw)
    except cert_mod.CertificateParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    try:
        n, k = cert_mod.check_certificate(cert, threads=args.threads)
    except cert_mod.CertificateRejected as exc:
        print(f"{exc.code} {exc.step}")
        return 1
    print(f"{n} {k}")
    return 0


def _cmd_oracle(args) -> int:
    if not 1 <= args.n <= search_mod.MEMO_WIDTH_CAP:
        print(f"error: oracle supports n up to {search_mod.MEMO_WIDTH_CAP}", file=sys.stderr)
        return 2
    value = search_mod.memo_min_size(BoolSeqSet.full(args.n))
    print(f"s({args.n}) = {value}")
    return 0


def _cmd_bound(args) -> int:
    try:
        known_n, known_s = args.from_spec.split("=")
        known_n, known_s = int(known_n), int(known_s)
    except ValueError:
        print("error: --from expects n=value", file=sys.stderr)
        return 2
    if args.to < known_n:
        print("error: --to below the known channel count", file=sys.stderr)
        return 2
    print(search_mod.van_voorhis_chain(known_n, known_s, args.to))
    return 0


def _cmd_verify_network(args) -> int:
    try:
        with open(args.path) as fh:
            net = net_mod.ComparatorNetwork.from_text(fh.read())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if net_mod.is_sorting_network(net):
        print("SORTS")
        return 0
    print("NOT-SORTING")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sortnetsize",
        description="Minimal sorting network sizes with verifiable lower-bound certificates",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="compute s(n) and optionally dump the bounds table")
    p.add_argument("n", type=int)
    p.add_argument("--dump", metavar="DIR", help="write the bounds dump here")
    p.add_argument(
        "--deterministic",
        action="store_true",
        help="single-threaded, byte-stable dumps and certificates",
    )
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("gen-cert", help="generate a certificate from a bounds dump")
    p.add_argument("--dump", metavar="DIR", required=True)
    p.add_argument("--out", metavar="PATH", required=True)
    p.set_defaults(func=_cmd_gen_cert)

    p = sub.add_parser("check-cert", help="check a certificate; prints 'n k' on acceptance")
    p.add_argument("path")
    p.set_defaults(func=_cmd_check_cert)

    p = sub.add_parser("oracle", help="exact s(n) by memoized recursion (n <= 6)")
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("bound", help="chain the Van Voorhis bound upward from a known value")
    p.add_argument("--from", dest="from_spec", required=True, metavar="N=S")
    p.add_argument("--to", type=int, required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("verify-network", help="zero-one test of a network file")
    p.add_argument("path")
    p.set_defaults(func=_cmd_verify_network)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (search_mod.SearchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
