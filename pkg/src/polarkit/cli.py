"""Command-line front end.

Subcommands: construct, encode, decode, simulate, latency, tree. Flags can
also come from a key-value config file (one ``name = value`` per line, names
matching the long options); explicit flags win over the file, which wins
over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .code import construct_code, encode, load_code, map_payload, save_code
from .crc import CRC_PRESETS, get_crc
from .latency import ArchParams, rlld_cycles
from .rlld import rlld_decode
from .sc import ml_ssc_decode, sc_decode, ssc_decode
from .scl import ca_scl_decode
from .sim import ALGORITHMS, RunSpec, emit, simulate
from .tree import build_tree, dump_tree, prune_and_label, to_dot


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = line.split("=", 1)
            else:
                parts = line.split(None, 1)
                if len(parts) != 2:
                    raise ValueError(f"bad config line: {raw.rstrip()}")
                key, value = parts
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _bits_arg(text: str) -> np.ndarray:
    cleaned = text.replace(" ", "")
    if cleaned.strip("01"):
        raise argparse.ArgumentTypeError("bit strings may contain only 0 and 1")
    return np.frombuffer(cleaned.encode(), dtype=np.uint8).astype(np.int8) - ord("0")


def _snr_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _load_llrs(path: str) -> np.ndarray:
    if path == "-":
        return np.array([float(tok) for tok in sys.stdin.read().split()])
    return np.loadtxt(path).ravel()


def _open_out(path: str | None):
    return open(path, "w") if path else sys.stdout


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarkit")
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    crc_names = ["none", *CRC_PRESETS]

    p = sub.add_parser("construct", help="build a code and write its frozen set")
    p.add_argument("--n", type=int, required=True, help="log2 of the block length")
    p.add_argument("--k", type=int, required=True, help="information bits (CRC included)")
    p.add_argument("--method", choices=["ga", "bhattacharyya"], default="ga")
    p.add_argument("--design-snr", type=float, default=None,
                   help="design Eb/N0 in dB (ga) or initial erasure probability")
    p.add_argument("--out", required=True, help="frozen-set file to write")

    p = sub.add_parser("encode", help="encode payload bits")
    p.add_argument("--code", required=True, help="frozen-set file")
    p.add_argument("--crc", choices=crc_names, default="none")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--payload", type=_bits_arg, help="payload bits, e.g. 1011")
    group.add_argument("--random", action="store_true", help="draw a random payload")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("decode", help="decode one frame of channel LLRs")
    p.add_argument("--code", required=True)
    p.add_argument("--crc", choices=crc_names, default="none")
    p.add_argument("--llr", required=True, help="file of LLR values, - for stdin")
    p.add_argument("--algo", choices=ALGORITHMS, default="cascl")
    p.add_argument("--list-size", type=int, default=4)
    p.add_argument("--wt", type=int, default=32, help="dimension threshold for t1 nodes")
    p.add_argument("--wml", type=int, default=16, help="width cap for codebook nodes")
    p.add_argument("--json", action="store_true", help="emit decoder diagnostics")

    p = sub.add_parser("simulate", help="Monte-Carlo error-rate run")
    p.add_argument("--code", required=True)
    p.add_argument("--crc", choices=crc_names, default="none")
    p.add_argument("--algo", choices=ALGORITHMS, default="cascl")
    p.add_argument("--list-size", type=int, default=4)
    p.add_argument("--wt", type=int, default=32)
    p.add_argument("--wml", type=int, default=16)
    p.add_argument("--snr", type=_snr_list, default=(2.0,),
                   help="Eb/N0 grid in dB, comma or space separated")
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.add_argument("--max-errors", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None, help="output file, stdout by default")

    p = sub.add_parser("latency", help="cycle counts for a pruned tree")
    p.add_argument("--code", required=True)
    p.add_argument("--wt", type=int, default=32)
    p.add_argument("--wml", type=int, default=16)
    p.add_argument("--p", type=int, default=128, help="processing elements")
    p.add_argument("--ns", type=int, default=4, help="sorting cycles per expansion")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("tree", help="show the pruned, labeled tree")
    p.add_argument("--code", required=True)
    p.add_argument("--wt", type=int, default=32)
    p.add_argument("--wml", type=int, default=16)
    p.add_argument("--dot", action="store_true", help="GraphViz output")
    p.add_argument("--out", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, _ = parser.parse_known_args(argv)
    if args.config:
        defaults = _read_config(args.config)
        # argparse re-parses string defaults through each option's type, but
        # flag options need real booleans
        for key, value in defaults.items():
            if value.lower() in ("true", "false"):
                defaults[key] = value.lower() == "true"
        for action in parser._subparsers._group_actions[0].choices.values():
            known = {a.dest for a in action._actions}
            action.set_defaults(**{k: v for k, v in defaults.items() if k in known})
        args = parser.parse_args(argv)
    else:
        args = parser.parse_args(argv)

    if args.command == "construct":
        code = construct_code(args.n, args.k, args.method, args.design_snr)
        save_code(code, args.out)
        print(f"wrote {args.out}: N={code.block_len} K={code.k} "
              f"method={args.method}")
        return 0

    if args.command == "encode":
        code = load_code(args.code, crc=get_crc(args.crc))
        if args.random:
            rng = np.random.default_rng(args.seed)
            payload = rng.integers(0, 2, code.payload_len, dtype=np.int8)
        else:
            payload = args.payload
        x = encode(code, map_payload(code, payload))
        print("".join(map(str, payload.tolist())))
        print("".join(map(str, x.tolist())))
        return 0

    if args.command == "decode":
        code = load_code(args.code, crc=get_crc(args.crc))
        llrs = _load_llrs(args.llr)
        if args.algo == "sc":
            u, x = sc_decode(code, llrs)
            result = None
        elif args.algo == "ssc":
            u, x = ssc_decode(code, llrs)
            result = None
        elif args.algo == "mlssc":
            u, x = ml_ssc_decode(code, llrs, args.wml)
            result = None
        elif args.algo == "cascl":
            result = ca_scl_decode(code, llrs, args.list_size)
        else:
            mode = args.algo.split("-", 1)[1]
            result = rlld_decode(code, llrs, args.list_size, args.wt, args.wml,
                                 mode=mode)
        if result is None:
            payload = u[code.info_idx][: code.payload_len]
            print("".join(map(str, payload.tolist())))
            if args.json:
                print(json.dumps({"payload": "".join(map(str, payload.tolist()))}))
        else:
            print("".join(map(str, result.payload.tolist())))
            if args.json:
                print(json.dumps({
                    "payload": "".join(map(str, result.payload.tolist())),
                    "metric": result.metric,
                    "crc_ok": result.crc_ok,
                    "survivor_metrics": [float(m) for m in result.metrics],
                    "n_activations": result.n_activations,
                }))
        return 0

    if args.command == "simulate":
        code = load_code(args.code, crc=get_crc(args.crc))
        spec = RunSpec(code, args.algo, args.list_size, args.wt, args.wml,
                       args.snr, args.max_frames, args.max_errors, args.seed,
                       args.noiseless, args.workers)
        result = simulate(spec)
        stream = _open_out(args.out)
        try:
            emit(result, stream, args.format)
        finally:
            if stream is not sys.stdout:
                stream.close()
        return 0

    if args.command == "latency":
        code = load_code(args.code)
        ctree = prune_and_label(build_tree(code), args.wt, args.wml)
        report = rlld_cycles(ctree, ArchParams(p=args.p, n_s=args.ns))
        if args.json:
            print(json.dumps({
                "block_len": report.block_len,
                "k": report.k,
                "n_c": report.n_c,
                "n_l": report.n_l,
                "n_a": report.n_a,
                "n_p": report.n_p,
                "n_r": report.n_r,
                "cycle_ratio": report.cycle_ratio,
                "latency_ratio": report.latency_ratio,
            }, indent=2))
        else:
            print("\n".join(report.lines()))
        return 0

    if args.command == "tree":
        code = load_code(args.code)
        ctree = prune_and_label(build_tree(code), args.wt, args.wml)
        text = to_dot(ctree) if args.dot else dump_tree(ctree)
        stream = _open_out(args.out)
        try:
            stream.write(text + "\n")
        finally:
            if stream is not sys.stdout:
                stream.close()
        return 0

    parser.error(f"unhandled command {args.command}")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
