"""Command line: ``wursim run | inspect | selfcheck``.

Exit codes: 0 ok, 1 self-check failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .codec import (DataRate, WurFrame, WurFrameType, build_wur_symbols, compute_fcs,
                    ppdu_airtime, serialize_mac)
from .config import load_config
from .kernel import ConfigurationError

EXIT_OK, EXIT_SELFCHECK, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _int(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wursim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="sigma sweep; writes raw.csv and aggregate.csv")
    run.add_argument("--config", type=Path, help="key = value file (a previous CSV works too)")
    run.add_argument("--seed", type=_int, help="master seed (u64)")
    run.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    run.add_argument("--method", help="comma list: twt_plain, twt_tf, twt_guard, wur_cts")
    run.add_argument("--sigma", help="comma list of sigma values in seconds")
    run.add_argument("--replications", type=int)
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override any configuration key (repeatable)")
    run.add_argument("--trace", action="store_true", help="write the event trace to OUT/trace.txt")
    run.add_argument("--quiet", action="store_true")

    ins = sub.add_parser("inspect", help="show bit layout, FCS, symbols and airtime of a WUR frame")
    ins.add_argument("--type", type=_int, default=0, help="frame type 0..3 (default wake-up)")
    ins.add_argument("--address", type=_int, default=0x001, help="12-bit address, e.g. 0x2a")
    ins.add_argument("--td", type=_int, default=0, help="12-bit type-dependent control")
    ins.add_argument("--body", default="", help="frame body as hex bytes")
    ins.add_argument("--rate", choices=[r.value for r in DataRate], default="ldr")

    sub.add_parser("selfcheck", help="closed-form oracle scenarios and codec golden values")
    return p


def _overrides(args) -> dict:
    o = {}
    if args.seed is not None:
        o["seed"] = args.seed
    if args.method:
        o["methods"] = args.method
    if args.sigma:
        o["sigma_list"] = args.sigma
    if args.replications is not None:
        o["replications"] = args.replications
    for item in args.set:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        o[k.strip()] = v.strip()
    return o


def cmd_run(args) -> int:
    from .sweep import run_sweep, write_outputs

    cfg = load_config(args.config, _overrides(args))
    t0 = time.perf_counter()
    trace = None
    try:
        if args.trace:
            args.out.mkdir(parents=True, exist_ok=True)
            trace = open(args.out / "trace.txt", "w")

        def progress(i, n):
            if not args.quiet:
                print(f"\r{i}/{n} runs", end="", file=sys.stderr, flush=True)

        rows = run_sweep(cfg, progress, trace)
        if not args.quiet:
            print(file=sys.stderr)
        raw, agg = write_outputs(cfg, rows, args.out)
    finally:
        if trace is not None:
            trace.close()
    print(f"{len(rows)} runs in {time.perf_counter() - t0:.1f} s -> {raw}, {agg}")
    return EXIT_OK


def inspect_frame(ftype: int, address: int, td: int, body: bytes, rate: DataRate) -> str:
    frame = WurFrame(WurFrameType(ftype), address, td, body)
    bits = serialize_mac(frame)
    fcs = compute_fcs(bits[:-16])
    lay = ppdu_airtime(frame, rate)
    sync, data = build_wur_symbols(frame, rate)
    b = "".join(map(str, bits))
    lines = [
        f"type          {frame.frame_type.value} ({frame.frame_type.name})",
        f"address       {frame.address:#05x}",
        f"td_control    {frame.td_control:#05x}",
        f"body          {body.hex() or '-'}",
        f"frame_control {frame.frame_control():#04x}",
        f"mac_bits      {len(bits)}",
        f"  fc          {b[0:8]}",
        f"  address     {b[8:20]}",
        f"  td_control  {b[20:32]}",
    ]
    if body:
        lines.append(f"  body        {b[32:-16]}")
    lines += [
        f"  fcs         {b[-16:]}",
        f"fcs           {fcs:#06x}",
        f"rate          {rate.value} ({rate.kbps:g} kbps)",
        f"sync_symbols  {''.join(map(str, sync.symbols))}",
        f"data_symbols  {''.join(map(str, data.symbols))}",
        f"preamble_us   {lay.preamble_us}",
        f"bpsk_mark_us  {lay.bpsk_mark_us}",
        f"sync_us       {lay.sync_us}",
        f"data_us       {lay.data_us}",
        f"airtime_us    {lay.total_us}",
    ]
    return "\n".join(lines)


def cmd_inspect(args) -> int:
    try:
        body = bytes.fromhex(args.body)
        text = inspect_frame(args.type, args.address, args.td, body, DataRate(args.rate))
    except ValueError as e:
        raise ConfigurationError(str(e)) from None
    print(text)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import self_check

    ok, lines = self_check()
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_SELFCHECK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "inspect": cmd_inspect, "selfcheck": cmd_selfcheck}
    try:
        return handlers[args.cmd](args)
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
