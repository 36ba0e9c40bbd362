"""Sigma sweep driver and CSV emission."""

from __future__ import annotations

import hashlib
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, TextIO

from .config import ScenarioConfig
from .methods import MethodKind, RunResult, run_once
from .metrics import aggregate

RAW_COLUMNS = ("method", "sigma_s", "replication", "frames_delivered", "energy_per_frame_J",
               "channel_time_per_frame_s", "delay_per_frame_s", "misses")
METRICS = RAW_COLUMNS[3:]
RAW_NAME = "raw.csv"
AGGREGATE_NAME = "aggregate.csv"


def derive_seed(master: int, method: MethodKind, sigma_s: float, replication: int) -> int:
    """64-bit run seed: blake2b over the run's identity, independent of sweep layout."""
    key = f"{master}:{method.value}:{sigma_s!r}:{replication}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RunRow:
    method: MethodKind
    sigma_s: float
    replication: int
    frames_delivered: int
    energy_per_frame_J: float
    channel_time_per_frame_s: float
    delay_per_frame_s: float
    misses: int

    @classmethod
    def from_result(cls, r: RunResult, replication: int) -> "RunRow":
        n = r.frames_delivered
        return cls(r.method, r.sigma_s, replication, n, r.energy_per_frame,
                   r.channel_time_per_frame if n else math.nan, r.delay_per_frame, r.misses)

    def values(self) -> tuple:
        return (self.method.value, self.sigma_s, self.replication, self.frames_delivered,
                self.energy_per_frame_J, self.channel_time_per_frame_s, self.delay_per_frame_s,
                self.misses)


def run_points(cfg: ScenarioConfig) -> list[tuple[MethodKind, float, int]]:
    return [(m, s, k) for m in cfg.method_kinds for s in cfg.sigma_list
            for k in range(cfg.replications)]


def run_sweep(cfg: ScenarioConfig, progress: Callable[[int, int], None] | None = None,
              trace: TextIO | None = None) -> list[RunRow]:
    """One run per (method, sigma, replication), returned in that order."""
    points = run_points(cfg)
    rows = []
    for i, (m, s, k) in enumerate(points):
        tr = None
        if trace is not None:
            trace.write(f"# run method={m.value} sigma_s={s!r} replication={k}\n")
            tr = lambda line, _w=trace.write: _w(line + "\n")
        r = run_once(cfg, m, s, derive_seed(cfg.seed, m, s, k), trace=tr)
        rows.append(RunRow.from_result(r, k))
        if progress:
            progress(i + 1, len(points))
    rows.sort(key=lambda r: (cfg.method_kinds.index(r.method), cfg.sigma_list.index(r.sigma_s),
                             r.replication))
    return rows


def fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def header(cfg: ScenarioConfig) -> str:
    return "".join(f"# {k} = {v}\n" for k, v in cfg.items())


def raw_csv(cfg: ScenarioConfig, rows: Iterable[RunRow]) -> str:
    out = io.StringIO()
    out.write(header(cfg))
    out.write(",".join(RAW_COLUMNS) + "\n")
    for r in rows:
        out.write(",".join(fmt(v) for v in r.values()) + "\n")
    return out.getvalue()


def aggregate_rows(cfg: ScenarioConfig, rows: list[RunRow]) -> list[tuple]:
    out = []
    for m in cfg.method_kinds:
        for s in cfg.sigma_list:
            group = [r for r in rows if r.method is m and r.sigma_s == s]
            line: list = [m.value, s, len(group)]
            for name in METRICS:
                vals = [getattr(r, name) for r in group]
                vals = [v for v in vals if not (isinstance(v, float) and math.isnan(v))]
                if not vals:
                    line += [math.nan, math.nan]
                    continue
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    st = aggregate(vals)
                line += [st.mean, st.ci95]
            out.append(tuple(line))
    return out


def aggregate_csv(cfg: ScenarioConfig, rows: list[RunRow]) -> str:
    cols = ["method", "sigma_s", "n"]
    for name in METRICS:
        cols += [f"{name}_mean", f"{name}_ci95"]
    out = io.StringIO()
    out.write(header(cfg))
    out.write(",".join(cols) + "\n")
    for line in aggregate_rows(cfg, rows):
        out.write(",".join(fmt(v) for v in line) + "\n")
    return out.getvalue()


def write_outputs(cfg: ScenarioConfig, rows: list[RunRow], out_dir: str | Path) -> tuple[Path, Path]:
    """Write raw.csv and aggregate.csv; OSError propagates to the caller."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    raw, agg = d / RAW_NAME, d / AGGREGATE_NAME
    raw.write_text(raw_csv(cfg, rows))
    agg.write_text(aggregate_csv(cfg, rows))
    return raw, agg
