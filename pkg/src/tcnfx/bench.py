"""Throughput measurement: real-time factor per config and block size.

RTF = processing time / audio time, so RTF < 1 means faster than real
time. Each case streams seeded noise through an engine block by block
and reports the median and p99 per-block RTF over at least five seconds
of audio, subject to a wall-clock budget per case: a case that cannot
finish inside the budget reports the blocks it did measure instead of
stalling the whole sweep. Configs too large to build are reported as
skipped rows, never as errors.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .audio import white_noise
from .config import NetworkConfig, param_count, receptive_field, rf_milliseconds
from .engine import StreamEngine
from .errors import TcnfxError

BENCH_NOISE_SEED = 0xBEEF
DEFAULT_SECONDS = 5.0
DEFAULT_TIME_BUDGET = 120.0
WARMUP_BLOCKS = 3

_CSV_COLUMNS = ("label", "depthwise", "layers", "kernel", "dilation_growth",
                "channel_width", "block_size", "rf_samples", "rf_ms", "params",
                "rtf_median", "rtf_p99", "blocks_measured", "blocks_total",
                "status")


@dataclass(frozen=True)
class BenchCase:
    label: str
    config: NetworkConfig
    block_size: int = 512


@dataclass(frozen=True)
class BenchResult:
    case: BenchCase
    rf_samples: int | None = None
    params: int | None = None
    rtf_median: float | None = None
    rtf_p99: float | None = None
    blocks_measured: int = 0
    blocks_total: int = 0
    skipped: str | None = None

    @property
    def budget_limited(self) -> bool:
        return self.skipped is None and self.blocks_measured < self.blocks_total


def default_sweep() -> list[BenchCase]:
    """Small-to-large dense cases plus the four-second-RF depthwise/dense pair.

    The last two cases share every shape parameter (L=14, k=13, g=2, c=8,
    RF = 196597 samples = 4.46 s at 44.1 kHz) and differ only in the
    depthwise flag, putting the depthwise speedup side by side.
    """
    small = NetworkConfig(num_layers=3, kernel_size=3, dilation_growth=2,
                          channel_width=8)
    big = NetworkConfig(num_layers=14, kernel_size=13, dilation_growth=2,
                        channel_width=8)
    return [
        BenchCase("trivial-1x1", NetworkConfig(num_layers=1, kernel_size=1,
                                               channel_width=1)),
        BenchCase("small-dense", small),
        BenchCase("small-dense-n64", small, block_size=64),
        BenchCase("small-dense-n4096", small, block_size=4096),
        BenchCase("mid-dense", NetworkConfig(num_layers=8, kernel_size=9,
                                             dilation_growth=2, channel_width=8)),
        BenchCase("rf4s-depthwise", replace(big, depthwise=True)),
        BenchCase("rf4s-dense", big),
    ]


def run_case(case: BenchCase, sample_rate: int = 44100,
             seconds: float = DEFAULT_SECONDS,
             time_budget: float = DEFAULT_TIME_BUDGET) -> BenchResult:
    """Measure one case; returns a skipped result for unbuildable configs."""
    try:
        rf = receptive_field(case.config)
        engine = StreamEngine(case.config, case.block_size, sample_rate,
                              auto_gain=False)
    except TcnfxError as e:
        return BenchResult(case, skipped=str(e))

    n = case.block_size
    total = max(1, math.ceil(seconds * sample_rate / n))
    block = white_noise(case.config.in_channels, n, BENCH_NOISE_SEED)
    out = np.empty((case.config.out_channels, n), dtype=np.float32)

    for _ in range(WARMUP_BLOCKS):  # JIT compilation, cache warm-up
        engine.process_block(block, out=out)
    engine.reset()

    rtfs = []
    block_seconds = n / sample_rate
    started = time.perf_counter()
    for _ in range(total):
        t0 = time.perf_counter()
        engine.process_block(block, out=out)
        rtfs.append((time.perf_counter() - t0) / block_seconds)
        if time.perf_counter() - started > time_budget:
            break

    return BenchResult(
        case,
        rf_samples=rf,
        params=param_count(case.config),
        rtf_median=statistics.median(rtfs),
        rtf_p99=float(np.percentile(rtfs, 99)),
        blocks_measured=len(rtfs),
        blocks_total=total,
    )


def run_sweep(cases=None, sample_rate: int = 44100,
              seconds: float = DEFAULT_SECONDS,
              time_budget: float = DEFAULT_TIME_BUDGET,
              progress=None) -> list[BenchResult]:
    results = []
    for case in cases if cases is not None else default_sweep():
        if progress:
            progress(f"bench: {case.label} ...")
        results.append(run_case(case, sample_rate, seconds, time_budget))
    return results


def _row(result: BenchResult, sample_rate: int) -> dict:
    case = result.case
    cfg = case.config
    row = {
        "label": case.label,
        "depthwise": "yes" if cfg.depthwise else "no",
        "layers": cfg.num_layers,
        "kernel": cfg.kernel_size,
        "dilation_growth": cfg.dilation_growth,
        "channel_width": cfg.channel_width,
        "block_size": case.block_size,
    }
    if result.skipped is not None:
        row.update(rf_samples="", rf_ms="", params="", rtf_median="",
                   rtf_p99="", blocks_measured="", blocks_total="",
                   status=f"skipped: {result.skipped}")
    else:
        row.update(
            rf_samples=result.rf_samples,
            rf_ms=f"{rf_milliseconds(result.rf_samples, sample_rate):.1f}",
            params=result.params,
            rtf_median=f"{result.rtf_median:.4f}",
            rtf_p99=f"{result.rtf_p99:.4f}",
            blocks_measured=result.blocks_measured,
            blocks_total=result.blocks_total,
            status="budget-limited" if result.budget_limited else "ok",
        )
    return row


def format_csv(results, sample_rate: int = 44100) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for r in results:
        row = _row(r, sample_rate)
        lines.append(",".join(str(row[c]) for c in _CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def format_report(results, sample_rate: int = 44100) -> str:
    """Plain-text table of the sweep, plus backend and RTF reading notes."""
    headers = ("label", "dw", "L", "k", "g", "c", "block", "RF", "RF ms",
               "params", "RTF med", "RTF p99", "blocks", "status")
    keys = ("label", "depthwise", "layers", "kernel", "dilation_growth",
            "channel_width", "block_size", "rf_samples", "rf_ms", "params",
            "rtf_median", "rtf_p99", "blocks", "status")
    rows = []
    for r in results:
        row = _row(r, sample_rate)
        row["blocks"] = (f"{row['blocks_measured']}/{row['blocks_total']}"
                         if r.skipped is None else "")
        rows.append([str(row[k]) for k in keys])
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    out = [f"depthwise backend: {kernels.backend_name()}",
           f"sample rate: {sample_rate} Hz; RTF < 1 means faster than real time",
           ""]
    out.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in rows:
        out.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    if any(r.budget_limited for r in results):
        out.append("")
        out.append("budget-limited rows measured fewer blocks than the full "
                   "duration; RTF stats cover the measured blocks only")
    return "\n".join(out) + "\n"
