"""Reproducible Monte Carlo harness over the pipeline.

One JSONL line per trial, written in trial order with incremental flushing.
Records are fully determined by (config, master_seed, trial_index), so a
rerun of the same invocation reproduces the output byte for byte; wall-clock
timings are therefore kept out of the record file and written to a sidecar
(``<out>.timings``) instead. Trials run on a worker pool when asked to, each
on its own seed stream, so parallel and serial execution commit identical
record sets.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .absorber import PipelineResult, run_pipeline
from .errors import ConfigError
from .generators import PerturbationConfig, trial_rng
from .graph_core import save_graph
from .rdfs import format_trace

WILSON_Z = 1.959963984540054  # two-sided 95%

RECORD_FIELDS = (
    "n",
    "d",
    "family",
    "C",
    "K",
    "alpha",
    "epsilon",
    "r",
    "p2",
    "master_seed",
    "trial_index",
    "stage_reached",
    "success",
    "rdfs_path_vertices",
    "min_Bi_size",
    "absorb_steps",
    "closing_pairs_examined",
)

GROUP_FIELDS = ("n", "d", "family", "C", "K", "alpha", "epsilon", "r", "p2", "master_seed")


@dataclass(frozen=True)
class ExperimentRecord:
    """One trial's configuration echo, outcome, and diagnostics."""

    n: int
    d: float
    family: str
    C: float
    K: float
    alpha: float
    epsilon: float
    r: int
    p2: float
    master_seed: int
    trial_index: int
    stage_reached: str
    success: bool
    rdfs_path_vertices: int
    min_Bi_size: int | None
    absorb_steps: int
    closing_pairs_examined: int | None
    runtime_ms: float | None = None

    def to_json_line(self) -> str:
        # runtime_ms is wall clock and would break byte-reproducibility.
        payload = {k: getattr(self, k) for k in RECORD_FIELDS}
        return json.dumps(payload, separators=(",", ":"), sort_keys=False)

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentRecord":
        return cls(**{k: d[k] for k in RECORD_FIELDS}, runtime_ms=d.get("runtime_ms"))


def record_from_result(cfg: PerturbationConfig, trial_index: int, result: PipelineResult, runtime_ms: float | None = None) -> ExperimentRecord:
    return ExperimentRecord(
        n=cfg.n,
        d=cfg.d,
        family=cfg.family,
        C=cfg.C,
        K=cfg.K,
        alpha=cfg.alpha,
        epsilon=cfg.effective_epsilon,
        r=cfg.r,
        p2=cfg.p2,
        master_seed=cfg.master_seed,
        trial_index=trial_index,
        stage_reached=result.stage,
        success=result.success,
        rdfs_path_vertices=result.stats.rdfs_path_vertices,
        min_Bi_size=result.stats.min_b_size,
        absorb_steps=result.stats.absorb_steps,
        closing_pairs_examined=result.stats.closing_pairs_examined,
        runtime_ms=runtime_ms,
    )


def run_trial(cfg: PerturbationConfig, trial_index: int, keep_trace: bool = False) -> tuple[ExperimentRecord, PipelineResult]:
    """Run one deterministic trial on the (master_seed, trial_index) stream."""
    rng = trial_rng(cfg.master_seed, trial_index)
    start = time.perf_counter()
    result = run_pipeline(cfg, rng, keep_trace=keep_trace)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    return record_from_result(cfg, trial_index, result, elapsed_ms), result


def _trial_payload(args: tuple[PerturbationConfig, int, bool, bool]) -> tuple[int, ExperimentRecord, str | None, str | None]:
    cfg, idx, want_cycle, want_trace = args
    record, result = run_trial(cfg, idx, keep_trace=want_trace)
    cycle_text = None
    if want_cycle and result.cycle is not None:
        cycle_text = " ".join(str(v) for v in result.cycle.seq) + "\n"
    trace_text = format_trace(result.trace) if want_trace and result.trace is not None else None
    return idx, record, cycle_text, trace_text


def run_experiment(
    cfg: PerturbationConfig,
    trials: int,
    out_path: str | Path | None = None,
    workers: int = 1,
    dump_dir: str | Path | None = None,
    trace: bool = False,
) -> list[ExperimentRecord]:
    """Execute ``trials`` pipeline runs, streaming JSONL records in trial order.

    With ``dump_dir`` set, each trial's coloured union graph is written as
    ``trial_NNNNN.graph`` plus ``trial_NNNNN.cycle`` for successes, so stored
    cycles can be re-verified after a reload. ``trace`` additionally writes
    the per-round search log.
    """
    if trials < 1:
        raise ConfigError(f"trials must be at least 1, got {trials}")
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")

    dump = Path(dump_dir) if dump_dir is not None else None
    if dump is not None:
        dump.mkdir(parents=True, exist_ok=True)

    out_f: IO[str] | None = None
    timings_f: IO[str] | None = None
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_f = open(out_path, "w", encoding="utf-8")
        timings_f = open(str(out_path) + ".timings", "w", encoding="utf-8")

    want_payload = dump is not None
    records: list[ExperimentRecord] = []

    def commit(idx: int, record: ExperimentRecord, cycle_text: str | None, trace_text: str | None) -> None:
        records.append(record)
        if out_f is not None:
            out_f.write(record.to_json_line() + "\n")
            out_f.flush()
        if timings_f is not None:
            timings_f.write(json.dumps({"trial_index": idx, "runtime_ms": record.runtime_ms}) + "\n")
            timings_f.flush()
        if dump is not None:
            _dump_trial(dump, cfg, idx, cycle_text)
        if trace_text is not None:
            target = dump if dump is not None else (out_path.parent if out_path is not None else Path("."))
            (target / f"trial_{idx:05d}.trace").write_text(trace_text, encoding="utf-8")

    try:
        if workers == 1:
            for idx in range(trials):
                commit(*_trial_payload((cfg, idx, want_payload, trace)))
        else:
            # Buffer out-of-order completions; commit strictly by trial index.
            pending: dict[int, tuple[ExperimentRecord, str | None, str | None]] = {}
            next_commit = 0
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(_trial_payload, (cfg, i, want_payload, trace)) for i in range(trials)}
                while futures:
                    done, futures = wait(futures, return_when=FIRST_COMPLETED)
                    for fut in done:
                        idx, record, cycle_text, trace_text = fut.result()
                        pending[idx] = (record, cycle_text, trace_text)
                    while next_commit in pending:
                        commit(next_commit, *pending.pop(next_commit))
                        next_commit += 1
    finally:
        if out_f is not None:
            out_f.close()
        if timings_f is not None:
            timings_f.close()
    return records


def _dump_trial(dump: Path, cfg: PerturbationConfig, idx: int, cycle_text: str | None) -> None:
    # The coloured union is reproducible from the trial stream; rebuild it
    # here so workers do not ship multi-megabyte graphs back.
    from .generators import colour_union, make_seed, sample_gnp

    rng = trial_rng(cfg.master_seed, idx)
    seed = make_seed(cfg.family, cfg.n, cfg.d, rng)
    r1 = sample_gnp(cfg.n, cfg.K / cfg.n, rng)
    r2 = sample_gnp(cfg.n, cfg.p2, rng)
    coloured, _ = colour_union(seed, r1, r2, cfg.r, rng)
    save_graph(coloured, dump / f"trial_{idx:05d}.graph")
    if cycle_text is not None:
        (dump / f"trial_{idx:05d}.cycle").write_text(cycle_text, encoding="utf-8")


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Two-sided Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ConfigError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = phat + z * z / (2 * trials)
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return (centre - half) / denom, (centre + half) / denom


SUMMARY_COLUMNS = list(GROUP_FIELDS) + [
    "trials",
    "successes",
    "success_rate",
    "wilson_low",
    "wilson_high",
    "fail_r1_path",
    "fail_absorption",
    "fail_closing",
    "mean_rdfs_path_ratio",
    "mean_min_bi_size",
    "mean_runtime_ms",
]


def load_records(path: str | Path, diagnostics: IO[str] | None = None) -> tuple[list[ExperimentRecord], int]:
    """Read a JSONL record file, skipping malformed lines with a count."""
    diagnostics = diagnostics or sys.stderr
    records: list[ExperimentRecord] = []
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                records.append(ExperimentRecord.from_json_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError):
                skipped += 1
    if skipped:
        print(f"skipped {skipped} malformed line(s)", file=diagnostics)
    timings_path = Path(str(path) + ".timings")
    if timings_path.exists():
        timings: dict[int, float] = {}
        with open(timings_path, "r", encoding="utf-8") as f:
            for line in f:
                try:
                    d = json.loads(line)
                    timings[d["trial_index"]] = d["runtime_ms"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    continue
        records = [
            ExperimentRecord(**{**asdict(rec), "runtime_ms": timings.get(rec.trial_index)})
            for rec in records
        ]
    return records, skipped


def summarize(in_path: str | Path, out_path: str | Path | None = None, diagnostics: IO[str] | None = None) -> list[dict]:
    """Aggregate a record file into one CSV row per configuration group."""
    records, _ = load_records(in_path, diagnostics)
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in records:
        key = tuple(getattr(rec, f) for f in GROUP_FIELDS)
        groups.setdefault(key, []).append(rec)

    rows: list[dict] = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        recs = groups[key]
        trials = len(recs)
        successes = sum(1 for r in recs if r.success)
        low, high = wilson_interval(successes, trials)
        n = recs[0].n
        bi = [r.min_Bi_size for r in recs if r.min_Bi_size is not None]
        times = [r.runtime_ms for r in recs if r.runtime_ms is not None]
        row = dict(zip(GROUP_FIELDS, key))
        row.update(
            trials=trials,
            successes=successes,
            success_rate=successes / trials,
            wilson_low=low,
            wilson_high=high,
            fail_r1_path=sum(1 for r in recs if not r.success and r.stage_reached == "r1_path"),
            fail_absorption=sum(1 for r in recs if not r.success and r.stage_reached == "absorption"),
            fail_closing=sum(1 for r in recs if not r.success and r.stage_reached == "closing"),
            mean_rdfs_path_ratio=sum(r.rdfs_path_vertices for r in recs) / (trials * n),
            mean_min_bi_size=sum(bi) / len(bi) if bi else "",
            mean_runtime_ms=sum(times) / len(times) if times else "",
        )
        rows.append(row)

    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    return rows
