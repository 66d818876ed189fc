"""Monte Carlo harness: k sweeps, policy comparisons, ideal-world comparison, l x k grid.

Every replication draws one market from ``GenParams`` (seeded per
replication) and evaluates all arrangements on that same market. Work is
split by replication; results are merged in replication order so outputs do
not depend on the degree of parallelism.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .core import compare_welfare_arrays
from .estimator import TwoStepMatcher
from .prefgen import GenParams, sample_replication

logger = logging.getLogger(__name__)

DEFAULT_GEN = GenParams(beta=40.0, gamma=20.0, n_doctors=470, n_hospitals=400)
DEFAULT_L = 25
DEFAULT_K_RANGE = (1, 100)
DEFAULT_K_CAP = 5
DEFAULT_REPLICATIONS = 100


def resolve_parallelism(parallelism) -> int:
    if parallelism in (None, "auto"):
        return os.cpu_count() or 1
    n = int(parallelism)
    if n < 1:
        raise ValueError(f"parallelism must be >= 1 or 'auto', got {parallelism!r}")
    return n


def _run_replications(fn, args, replications: int, parallelism) -> list:
    jobs = [(args, r) for r in range(replications)]
    workers = min(resolve_parallelism(parallelism), replications)
    if workers <= 1:
        results = [fn(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, jobs))
    return [row for chunk in results for row in chunk]


# k sweep


@dataclass(frozen=True)
class SweepConfig:
    gen: GenParams = DEFAULT_GEN
    l: int = DEFAULT_L
    k_min: int = DEFAULT_K_RANGE[0]
    k_max: int = DEFAULT_K_RANGE[1]
    replications: int = DEFAULT_REPLICATIONS
    k_policy: int = DEFAULT_K_CAP
    parallelism: object = 1

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError(f"need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.l < 1 or self.k_policy < 1:
            raise ValueError("interview caps must be >= 1")


class SweepRow(NamedTuple):
    k: int
    replication: int
    match_rate: float
    blocking_pairs: int
    doctors_zero_interviews: int
    mean_interviews_per_doctor: float


class SweepAggRow(NamedTuple):
    k: int
    mean_match_rate: float
    sd_match_rate: float
    mean_blocking_pairs: float
    sd_blocking_pairs: float
    n_reps: int


def _sweep_one(job) -> list:
    config, r = job
    market, _ = sample_replication(config.gen, r)
    rows = []
    for k in range(config.k_min, config.k_max + 1):
        est = TwoStepMatcher(l=config.l, k=k).fit(market)
        counts = est.interview_counts_
        rows.append(
            SweepRow(k, r, est.match_rate_, est.n_blocking_pairs_, int((counts == 0).sum()), float(counts.mean()))
        )
    logger.debug("sweep replication %d done", r)
    return rows


def sweep_k(config: SweepConfig) -> list:
    """One row per (k, replication), sorted by replication then k."""
    return _run_replications(_sweep_one, config, config.replications, config.parallelism)


def _sd(values) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def aggregate_sweep(rows) -> list:
    by_k = {}
    for row in rows:
        by_k.setdefault(row.k, []).append(row)
    out = []
    for k in sorted(by_k):
        mr = [r.match_rate for r in by_k[k]]
        bp = [r.blocking_pairs for r in by_k[k]]
        out.append(SweepAggRow(k, float(np.mean(mr)), _sd(mr), float(np.mean(bp)), _sd(bp), len(mr)))
    return out


def best_k(agg_rows) -> tuple:
    """``(k maximizing mean match rate, that rate, k minimizing mean blocking, that mean)``."""
    top = max(agg_rows, key=lambda r: (r.mean_match_rate, -r.k))
    low = min(agg_rows, key=lambda r: (r.mean_blocking_pairs, r.k))
    return top.k, top.mean_match_rate, low.k, low.mean_blocking_pairs


# policy comparison: capped doctors vs unconstrained doctors


class CompareRow(NamedTuple):
    replication: int
    doctors_prefer_capped: int
    doctors_prefer_uncapped: int
    hospitals_prefer_capped: int
    hospitals_prefer_uncapped: int
    excess_blocking_pairs: int


class HistRow(NamedTuple):
    arm: str
    interviews: int
    doctor_count: int
    replication: int


def _welfare(a: TwoStepMatcher, b: TwoStepMatcher, market) -> tuple:
    docs = compare_welfare_arrays(
        a.doctor_assignment_, b.doctor_assignment_, market.doctor_rank, market.doctor_acceptable_count
    )
    hosps = compare_welfare_arrays(
        a.hospital_assignment_, b.hospital_assignment_, market.hospital_rank, market.hospital_acceptable_count
    )
    return docs, hosps


def _histogram(arm: str, counts: np.ndarray, r: int) -> list:
    hist = np.bincount(counts)
    return [HistRow(arm, i, int(c), r) for i, c in enumerate(hist.tolist())]


def _compare_one(job) -> list:
    (gen, l, k_cap), r = job
    market, _ = sample_replication(gen, r)
    capped = TwoStepMatcher(l=l, k=k_cap).fit(market)
    uncapped = TwoStepMatcher(l=l, k=market.n_hospitals).fit(market)
    (dc, du, _), (hc, hu, _) = _welfare(capped, uncapped, market)
    row = CompareRow(r, dc, du, hc, hu, uncapped.n_blocking_pairs_ - capped.n_blocking_pairs_)
    hist = _histogram("capped", capped.interview_counts_, r) + _histogram("uncapped", uncapped.interview_counts_, r)
    return [(row, hist)]


def compare_policies(gen: GenParams, l: int, k_cap: int, replications: int = DEFAULT_REPLICATIONS, parallelism=1) -> tuple:
    """``(compare_rows, hist_rows)``; the uncapped arm lets every doctor accept ``n_hospitals`` interviews."""
    if k_cap < 1:
        raise ValueError("k_cap must be >= 1")
    pairs = _run_replications(_compare_one, (gen, l, k_cap), replications, parallelism)
    rows = [p[0] for p in pairs]
    hist = [h for p in pairs for h in p[1]]
    return rows, hist


def zero_interview_means(hist_rows) -> dict:
    """Mean number of doctors with no interviews, per arm."""
    out = {}
    for arm in sorted({h.arm for h in hist_rows}):
        reps = {h.replication for h in hist_rows if h.arm == arm}
        zeros = sum(h.doctor_count for h in hist_rows if h.arm == arm and h.interviews == 0)
        out[arm] = zeros / len(reps)
    return out


# capped pipeline vs. a world without interviews


class IdealRow(NamedTuple):
    replication: int
    doctors_prefer_capped: int
    doctors_prefer_ideal: int
    hospitals_prefer_capped: int
    hospitals_prefer_ideal: int


def _ideal_assignment(market) -> np.ndarray:
    allowed = np.ones((market.n_doctors, market.n_hospitals), dtype=bool)
    return _kernels.doctor_da_kernel(
        market.doctor_pref_matrix,
        market.doctor_acceptable_count,
        market.hospital_rank,
        market.hospital_acceptable_count,
        allowed,
    )


def _ideal_one(job) -> list:
    (gen, l, k_cap), r = job
    market, _ = sample_replication(gen, r)
    capped = TwoStepMatcher(l=l, k=k_cap).fit(market)
    ideal_d = np.asarray(_ideal_assignment(market), dtype=np.int64)
    ideal_h = np.full(market.n_hospitals, -1, dtype=np.int64)
    matched = np.nonzero(ideal_d >= 0)[0]
    ideal_h[ideal_d[matched]] = matched
    dc, di, _ = compare_welfare_arrays(
        capped.doctor_assignment_, ideal_d, market.doctor_rank, market.doctor_acceptable_count
    )
    hc, hi, _ = compare_welfare_arrays(
        capped.hospital_assignment_, ideal_h, market.hospital_rank, market.hospital_acceptable_count
    )
    return [IdealRow(r, dc, di, hc, hi)]


def ideal_comparison(gen: GenParams, l: int, k_cap: int, replications: int = DEFAULT_REPLICATIONS, parallelism=1) -> list:
    return _run_replications(_ideal_one, (gen, l, k_cap), replications, parallelism)


# l x k grid


class HeatRow(NamedTuple):
    l: int
    k: int
    mean_match_rate: float
    n_reps: int


def _heat_one(job) -> list:
    (gen, l_range, k_range), r = job
    market, _ = sample_replication(gen, r)
    est = TwoStepMatcher()
    return [
        (l, k, r, est.set_params(l=l, k=k).fit(market).match_rate_)
        for l in l_range
        for k in k_range
    ]


def heatmap_lk(gen: GenParams, l_range, k_range, replications: int = DEFAULT_REPLICATIONS, parallelism=1) -> list:
    l_range, k_range = tuple(l_range), tuple(k_range)
    if not l_range or not k_range or min(l_range) < 1 or min(k_range) < 1:
        raise ValueError("l and k ranges must be non-empty and >= 1")
    cells = _run_replications(_heat_one, (gen, l_range, k_range), replications, parallelism)
    acc = {}
    for l, k, _, rate in cells:
        acc.setdefault((l, k), []).append(rate)
    return [HeatRow(l, k, float(np.mean(acc[(l, k)])), len(acc[(l, k)])) for l in l_range for k in k_range]


def row_argmax_k(heat_rows) -> dict:
    """For each l, the k with the highest mean match rate (smallest k on ties)."""
    best = {}
    for row in heat_rows:
        cur = best.get(row.l)
        if cur is None or row.mean_match_rate > cur.mean_match_rate:
            best[row.l] = row
    return {l: r.k for l, r in best.items()}


# output


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(path, rows, header: Optional[tuple] = None) -> int:
    """Write NamedTuple rows as CSV (header always present); returns the row count."""
    if header is None:
        if not rows:
            raise ValueError("cannot infer a header from zero rows")
        header = rows[0]._fields
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return len(rows)


def with_seed(gen: GenParams, seed: int) -> GenParams:
    return replace(gen, seed=seed)
