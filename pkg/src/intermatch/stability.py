"""Blocking pairs, adequacy, match rate and a brute-force stable-set oracle."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Arrangement, Market, Matching
from .engines import two_step, two_step_arrays

MAX_BRUTEFORCE_AGENTS = 16


@dataclass(frozen=True)
class BlockReport:
    pairs: frozenset

    @property
    def count(self) -> int:
        return len(self.pairs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["doctor", "hospital"])
        w.writerows(sorted(self.pairs))
        return buf.getvalue()


def _current_ranks(match_d: np.ndarray, market: Market) -> tuple:
    dcur = np.array(market.doctor_acceptable_count, dtype=np.int64)
    hcur = np.array(market.hospital_acceptable_count, dtype=np.int64)
    matched = np.nonzero(match_d >= 0)[0]
    hs = match_d[matched]
    dcur[matched] = market.doctor_rank[matched, hs]
    hcur[hs] = market.hospital_rank[hs, matched]
    return dcur, hcur


def blocking_mask(match_d: np.ndarray, market: Market) -> np.ndarray:
    """Boolean (doctors, hospitals) matrix of blocking pairs under the full profile."""
    dcur, hcur = _current_ranks(np.asarray(match_d), market)
    return (market.doctor_rank < dcur[:, None]) & (market.hospital_rank.T < hcur[None, :])


def blocking_count(match_d: np.ndarray, market: Market) -> int:
    return int(
        _kernels.blocking_count_kernel(
            np.asarray(match_d, dtype=np.int64),
            market.doctor_rank,
            market.doctor_acceptable_count,
            market.hospital_rank,
            market.hospital_acceptable_count,
        )
    )


def blocking_pairs(mu: Matching, market: Market) -> BlockReport:
    """All pairs ``(d, h)`` that strictly prefer each other to their assignment in ``mu``."""
    mu.check(market)
    ds, hs = np.nonzero(blocking_mask(mu.doctor_array(), market))
    return BlockReport(frozenset(zip(ds.tolist(), hs.tolist())))


def is_stable(mu: Matching, market: Market) -> bool:
    return blocking_pairs(mu, market).count == 0


def is_adequate(market: Market, arrangement: Arrangement, method: str = "auto") -> bool:
    """True when the two-step matching under ``arrangement`` has no blocking pair."""
    arrangement.check(market)
    if method == "reference":
        _, mu = two_step(market, arrangement, method="reference")
        return is_stable(mu, market)
    _, match_d = two_step_arrays(market, arrangement.iota, arrangement.kappa)
    return blocking_count(match_d, market) == 0


def match_rate(mu: Matching, market: Market) -> float:
    """Fraction of hospitals (positions) that are filled."""
    mu.check(market)
    return sum(d is not None for d in mu.of_hospital) / market.n_hospitals


def stable_set_bruteforce(market: Market) -> set:
    """Every stable matching of a small market, by exhaustive enumeration.

    Only mutually acceptable pairs can appear in a stable matching, so the
    search runs over partial matchings built from those pairs.
    """
    nd, nh = market.n_doctors, market.n_hospitals
    if nd + nh > MAX_BRUTEFORCE_AGENTS:
        raise ValueError(
            f"brute-force enumeration limited to {MAX_BRUTEFORCE_AGENTS} agents, got {nd + nh}"
        )
    options = [[h for h in range(nh) if market.mutually_acceptable(d, h)] for d in range(nd)]
    found = set()
    current = [-1] * nd
    used = [False] * nh

    def rec(d):
        if d == nd:
            arr = np.array(current)
            if not blocking_mask(arr, market).any():
                found.add(Matching.from_doctor_array(arr, nh))
            return
        current[d] = -1
        rec(d + 1)
        for h in options[d]:
            if not used[h]:
                used[h] = True
                current[d] = h
                rec(d + 1)
                used[h] = False
        current[d] = -1

    rec(0)
    return found
