"""Deferred-acceptance engines for the interview stage and the final match.

Two routes are provided for each engine:

* a synchronous-round reference implementation that can record a
  :class:`RoundLog` (every proposer acts, then every receiver chooses), and
* a compiled kernel used for large markets and sweeps.

Both produce the same matching; ``method`` selects the route.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .choice import choose
from .core import AgentId, Arrangement, InterviewMatching, Market, Matching, Side, restrict_profile

ACCEPTED = "accepted"
REJECTED = "rejected"


class Event(NamedTuple):
    round: int
    proposer_side: str
    proposer: int
    proposee: int
    outcome: str


@dataclass
class RoundLog:
    """Ordered trace of one engine run.

    A held offer that is later displaced shows up as a second event for the
    same pair with outcome ``rejected``, so the last event per pair is its
    final state.
    """

    events: list = field(default_factory=list)

    def record(self, rnd, side: Side, proposer, proposee, outcome):
        self.events.append(Event(rnd, side.value, proposer, proposee, outcome))

    @property
    def n_rounds(self) -> int:
        return max((e.round for e in self.events), default=0)

    def in_round(self, rnd: int) -> list:
        return [e for e in self.events if e.round == rnd]

    def replay(self) -> list:
        """Pairs ``(proposer, proposee)`` whose last recorded outcome is acceptance."""
        last = {}
        for e in self.events:
            last[(e.proposer, e.proposee)] = e.outcome
        return sorted(p for p, o in last.items() if o == ACCEPTED)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "proposer_side", "proposer", "proposee", "outcome"])
        w.writerows(self.events)
        return buf.getvalue()


def _resolve(method: str, log) -> str:
    if method not in ("auto", "reference", "fast"):
        raise ValueError(f"unknown method {method!r}")
    if log is not None:
        if method == "fast":
            raise ValueError("the fast engine does not record a round log")
        return "reference"
    return "fast" if method == "auto" else method


def interview_da(
    market: Market,
    arrangement: Arrangement,
    log: Optional[RoundLog] = None,
    method: str = "auto",
) -> InterviewMatching:
    """Hospital-proposing many-to-many DA (the interview stage).

    Each round every hospital with free slots offers interviews to its next
    best not-yet-invited acceptable doctors, one per free slot; every doctor
    then keeps her ``kappa_d`` best offers (held plus new) and rejects the
    rest. Stops when no hospital has anyone left to invite.
    """
    arrangement.check(market)
    if _resolve(method, log) == "fast":
        mask = interview_mask(market, arrangement.iota, arrangement.kappa)
        return InterviewMatching.from_mask(mask)

    nd, nh = market.n_doctors, market.n_hospitals
    held_d = [set() for _ in range(nd)]
    held_h = [set() for _ in range(nh)]
    ptr = [0] * nh
    rnd = 0
    while True:
        rnd += 1
        offers = {}
        order = []
        for h in range(nh):
            acc = market.prefs_hospitals[h].acceptable
            free = arrangement.iota[h] - len(held_h[h])
            while free > 0 and ptr[h] < len(acc):
                d = acc[ptr[h]]
                ptr[h] += 1
                free -= 1
                offers.setdefault(d, set()).add(h)
                order.append((h, d))
        if not order:
            break
        kept = {}
        displaced = []
        for d, new in offers.items():
            keep = choose(AgentId(Side.DOCTOR, d), held_d[d] | new, market, arrangement.kappa[d])
            kept[d] = keep
            for h in sorted(held_d[d] - keep):
                displaced.append((h, d))
                held_h[h].discard(d)
            for h in keep - held_d[d]:
                held_h[h].add(d)
            held_d[d] = set(keep)
        if log is not None:
            for h, d in order:
                log.record(rnd, Side.HOSPITAL, h, d, ACCEPTED if h in kept[d] else REJECTED)
            for h, d in sorted(displaced):
                log.record(rnd, Side.HOSPITAL, h, d, REJECTED)
    return InterviewMatching(held_d, held_h)


def doctor_da(market: Market, log: Optional[RoundLog] = None, method: str = "auto") -> Matching:
    """Doctor-proposing one-to-one DA; returns the doctor-optimal stable matching."""
    if _resolve(method, log) == "fast":
        allowed = np.ones((market.n_doctors, market.n_hospitals), dtype=bool)
        match_d = _kernels.doctor_da_kernel(
            market.doctor_pref_matrix,
            market.doctor_acceptable_count,
            market.hospital_rank,
            market.hospital_acceptable_count,
            allowed,
        )
        return Matching.from_doctor_array(match_d, market.n_hospitals)

    nd, nh = market.n_doctors, market.n_hospitals
    match_d = [None] * nd
    match_h = [None] * nh
    ptr = [0] * nd
    rnd = 0
    while True:
        rnd += 1
        proposals = {}
        order = []
        for d in range(nd):
            acc = market.prefs_doctors[d].acceptable
            if match_d[d] is None and ptr[d] < len(acc):
                h = acc[ptr[d]]
                ptr[d] += 1
                proposals.setdefault(h, set()).add(d)
                order.append((d, h))
        if not order:
            break
        displaced = []
        for h, new in proposals.items():
            pool = new if match_h[h] is None else new | {match_h[h]}
            keep = choose(AgentId(Side.HOSPITAL, h), pool, market, 1)
            winner = next(iter(keep), None)
            if match_h[h] is not None and match_h[h] != winner:
                displaced.append((match_h[h], h))
                match_d[match_h[h]] = None
            match_h[h] = winner
            if winner is not None:
                match_d[winner] = h
        if log is not None:
            for d, h in order:
                log.record(rnd, Side.DOCTOR, d, h, ACCEPTED if match_h[h] == d else REJECTED)
            for d, h in sorted(displaced):
                log.record(rnd, Side.DOCTOR, d, h, REJECTED)
    return Matching(match_d, match_h)


# array-level pipeline used by the estimator and the sweeps


def interview_mask(market: Market, iota, kappa) -> np.ndarray:
    return _kernels.interview_kernel(
        market.hospital_pref_matrix,
        market.hospital_acceptable_count,
        market.doctor_rank,
        market.doctor_acceptable_count,
        np.asarray(iota, dtype=np.int32),
        np.asarray(kappa, dtype=np.int32),
    )


def final_match_array(market: Market, mask: np.ndarray) -> np.ndarray:
    """Doctor-proposing DA on the profile restricted to ``mask``; hospital per doctor, -1 if none."""
    return _kernels.doctor_da_kernel(
        market.doctor_pref_matrix,
        market.doctor_acceptable_count,
        market.hospital_rank,
        market.hospital_acceptable_count,
        mask,
    )


def two_step_arrays(market: Market, iota, kappa) -> tuple:
    """Interview mask and final doctor->hospital array for arrangement ``(iota, kappa)``."""
    mask = interview_mask(market, iota, kappa)
    return mask, final_match_array(market, mask)


def two_step(market: Market, arrangement: Arrangement, method: str = "auto") -> tuple:
    """Run the interview stage then the final match; returns ``(nu, mu)``."""
    nu = interview_da(market, arrangement, method=method)
    if _resolve(method, None) == "fast":
        mu = Matching.from_doctor_array(final_match_array(market, nu.to_mask()), market.n_hospitals)
    else:
        mu = doctor_da(restrict_profile(market, nu), method="reference")
    return nu, mu
