"""Common-preference constructions, closed-form counts and exhaustive adequacy checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .core import Arrangement, Market, Matching
from .engines import two_step_arrays
from .stability import blocking_count

DEFAULT_ENUMERATION_BUDGET = 2_000_000


def common_market(n_doctors: int, n_hospitals: int) -> Market:
    """Everyone ranks the other side by index and finds every partner acceptable."""
    return Market.from_lists([range(n_hospitals)] * n_doctors, [range(n_doctors)] * n_hospitals)


@dataclass(frozen=True)
class ClosedFormPrediction:
    m: int
    n: int
    matched_count: int
    blocking_count: int


def predict_common(l: int, k: int, n_doctors: int, n_hospitals: int) -> ClosedFormPrediction:
    """Matched-hospital and blocking-pair counts as given by the published closed forms.

    These formulas only agree with the pipeline on part of the parameter
    space; :func:`predict_common_exact` gives the exact counts.
    """
    if l < 1 or k < 1:
        raise ValueError("interview caps must be >= 1")
    D, H = n_doctors, n_hospitals
    m = min(H // k, D // l)
    n = min(H - m * k, D - m * l)
    if k == l:
        return ClosedFormPrediction(m, n, min(D, H), 0)
    if k > l:
        matched = m * l + n
        blocking = sum(D - (r * k + i) for r in range(m) for i in range(l + 1, k + 1))
    else:
        matched = m * k + n
        blocking = sum(D - (r * l + i) for r in range(m) for i in range(k + 1, l + 1))
    return ClosedFormPrediction(m, n, matched, blocking)


def common_matching(l: int, k: int, n_doctors: int, n_hospitals: int) -> Matching:
    """Final matching on ``common_market`` under ``(l, k)``, built from the block structure.

    Interviews form consecutive blocks: hospitals ``r*k .. r*k+k-1`` interview
    doctors ``r*l .. r*l+l-1`` (truncated at the ends of either side), and
    within a block partners pair up assortatively.
    """
    match = [-1] * n_doctors
    r = 0
    while r * k < n_hospitals and r * l < n_doctors:
        size = min(l, n_doctors - r * l, k, n_hospitals - r * k)
        for j in range(size):
            match[r * l + j] = r * k + j
        r += 1
    return Matching.from_doctor_array(match, n_hospitals)


def _common_blocking(mu: Matching) -> int:
    # under common preferences (lower index = better) a pair blocks iff at
    # least one side is unmatched and the other strictly prefers it
    md = mu.doctor_array()
    mh = np.array([-1 if d is None else d for d in mu.of_hospital])
    inf = max(len(md), len(mh)) + 1
    d_cur = np.where(md >= 0, md, inf)
    h_cur = np.where(mh >= 0, mh, inf)
    total = 0
    for t in np.nonzero(mh < 0)[0]:
        total += int((d_cur > t).sum())
    for s in np.nonzero(md < 0)[0]:
        total += int(((h_cur > s) & (mh >= 0)).sum())
    return total


def predict_common_exact(l: int, k: int, n_doctors: int, n_hospitals: int) -> ClosedFormPrediction:
    if l < 1 or k < 1:
        raise ValueError("interview caps must be >= 1")
    base = predict_common(l, k, n_doctors, n_hospitals)
    mu = common_matching(l, k, n_doctors, n_hospitals)
    matched = sum(h is not None for h in mu.of_doctor)
    return ClosedFormPrediction(base.m, base.n, matched, _common_blocking(mu))


class OracleRow(NamedTuple):
    n_doctors: int
    n_hospitals: int
    l: int
    k: int
    predicted_matched: int
    observed_matched: int
    predicted_blocking: int
    observed_blocking: int

    @property
    def branch(self) -> str:
        return "k>l" if self.k > self.l else "k<l" if self.k < self.l else "k=l"

    @property
    def matched_ok(self) -> bool:
        return self.predicted_matched == self.observed_matched

    @property
    def blocking_ok(self) -> bool:
        return self.predicted_blocking == self.observed_blocking


def observe_common(l: int, k: int, market: Market) -> tuple:
    """``(matched_hospitals, blocking_pairs)`` from running the pipeline."""
    _, md = two_step_arrays(market, [l] * market.n_hospitals, [k] * market.n_doctors)
    return int((md >= 0).sum()), blocking_count(md, market)


def oracle_grid(max_size: int = 12, max_cap: int = 12, min_size: int = 2, exact: bool = False) -> list:
    """Compare closed-form predictions against the pipeline on every common market in the grid."""
    predict = predict_common_exact if exact else predict_common
    rows = []
    for D in range(min_size, max_size + 1):
        for H in range(min_size, max_size + 1):
            market = common_market(D, H)
            for l in range(1, max_cap + 1):
                for k in range(1, max_cap + 1):
                    p = predict(l, k, D, H)
                    om, ob = observe_common(l, k, market)
                    rows.append(OracleRow(D, H, l, k, p.matched_count, om, p.blocking_count, ob))
    return rows


def is_adequate_common_predicted(l: int, k: int, n_doctors: int, n_hospitals: int) -> bool:
    """Homogeneous adequacy under common preferences: equal caps, or both caps cover the short side."""
    short = min(n_doctors, n_hospitals)
    return l == k or (l >= short and k >= short)


class DegradationRow(NamedTuple):
    k: int
    matched: int
    blocking: int


@dataclass(frozen=True)
class DegradationReport:
    l: int
    rows: tuple
    monotone: bool


def monotone_degradation_check(l: int, k_list, n_doctors: int, n_hospitals: int) -> DegradationReport:
    """Pipeline counts on ``common_market`` for each k.

    ``monotone`` is true when, on each side of ``l`` separately, matched
    hospitals never increase and blocking pairs never decrease as ``|k - l|``
    grows.
    """
    market = common_market(n_doctors, n_hospitals)
    rows = tuple(DegradationRow(k, *observe_common(l, k, market)) for k in k_list)
    ok = True
    for side in (lambda k: k >= l, lambda k: k <= l):
        seq = sorted((r for r in rows if side(r.k)), key=lambda r: abs(r.k - l))
        for a, b in zip(seq, seq[1:]):
            if b.matched > a.matched or b.blocking < a.blocking:
                ok = False
    return DegradationReport(l, rows, ok)


# exhaustive enumeration over preference profiles


def _agent_orderings(n_partners: int) -> list:
    """Every strict order over partners plus the outside option, as (ranked, acceptable_count)."""
    out = []
    for perm in itertools.permutations(list(range(n_partners)) + [None]):
        cut = perm.index(None)
        ranked = tuple(p for p in perm if p is not None)
        out.append((ranked, cut))
    return out


def _side_arrays(choice, orderings, n_partners):
    n = len(choice)
    pref = np.full((n, n_partners), -1, dtype=np.int32)
    rank = np.full((n, n_partners), n_partners + 1, dtype=np.int32)
    acc = np.zeros(n, dtype=np.int32)
    for i, c in enumerate(choice):
        ranked, cut = orderings[c]
        acc[i] = cut
        for pos, j in enumerate(ranked[:cut]):
            pref[i, pos] = j
            rank[i, j] = pos
    return pref, rank, acc


def profile_count(n_doctors: int, n_hospitals: int) -> int:
    return math.factorial(n_hospitals + 1) ** n_doctors * math.factorial(n_doctors + 1) ** n_hospitals


def enumerate_profiles(n_doctors: int, n_hospitals: int):
    """Yield array bundles ``(doc_pref, doc_rank, doc_acc, hosp_pref, hosp_rank, hosp_acc)`` for every profile."""
    d_orders = _agent_orderings(n_hospitals)
    h_orders = _agent_orderings(n_doctors)
    d_side = [_side_arrays(c, d_orders, n_hospitals) for c in itertools.product(range(len(d_orders)), repeat=n_doctors)]
    h_side = [_side_arrays(c, h_orders, n_doctors) for c in itertools.product(range(len(h_orders)), repeat=n_hospitals)]
    for dp, dr, da in d_side:
        for hp, hr, ha in h_side:
            yield dp, dr, da, hp, hr, ha


def profile_market(bundle) -> Market:
    """Rebuild a :class:`Market` from an enumerated profile bundle."""
    from .core import Preference

    dp, dr, da, hp, hr, ha = bundle
    docs = [Preference(tuple(int(x) for x in dp[i, : da[i]]), int(da[i])) for i in range(len(da))]
    hosps = [Preference(tuple(int(x) for x in hp[i, : ha[i]]), int(ha[i])) for i in range(len(ha))]
    return Market(docs, hosps)


def _adequate_arrays(bundle, iota, kappa) -> bool:
    dp, dr, da, hp, hr, ha = bundle
    mask = _kernels.interview_kernel(hp, ha, dr, da, iota, kappa)
    md = _kernels.doctor_da_kernel(dp, da, hr, ha, mask)
    return _kernels.blocking_count_kernel(md, dr, da, hr, ha) == 0


def global_adequacy_enumerate(
    n_doctors: int,
    n_hospitals: int,
    capacity_bound: int,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> list:
    """All arrangements with capacities in ``1..capacity_bound`` that are adequate at every profile.

    Raises ``ValueError`` when the worst-case number of pipeline runs exceeds
    ``budget``.
    """
    n_profiles = profile_count(n_doctors, n_hospitals)
    n_arr = capacity_bound ** (n_doctors + n_hospitals)
    estimate = n_profiles * n_arr
    if estimate > budget:
        raise ValueError(
            f"enumeration needs up to {estimate:,} pipeline runs "
            f"({n_profiles:,} profiles x {n_arr:,} arrangements), budget is {budget:,}"
        )
    profiles = list(enumerate_profiles(n_doctors, n_hospitals))
    result = []
    for caps in itertools.product(range(1, capacity_bound + 1), repeat=n_doctors + n_hospitals):
        kappa = np.array(caps[:n_doctors], dtype=np.int32)
        iota = np.array(caps[n_doctors:], dtype=np.int32)
        if all(_adequate_arrays(b, iota, kappa) for b in profiles):
            result.append(Arrangement(iota, kappa))
    return result


def first_inadequate_profile(arrangement: Arrangement, n_doctors: int, n_hospitals: int):
    """A profile at which ``arrangement`` is not adequate, or ``None``."""
    iota = np.array(arrangement.iota, dtype=np.int32)
    kappa = np.array(arrangement.kappa, dtype=np.int32)
    for b in enumerate_profiles(n_doctors, n_hospitals):
        if not _adequate_arrays(b, iota, kappa):
            return profile_market(b)
    return None


def nonhomogeneous_counterexample() -> list:
    """4 doctors, 3 hospitals: one doctor with 3 interview slots, the rest 2;
    one hospital with 4 slots, the rest 2. Returned for every placement of the
    two special agents in the common ranking."""
    out = []
    for sd in range(4):
        for sh in range(3):
            kappa = [2] * 4
            kappa[sd] = 3
            iota = [2] * 3
            iota[sh] = 4
            out.append(Arrangement(iota, kappa))
    return out
