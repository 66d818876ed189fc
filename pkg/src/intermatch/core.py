"""Market, preference, arrangement and matching types."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when an object's dimensions do not fit the market it is used with."""


class Side(enum.Enum):
    DOCTOR = "D"
    HOSPITAL = "H"

    @property
    def other(self) -> "Side":
        return Side.HOSPITAL if self is Side.DOCTOR else Side.DOCTOR


@dataclass(frozen=True)
class AgentId:
    side: Side
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative agent index {self.index}")

    def __str__(self):
        return f"{self.side.value.lower()}{self.index + 1}"


@dataclass(frozen=True)
class Preference:
    """Strict ranking of opposite-side partners.

    ``ranked[:acceptable_count]`` are acceptable, best first. Anything after
    that (or missing from ``ranked``) is ranked below staying single.
    """

    ranked: tuple
    acceptable_count: int

    def __post_init__(self):
        ranked = tuple(int(j) for j in self.ranked)
        object.__setattr__(self, "ranked", ranked)
        if len(set(ranked)) != len(ranked):
            raise ValueError(f"duplicate partner in preference list {ranked}")
        if any(j < 0 for j in ranked):
            raise ValueError(f"negative partner index in {ranked}")
        if not 0 <= self.acceptable_count <= len(ranked):
            raise ValueError(
                f"acceptable_count {self.acceptable_count} outside [0, {len(ranked)}]"
            )

    @classmethod
    def full(cls, ranked: Iterable[int]) -> "Preference":
        ranked = tuple(ranked)
        return cls(ranked, len(ranked))

    @property
    def acceptable(self) -> tuple:
        return self.ranked[: self.acceptable_count]


def _rank_matrix(prefs: Sequence[Preference], n_other: int) -> np.ndarray:
    # acceptable partners get their position; outside option sits at
    # acceptable_count; unacceptable partners all get n_other + 1.
    rank = np.full((len(prefs), n_other), n_other + 1, dtype=np.int32)
    for i, p in enumerate(prefs):
        acc = p.acceptable
        if acc:
            rank[i, list(acc)] = np.arange(len(acc), dtype=np.int32)
    return rank


def _pref_matrix(prefs: Sequence[Preference], n_other: int) -> np.ndarray:
    out = np.full((len(prefs), n_other), -1, dtype=np.int32)
    for i, p in enumerate(prefs):
        acc = p.acceptable
        if acc:
            out[i, : len(acc)] = acc
    return out


@dataclass(frozen=True, eq=False)
class Market:
    """A two-sided market: doctors, hospitals and their strict preferences.

    Array views (rank matrices, padded preference matrices) are built lazily
    and cached; a market is never mutated after construction.
    """

    prefs_doctors: tuple
    prefs_hospitals: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefs_doctors", tuple(self.prefs_doctors))
        object.__setattr__(self, "prefs_hospitals", tuple(self.prefs_hospitals))
        nd, nh = len(self.prefs_doctors), len(self.prefs_hospitals)
        if nd < 2 or nh < 2:
            raise ValueError(f"a market needs at least 2 doctors and 2 hospitals, got {nd}x{nh}")
        for d, p in enumerate(self.prefs_doctors):
            if p.ranked and max(p.ranked) >= nh:
                raise DimensionError(f"doctor {d} ranks a hospital index >= {nh}")
        for h, p in enumerate(self.prefs_hospitals):
            if p.ranked and max(p.ranked) >= nd:
                raise DimensionError(f"hospital {h} ranks a doctor index >= {nd}")

    @property
    def n_doctors(self) -> int:
        return len(self.prefs_doctors)

    @property
    def n_hospitals(self) -> int:
        return len(self.prefs_hospitals)

    def __eq__(self, other):
        if not isinstance(other, Market):
            return NotImplemented
        return (
            self.prefs_doctors == other.prefs_doctors
            and self.prefs_hospitals == other.prefs_hospitals
        )

    def __hash__(self):
        return hash((self.prefs_doctors, self.prefs_hospitals))

    @cached_property
    def doctor_rank(self) -> np.ndarray:
        """``doctor_rank[d, h]``: position of h in d's list (n_hospitals + 1 if unacceptable)."""
        r = _rank_matrix(self.prefs_doctors, self.n_hospitals)
        r.setflags(write=False)
        return r

    @cached_property
    def hospital_rank(self) -> np.ndarray:
        r = _rank_matrix(self.prefs_hospitals, self.n_doctors)
        r.setflags(write=False)
        return r

    @cached_property
    def doctor_acceptable_count(self) -> np.ndarray:
        a = np.array([p.acceptable_count for p in self.prefs_doctors], dtype=np.int32)
        a.setflags(write=False)
        return a

    @cached_property
    def hospital_acceptable_count(self) -> np.ndarray:
        a = np.array([p.acceptable_count for p in self.prefs_hospitals], dtype=np.int32)
        a.setflags(write=False)
        return a

    @cached_property
    def doctor_pref_matrix(self) -> np.ndarray:
        m = _pref_matrix(self.prefs_doctors, self.n_hospitals)
        m.setflags(write=False)
        return m

    @cached_property
    def hospital_pref_matrix(self) -> np.ndarray:
        m = _pref_matrix(self.prefs_hospitals, self.n_doctors)
        m.setflags(write=False)
        return m

    def prefs(self, side: Side) -> tuple:
        return self.prefs_doctors if side is Side.DOCTOR else self.prefs_hospitals

    def size(self, side: Side) -> int:
        return self.n_doctors if side is Side.DOCTOR else self.n_hospitals

    def rank(self, agent: AgentId, partner: Optional[int]) -> int:
        """Rank of ``partner`` for ``agent``; ``None`` (single) ranks at the outside option."""
        if agent.side is Side.DOCTOR:
            table, acc = self.doctor_rank, self.doctor_acceptable_count
        else:
            table, acc = self.hospital_rank, self.hospital_acceptable_count
        if partner is None:
            return int(acc[agent.index])
        return int(table[agent.index, partner])

    def acceptable(self, agent: AgentId, partner: int) -> bool:
        return self.rank(agent, partner) < self.rank(agent, None)

    def mutually_acceptable(self, d: int, h: int) -> bool:
        return (
            self.doctor_rank[d, h] < self.doctor_acceptable_count[d]
            and self.hospital_rank[h, d] < self.hospital_acceptable_count[h]
        )

    # serialization

    def to_dict(self) -> dict:
        def enc(prefs):
            return [{"ranked": list(p.ranked), "acceptable_count": p.acceptable_count} for p in prefs]

        return {
            "n_doctors": self.n_doctors,
            "n_hospitals": self.n_hospitals,
            "prefs_doctors": enc(self.prefs_doctors),
            "prefs_hospitals": enc(self.prefs_hospitals),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Market":
        def dec(items):
            out = []
            for it in items:
                if isinstance(it, dict):
                    ranked = it["ranked"]
                    out.append(Preference(ranked, it.get("acceptable_count", len(ranked))))
                else:
                    out.append(Preference.full(it))
            return out

        market = cls(dec(data["prefs_doctors"]), dec(data["prefs_hospitals"]))
        for key, n in (("n_doctors", market.n_doctors), ("n_hospitals", market.n_hospitals)):
            if key in data and data[key] != n:
                raise DimensionError(f"{key}={data[key]} but {n} preference lists given")
        return market

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "Market":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_lists(cls, doctor_lists, hospital_lists) -> "Market":
        """Build a market where every listed partner is acceptable."""
        return cls(
            [Preference.full(r) for r in doctor_lists],
            [Preference.full(r) for r in hospital_lists],
        )


@dataclass(frozen=True)
class Arrangement:
    """Interview capacities: ``iota`` per hospital, ``kappa`` per doctor."""

    iota: tuple
    kappa: tuple

    def __post_init__(self):
        object.__setattr__(self, "iota", tuple(int(x) for x in self.iota))
        object.__setattr__(self, "kappa", tuple(int(x) for x in self.kappa))
        if any(x < 1 for x in self.iota + self.kappa):
            raise ValueError("interview capacities must be >= 1")

    @classmethod
    def homogeneous(cls, l: int, k: int, n_doctors: int, n_hospitals: int) -> "Arrangement":
        return cls((l,) * n_hospitals, (k,) * n_doctors)

    def check(self, market: Market) -> None:
        if len(self.iota) != market.n_hospitals or len(self.kappa) != market.n_doctors:
            raise DimensionError(
                f"arrangement is {len(self.kappa)}x{len(self.iota)} (doctors x hospitals), "
                f"market is {market.n_doctors}x{market.n_hospitals}"
            )

    def with_kappa(self, kappa) -> "Arrangement":
        return Arrangement(self.iota, kappa)


@dataclass(frozen=True)
class InterviewMatching:
    """Many-to-many interview assignment; both directions are stored."""

    of_doctor: tuple
    of_hospital: tuple

    def __post_init__(self):
        object.__setattr__(self, "of_doctor", tuple(frozenset(s) for s in self.of_doctor))
        object.__setattr__(self, "of_hospital", tuple(frozenset(s) for s in self.of_hospital))
        for d, hs in enumerate(self.of_doctor):
            for h in hs:
                if not 0 <= h < len(self.of_hospital) or d not in self.of_hospital[h]:
                    raise ValueError(f"interview ({d}, {h}) is not mutual")
        n = sum(len(s) for s in self.of_doctor)
        if n != sum(len(s) for s in self.of_hospital):
            raise ValueError("interview matching is not mutual")

    @classmethod
    def from_pairs(cls, pairs: Iterable, n_doctors: int, n_hospitals: int) -> "InterviewMatching":
        od = [set() for _ in range(n_doctors)]
        oh = [set() for _ in range(n_hospitals)]
        for d, h in pairs:
            od[d].add(h)
            oh[h].add(d)
        return cls(od, oh)

    @classmethod
    def from_doctor_sets(cls, sets: Sequence, n_hospitals: int) -> "InterviewMatching":
        return cls.from_pairs(((d, h) for d, hs in enumerate(sets) for h in hs), len(sets), n_hospitals)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "InterviewMatching":
        """From a boolean (n_doctors, n_hospitals) interview matrix."""
        ds, hs = np.nonzero(mask)
        return cls.from_pairs(zip(ds.tolist(), hs.tolist()), mask.shape[0], mask.shape[1])

    @property
    def n_doctors(self) -> int:
        return len(self.of_doctor)

    @property
    def n_hospitals(self) -> int:
        return len(self.of_hospital)

    def pairs(self) -> list:
        return sorted((d, h) for d, hs in enumerate(self.of_doctor) for h in hs)

    def to_mask(self) -> np.ndarray:
        mask = np.zeros((self.n_doctors, self.n_hospitals), dtype=bool)
        for d, h in self.pairs():
            mask[d, h] = True
        return mask

    def check(self, market: Market, arrangement: Optional[Arrangement] = None) -> None:
        if self.n_doctors != market.n_doctors or self.n_hospitals != market.n_hospitals:
            raise DimensionError(
                f"interview matching is {self.n_doctors}x{self.n_hospitals}, "
                f"market is {market.n_doctors}x{market.n_hospitals}"
            )
        for d, h in self.pairs():
            if not market.mutually_acceptable(d, h):
                raise ValueError(f"interview ({d}, {h}) is not mutually acceptable")
        if arrangement is not None:
            arrangement.check(market)
            for d, hs in enumerate(self.of_doctor):
                if len(hs) > arrangement.kappa[d]:
                    raise ValueError(f"doctor {d} exceeds interview capacity")
            for h, ds in enumerate(self.of_hospital):
                if len(ds) > arrangement.iota[h]:
                    raise ValueError(f"hospital {h} exceeds interview capacity")


@dataclass(frozen=True)
class Matching:
    """One-to-one matching; ``None`` means unmatched."""

    of_doctor: tuple
    of_hospital: tuple

    def __post_init__(self):
        object.__setattr__(self, "of_doctor", tuple(None if h is None else int(h) for h in self.of_doctor))
        object.__setattr__(self, "of_hospital", tuple(None if d is None else int(d) for d in self.of_hospital))
        for d, h in enumerate(self.of_doctor):
            if h is not None and (not 0 <= h < len(self.of_hospital) or self.of_hospital[h] != d):
                raise ValueError(f"matching is not mutual at doctor {d}")
        for h, d in enumerate(self.of_hospital):
            if d is not None and (not 0 <= d < len(self.of_doctor) or self.of_doctor[d] != h):
                raise ValueError(f"matching is not mutual at hospital {h}")

    @classmethod
    def from_pairs(cls, pairs: Iterable, n_doctors: int, n_hospitals: int) -> "Matching":
        od = [None] * n_doctors
        oh = [None] * n_hospitals
        for d, h in pairs:
            if od[d] is not None or oh[h] is not None:
                raise ValueError(f"agent matched twice at pair ({d}, {h})")
            od[d], oh[h] = h, d
        return cls(od, oh)

    @classmethod
    def from_doctor_array(cls, arr, n_hospitals: int) -> "Matching":
        """From an int array of hospital indices per doctor, -1 for unmatched."""
        arr = np.asarray(arr).tolist()
        return cls.from_pairs(((d, h) for d, h in enumerate(arr) if h >= 0), len(arr), n_hospitals)

    @classmethod
    def empty(cls, n_doctors: int, n_hospitals: int) -> "Matching":
        return cls((None,) * n_doctors, (None,) * n_hospitals)

    @property
    def n_doctors(self) -> int:
        return len(self.of_doctor)

    @property
    def n_hospitals(self) -> int:
        return len(self.of_hospital)

    def pairs(self) -> list:
        return [(d, h) for d, h in enumerate(self.of_doctor) if h is not None]

    def partner(self, agent: AgentId) -> Optional[int]:
        side = self.of_doctor if agent.side is Side.DOCTOR else self.of_hospital
        return side[agent.index]

    def doctor_array(self) -> np.ndarray:
        return np.array([-1 if h is None else h for h in self.of_doctor], dtype=np.int64)

    def check(self, market: Market) -> None:
        if self.n_doctors != market.n_doctors or self.n_hospitals != market.n_hospitals:
            raise DimensionError(
                f"matching is {self.n_doctors}x{self.n_hospitals}, "
                f"market is {market.n_doctors}x{market.n_hospitals}"
            )
        for d, h in self.pairs():
            if not market.mutually_acceptable(d, h):
                raise ValueError(f"matched pair ({d}, {h}) is not mutually acceptable")

    def to_records(self) -> list:
        """``[[doctor, hospital_or_None], ...]`` for JSON export."""
        return [[d, h] for d, h in enumerate(self.of_doctor)]


def restrict_profile(market: Market, nu: InterviewMatching) -> Market:
    """Keep only interviewed, acceptable partners in each agent's list."""
    if nu.n_doctors != market.n_doctors or nu.n_hospitals != market.n_hospitals:
        raise DimensionError(
            f"interview matching is {nu.n_doctors}x{nu.n_hospitals}, "
            f"market is {market.n_doctors}x{market.n_hospitals}"
        )

    def keep(prefs, sets):
        out = []
        for p, allowed in zip(prefs, sets):
            kept = tuple(j for j in p.acceptable if j in allowed)
            out.append(Preference(kept, len(kept)))
        return out

    return Market(keep(market.prefs_doctors, nu.of_doctor), keep(market.prefs_hospitals, nu.of_hospital))


def compare_welfare(mu_a: Matching, mu_b: Matching, market: Market, side: Side) -> tuple:
    """Count agents on ``side`` preferring ``mu_a``, preferring ``mu_b``, or indifferent."""
    mu_a.check(market)
    mu_b.check(market)
    prefers_a = prefers_b = same = 0
    for i in range(market.size(side)):
        agent = AgentId(side, i)
        ra = market.rank(agent, mu_a.partner(agent))
        rb = market.rank(agent, mu_b.partner(agent))
        if ra < rb:
            prefers_a += 1
        elif rb < ra:
            prefers_b += 1
        else:
            same += 1
    return prefers_a, prefers_b, same


def compare_welfare_arrays(match_a: np.ndarray, match_b: np.ndarray, rank: np.ndarray, acc: np.ndarray) -> tuple:
    """Vectorised :func:`compare_welfare` on partner arrays (-1 = unmatched).

    ``rank``/``acc`` are the rank matrix and acceptable counts of the side
    being compared.
    """
    idx = np.arange(len(match_a))
    ra = np.where(match_a >= 0, rank[idx, np.maximum(match_a, 0)], acc)
    rb = np.where(match_b >= 0, rank[idx, np.maximum(match_b, 0)], acc)
    return int((ra < rb).sum()), int((rb < ra).sum()), int((ra == rb).sum())
