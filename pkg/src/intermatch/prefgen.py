"""Random-utility market generator.

Each agent has a common quality ``xC`` and a fit location ``xF``, both
uniform on [0, 1). A doctor's utility for a hospital is::

    beta * xC_h - gamma * (xF_h - xF_d) ** 2 + eps_dh

and symmetrically for hospitals, with ``eps`` i.i.d. standard logistic.

Random numbers come from numpy's PCG64 bit generator seeded through
``SeedSequence(seed)``; replication ``r`` of master seed ``s`` uses the
64-bit seed ``SeedSequence(s, spawn_key=(r,)).generate_state(1, uint64)``.
Draw order is fixed: doctor xC, doctor xF, hospital xC, hospital xF, then
the (doctors x hospitals) doctor noise and the (hospitals x doctors)
hospital noise. Logistic noise uses the inverse CDF ``log(u / (1 - u))``
with ``u = (j + 0.5) / 2**53`` for a uniform 53-bit integer ``j``, so ``u``
is never 0 or 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import Market, Preference

DEFAULT_SEED = 20201


@dataclass(frozen=True)
class GenParams:
    beta: float = 40.0
    gamma: float = 20.0
    n_doctors: int = 470
    n_hospitals: int = 400
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_doctors < 2 or self.n_hospitals < 2:
            raise ValueError("need at least 2 doctors and 2 hospitals")
        if self.beta < 0 or self.gamma < 0:
            raise ValueError("beta and gamma must be non-negative")


@dataclass(frozen=True, eq=False)
class LatentDraw:
    xc_doctors: np.ndarray
    xf_doctors: np.ndarray
    xc_hospitals: np.ndarray
    xf_hospitals: np.ndarray
    eps_doctors: np.ndarray  # (n_doctors, n_hospitals)
    eps_hospitals: np.ndarray  # (n_hospitals, n_doctors)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["side", "index", "xC", "xF"])
        for side, xc, xf in (("D", self.xc_doctors, self.xf_doctors), ("H", self.xc_hospitals, self.xf_hospitals)):
            for i, (c, f) in enumerate(zip(xc.tolist(), xf.tolist())):
                w.writerow([side, i, repr(c), repr(f)])
        return buf.getvalue()


def replication_seed(master_seed: int, replication: int) -> int:
    """Stable per-replication seed derived from a master seed."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(replication,))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def standard_logistic(rng: np.random.Generator, size) -> np.ndarray:
    u = (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) / 2.0**53
    return np.log(u / (1.0 - u))


def draw_latents(params: GenParams, rng: np.random.Generator) -> LatentDraw:
    nd, nh = params.n_doctors, params.n_hospitals
    xc_d = rng.random(nd)
    xf_d = rng.random(nd)
    xc_h = rng.random(nh)
    xf_h = rng.random(nh)
    eps_d = standard_logistic(rng, (nd, nh))
    eps_h = standard_logistic(rng, (nh, nd))
    return LatentDraw(xc_d, xf_d, xc_h, xf_h, eps_d, eps_h)


def utilities(params: GenParams, latent: LatentDraw) -> tuple:
    """``(u_doctors, u_hospitals)``: doctor-by-hospital and hospital-by-doctor utility matrices."""
    fit = (latent.xf_hospitals[None, :] - latent.xf_doctors[:, None]) ** 2  # (nd, nh)
    u_d = params.beta * latent.xc_hospitals[None, :] - params.gamma * fit + latent.eps_doctors
    u_h = params.beta * latent.xc_doctors[None, :] - params.gamma * fit.T + latent.eps_hospitals
    return u_d, u_h


def _ranking(u: np.ndarray) -> np.ndarray:
    # descending utility; stable sort keeps ties in ascending partner index
    return np.argsort(-u, axis=1, kind="stable").astype(np.int32)


def market_from_utilities(u_doctors: np.ndarray, u_hospitals: np.ndarray) -> Market:
    """Market where everyone is acceptable and lists follow descending utility."""
    doc_lists = _ranking(u_doctors)
    hosp_lists = _ranking(u_hospitals)
    market = Market(
        [Preference(tuple(r), len(r)) for r in doc_lists.tolist()],
        [Preference(tuple(r), len(r)) for r in hosp_lists.tolist()],
    )
    # seed the cached array views; cheaper than rebuilding them from tuples
    nd, nh = doc_lists.shape
    doc_rank = np.empty((nd, nh), dtype=np.int32)
    np.put_along_axis(doc_rank, doc_lists, np.arange(nh, dtype=np.int32)[None, :].repeat(nd, 0), axis=1)
    hosp_rank = np.empty((nh, nd), dtype=np.int32)
    np.put_along_axis(hosp_rank, hosp_lists, np.arange(nd, dtype=np.int32)[None, :].repeat(nh, 0), axis=1)
    for name, arr in (
        ("doctor_pref_matrix", doc_lists),
        ("hospital_pref_matrix", hosp_lists),
        ("doctor_rank", doc_rank),
        ("hospital_rank", hosp_rank),
        ("doctor_acceptable_count", np.full(nd, nh, dtype=np.int32)),
        ("hospital_acceptable_count", np.full(nh, nd, dtype=np.int32)),
    ):
        arr.setflags(write=False)
        market.__dict__[name] = arr
    return market


def sample_market(params: GenParams) -> tuple:
    """Draw one market; returns ``(market, latent_draw)``."""
    rng = make_rng(params.seed)
    latent = draw_latents(params, rng)
    return market_from_utilities(*utilities(params, latent)), latent


def sample_replication(params: GenParams, replication: int) -> tuple:
    """Market for replication ``replication`` of the master seed ``params.seed``."""
    sub = GenParams(params.beta, params.gamma, params.n_doctors, params.n_hospitals,
                    replication_seed(params.seed, replication))
    return sample_market(sub)
