"""scikit-learn style front end for the interview-then-match pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import InterviewMatching, Matching, restrict_profile
from .engines import doctor_da, interview_da, two_step_arrays
from .stability import blocking_count, blocking_pairs
from .validation import check_arrangement, check_market


class TwoStepMatcher(BaseEstimator):
    """Interview stage (hospital-proposing DA) followed by doctor-proposing DA.

    Parameters
    ----------
    l, k : int
        Homogeneous interview caps for hospitals and doctors.
    iota, kappa : sequence of int, optional
        Per-agent caps; override ``l``/``k`` when given.
    method : {"auto", "fast", "reference"}
        ``"reference"`` runs the synchronous-round engines; the others run
        the compiled kernels.

    Attributes
    ----------
    arrangement_ : Arrangement
    interview_mask_ : ndarray of shape (n_doctors, n_hospitals)
    matching_ : Matching
    n_blocking_pairs_ : int
        Blocking pairs of ``matching_`` under the full (unrestricted) preferences.
    match_rate_ : float
    """

    def __init__(self, l=1, k=1, iota=None, kappa=None, method="auto"):
        self.l = l
        self.k = k
        self.iota = iota
        self.kappa = kappa
        self.method = method

    def fit(self, market, y=None):
        market = check_market(market)
        self.arrangement_ = check_arrangement(market, self.l, self.k, self.iota, self.kappa)
        if self.method == "reference":
            nu = interview_da(market, self.arrangement_, method="reference")
            mu = doctor_da(restrict_profile(market, nu), method="reference")
            self.interview_mask_ = nu.to_mask()
            match_d = mu.doctor_array()
        elif self.method in ("auto", "fast"):
            self.interview_mask_, match_d = two_step_arrays(
                market, self.arrangement_.iota, self.arrangement_.kappa
            )
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.doctor_assignment_ = np.asarray(match_d, dtype=np.int64)
        self.matching_ = Matching.from_doctor_array(self.doctor_assignment_, market.n_hospitals)
        self.n_blocking_pairs_ = blocking_count(self.doctor_assignment_, market)
        self.match_rate_ = float((self.doctor_assignment_ >= 0).sum()) / market.n_hospitals
        self.market_ = market
        return self

    @property
    def interview_matching_(self) -> InterviewMatching:
        check_is_fitted(self, "interview_mask_")
        return InterviewMatching.from_mask(self.interview_mask_)

    @property
    def hospital_assignment_(self) -> np.ndarray:
        check_is_fitted(self, "doctor_assignment_")
        out = np.full(self.market_.n_hospitals, -1, dtype=np.int64)
        matched = np.nonzero(self.doctor_assignment_ >= 0)[0]
        out[self.doctor_assignment_[matched]] = matched
        return out

    @property
    def interview_counts_(self) -> np.ndarray:
        """Number of interviews per doctor."""
        check_is_fitted(self, "interview_mask_")
        return self.interview_mask_.sum(axis=1)

    def predict(self, market=None):
        """Hospital index per doctor (-1 if unmatched).

        With ``market`` given, the pipeline is re-run on it with the same
        parameters.
        """
        if market is not None:
            return self.fit(market).doctor_assignment_
        check_is_fitted(self, "doctor_assignment_")
        return self.doctor_assignment_

    def fit_predict(self, market, y=None):
        return self.fit(market).doctor_assignment_

    def score(self, market, y=None) -> float:
        """Match rate of the pipeline on ``market``."""
        return self.fit(market).match_rate_

    def blocking_report(self):
        check_is_fitted(self, "matching_")
        return blocking_pairs(self.matching_, self.market_)

    def is_adequate(self) -> bool:
        check_is_fitted(self, "n_blocking_pairs_")
        return self.n_blocking_pairs_ == 0
