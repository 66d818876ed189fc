"""Interview-then-match two-sided market engine and experiment harness."""

from .choice import choose
from .core import (
    AgentId,
    Arrangement,
    DimensionError,
    InterviewMatching,
    Market,
    Matching,
    Preference,
    Side,
    compare_welfare,
    restrict_profile,
)
from .engines import RoundLog, doctor_da, interview_da, two_step
from .estimator import TwoStepMatcher
from .prefgen import GenParams, LatentDraw, sample_market, sample_replication
from .stability import BlockReport, blocking_pairs, is_adequate, match_rate, stable_set_bruteforce

__version__ = "0.1.0"

__all__ = [
    "AgentId",
    "Arrangement",
    "BlockReport",
    "DimensionError",
    "GenParams",
    "InterviewMatching",
    "LatentDraw",
    "Market",
    "Matching",
    "Preference",
    "RoundLog",
    "Side",
    "TwoStepMatcher",
    "blocking_pairs",
    "choose",
    "compare_welfare",
    "doctor_da",
    "interview_da",
    "is_adequate",
    "match_rate",
    "restrict_profile",
    "sample_market",
    "sample_replication",
    "stable_set_bruteforce",
    "two_step",
]
