"""Small hand-built markets with known outcomes."""

from .core import Arrangement, InterviewMatching, Market, Matching

# 4x4 market where letting d1 accept a second interview destabilises the match.
HOARDING_DOCTOR_LISTS = [
    (0, 1, 3, 2),
    (1, 2, 0, 3),
    (1, 0, 2, 3),
    (0, 1, 2, 3),
]
HOARDING_HOSPITAL_LISTS = [
    (0, 1, 2, 3),
    (0, 1, 3, 2),
    (1, 0, 2, 3),
    (0, 3, 2, 1),
]
HOARDING_IOTA = (1, 1, 2, 2)
HOARDING_KAPPA_BEFORE = (1, 2, 1, 1)
HOARDING_KAPPA_AFTER = (2, 2, 1, 1)


def hoarding_market() -> Market:
    return Market.from_lists(HOARDING_DOCTOR_LISTS, HOARDING_HOSPITAL_LISTS)


def hoarding_arrangements() -> tuple:
    return (
        Arrangement(HOARDING_IOTA, HOARDING_KAPPA_BEFORE),
        Arrangement(HOARDING_IOTA, HOARDING_KAPPA_AFTER),
    )


def hoarding_expected() -> dict:
    """Interview schedules and final matchings before and after the capacity change."""
    return {
        "nu_before": InterviewMatching.from_doctor_sets([{0}, {1, 2}, {2}, {3}], 4),
        "nu_after": InterviewMatching.from_doctor_sets([{0, 1}, {2, 3}, {2}, {3}], 4),
        "mu_before": Matching.from_pairs([(0, 0), (1, 1), (2, 2), (3, 3)], 4, 4),
        "mu_after": Matching.from_pairs([(0, 0), (1, 2), (3, 3)], 4, 4),
    }
