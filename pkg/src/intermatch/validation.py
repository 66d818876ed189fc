"""Input coercion and checks shared by the estimator and the CLI."""

from __future__ import annotations

import json
import os
from numbers import Integral

from .core import Arrangement, Market


def check_market(market) -> Market:
    """Accept a Market, a dict in the market JSON schema, a JSON string or a path to a JSON file."""
    if isinstance(market, Market):
        return market
    if isinstance(market, dict):
        return Market.from_dict(market)
    if isinstance(market, (str, os.PathLike)):
        text = str(market)
        if not text.lstrip().startswith("{"):
            with open(market, encoding="utf-8") as fh:
                text = fh.read()
        return Market.from_dict(json.loads(text))
    raise TypeError(f"expected a Market, dict, JSON text or path, got {type(market).__name__}")


def check_capacity(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_arrangement(market: Market, l=None, k=None, iota=None, kappa=None) -> Arrangement:
    """Build the arrangement for ``market`` from homogeneous caps and/or explicit vectors.

    Explicit ``iota``/``kappa`` vectors take precedence over ``l``/``k``.
    """
    if iota is None:
        if l is None:
            raise ValueError("either l or iota must be given")
        iota = (check_capacity(l, "l"),) * market.n_hospitals
    if kappa is None:
        if k is None:
            raise ValueError("either k or kappa must be given")
        kappa = (check_capacity(k, "k"),) * market.n_doctors
    arrangement = Arrangement(iota, kappa)
    arrangement.check(market)
    return arrangement
