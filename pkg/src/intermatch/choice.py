"""Responsive, capacity-constrained choice over sets of partners."""

from __future__ import annotations

from typing import Iterable

from .core import AgentId, Market


def choose(agent: AgentId, offered: Iterable[int], market: Market, capacity: int) -> frozenset:
    """Return the ``capacity`` best acceptable partners among ``offered``.

    Unacceptable offers are always dropped. If no more than ``capacity``
    acceptable partners are offered, all of them are kept.
    """
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    outside = market.rank(agent, None)
    acceptable = [j for j in set(offered) if market.rank(agent, j) < outside]
    if len(acceptable) <= capacity:
        return frozenset(acceptable)
    acceptable.sort(key=lambda j: market.rank(agent, j))
    return frozenset(acceptable[:capacity])
