"""Threshold detectors with dark counts and two-fold coincidence events.

Detector ``m`` (1..4) watches output mode ``m``: 1 = a_H, 2 = a_V, 3 = b_H,
4 = b_V.  Detection efficiency is folded into the channel, so a detector
clicks with certainty when it receives light and with probability ``d``
otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import DomainError

N_MODES = 4

Occupation = tuple[int, int, int, int]
FockAmplitudeMap = Mapping[Occupation, float]


@dataclass(frozen=True, order=True)
class EventPair:
    """Detectors ``i`` and ``j`` click while the other two stay silent."""

    i: int
    j: int

    def __post_init__(self):
        if not (1 <= self.i < self.j <= N_MODES):
            raise DomainError(f"event needs 1 <= i < j <= 4, got ({self.i}, {self.j})")

    def __str__(self) -> str:
        return f"({self.i},{self.j})"

    @property
    def modes(self) -> tuple[int, int]:
        """Zero-based mode indices."""
        return self.i - 1, self.j - 1

    @property
    def is_success(self) -> bool:
        return self in SUCCESS_EVENTS


E12, E34, E14, E23 = EventPair(1, 2), EventPair(3, 4), EventPair(1, 4), EventPair(2, 3)
SUCCESS_EVENTS: tuple[EventPair, ...] = (E12, E34, E14, E23)
ALL_EVENTS: tuple[EventPair, ...] = tuple(
    EventPair(i, j) for i, j in itertools.combinations(range(1, N_MODES + 1), 2))


def check_dark_rate(d: float) -> None:
    if not 0.0 <= d < 1.0:
        raise DomainError(f"dark count rate must lie in [0, 1), got {d}")


def event_prob_given_occupation(l_i: int, l_j: int, d: float) -> float:
    """Probability of event (i, j) when modes i, j hold ``l_i``, ``l_j`` photons
    and every other mode is empty."""
    if l_i < 0 or l_j < 0:
        raise DomainError(f"photon numbers must be >= 0, got ({l_i}, {l_j})")
    quiet = (1.0 - d) ** 2
    if l_i > 0 and l_j > 0:
        return quiet
    if l_i > 0 or l_j > 0:
        return d * quiet
    return d * d * quiet


def event_prob_given_output_state(event: EventPair, state: FockAmplitudeMap,
                                  d: float, norm_tol: float = 1e-10) -> float:
    """Probability of ``event`` for a pure four-mode output state.

    Only components whose photons all sit in modes i and j contribute; each
    contributes its weight ``|<l_i l_j|psi>|^2`` times the single-occupation
    probability.
    """
    check_dark_rate(d)
    norm = math.fsum(abs(a) ** 2 for a in state.values())
    if abs(norm - 1.0) > norm_tol:
        raise DomainError(f"output state is not normalized (norm {norm:.12g})")
    mi, mj = event.modes
    total = 0.0
    for occ, amp in state.items():
        if any(occ[m] for m in range(N_MODES) if m not in (mi, mj)):
            continue
        total += abs(amp) ** 2 * event_prob_given_occupation(occ[mi], occ[mj], d)
    return total
