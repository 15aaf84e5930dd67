"""Closed-form event probabilities behind the relay's 50:50 beam splitter.

``p(event | k1, k2, alpha, beta)`` is the probability of a two-fold success
event when ``k1`` photons of polarization ``alpha`` enter port ``a`` and ``k2``
photons of polarization ``beta`` enter port ``b``.  The beam splitter maps
``a^† -> (a^† + b^†)/√2`` and ``b^† -> (a^† - b^†)/√2``.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .detectors import E12, E14, E23, E34, SUCCESS_EVENTS, EventPair, check_dark_rate, \
    event_prob_given_occupation
from .errors import DomainError


class Polarization(enum.Enum):
    H = "H"
    V = "V"
    PLUS = "+"
    MINUS = "-"

    @property
    def basis(self) -> str:
        return "Z" if self in (Polarization.H, Polarization.V) else "X"

    def __str__(self) -> str:
        return self.value


H, V, PLUS, MINUS = Polarization.H, Polarization.V, Polarization.PLUS, Polarization.MINUS

Z_ORIENTATIONS = ((H, V), (V, H), (H, H), (V, V))
X_ORIENTATIONS = ((PLUS, MINUS), (MINUS, PLUS), (PLUS, PLUS), (MINUS, MINUS))
ORIENTATIONS = Z_ORIENTATIONS + X_ORIENTATIONS

# H <-> V relabelling of detectors: 1 <-> 2, 3 <-> 4
_HV_MIRROR = {E12: E12, E34: E34, E14: E23, E23: E14}


def _check(event: EventPair, k1: int, k2: int, d: float) -> None:
    if event not in SUCCESS_EVENTS:
        raise DomainError(f"{event} is not a success event")
    if k1 < 0 or k2 < 0:
        raise DomainError(f"photon numbers must be >= 0, got ({k1}, {k2})")
    check_dark_rate(d)


def p_event_z_orthogonal(event: EventPair, k1: int, k2: int, d: float,
                         orientation: str = "HV") -> float:
    """Orthogonal Z-basis inputs: no interference, each photon picks a port."""
    _check(event, k1, k2, d)
    if orientation == "VH":
        k1, k2 = k2, k1
    elif orientation != "HV":
        raise DomainError(f"orthogonal Z orientation must be HV or VH, got {orientation!r}")
    # (2,3) sees Bob's photons in mode 2 and Alice's in mode 3
    l_i, l_j = (k2, k1) if event == E23 else (k1, k2)
    return 0.5 ** (k1 + k2) * event_prob_given_occupation(l_i, l_j, d)


def p_event_z_parallel(event: EventPair, k1: int, k2: int, d: float,
                       orientation: str = "HH") -> float:
    """Parallel Z-basis inputs: only fully bunched outputs stay inside an event's modes."""
    _check(event, k1, k2, d)
    if orientation == "VV":
        event = _HV_MIRROR[event]
    elif orientation != "HH":
        raise DomainError(f"parallel Z orientation must be HH or VV, got {orientation!r}")
    k = k1 + k2
    weight = math.comb(k, k1) * 0.5 ** k
    if event in (E12, E34):
        return weight * event_prob_given_occupation(k, 0, d)
    return weight * event_prob_given_occupation(0, k, d)


@lru_cache(maxsize=None)
def _x_weights(k1: int, k2: int, signed: bool) -> tuple[float, ...]:
    """Weights ``|<l, k-l|psi>|^2`` for ``l = 0..k`` in the two event modes.

    The inner sum runs over the support ``max(0, l-k2) <= s <= min(l, k1)``
    and is an integer, so each weight is an exact rational.
    """
    k = k1 + k2
    denom = 4 ** k * math.factorial(k1) * math.factorial(k2)
    out = []
    for l in range(k + 1):
        inner = sum(math.comb(k1, s) * math.comb(k2, l - s) * ((-1) ** (l - s) if signed else 1)
                    for s in range(max(0, l - k2), min(l, k1) + 1))
        out.append(float(Fraction(math.factorial(l) * math.factorial(k - l) * inner * inner,
                                  denom)))
    return tuple(out)


def p_event_x(event: EventPair, k1: int, k2: int, d: float,
              orientation: str = "+-") -> float:
    """X-basis inputs, where two-photon interference matters.

    For ``+-`` (and ``-+``) the amplitudes in events (1,2), (3,4) carry
    alternating signs; for ``++`` (and ``--``) the signs sit on (1,4), (2,3).
    """
    _check(event, k1, k2, d)
    if orientation in ("+-", "-+"):
        signed = event in (E12, E34)
    elif orientation in ("++", "--"):
        signed = event in (E14, E23)
    else:
        raise DomainError(f"X orientation must be one of +-, -+, ++, --, got {orientation!r}")
    k = k1 + k2
    weights = _x_weights(k1, k2, signed)
    return math.fsum(w * event_prob_given_occupation(l, k - l, d)
                     for l, w in enumerate(weights))


def p_event(event: EventPair, k1: int, k2: int, alpha: Polarization,
            beta: Polarization, d: float) -> float:
    """Dispatch on the polarization pair."""
    orientation = f"{alpha}{beta}"
    if alpha.basis != beta.basis:
        raise DomainError(f"mixed-basis input {orientation} is not a sifted event")
    if alpha.basis == "X":
        return p_event_x(event, k1, k2, d, orientation)
    if alpha == beta:
        return p_event_z_parallel(event, k1, k2, d, orientation)
    return p_event_z_orthogonal(event, k1, k2, d, orientation)


@lru_cache(maxsize=4096)
def event_kernel(event: EventPair, alpha: Polarization, beta: Polarization,
                 d: float, cutoff_a: int, cutoff_b: int) -> np.ndarray:
    """Read-only table ``K[k1, k2] = p(event | k1, k2, alpha, beta)``."""
    kern = np.empty((cutoff_a + 1, cutoff_b + 1))
    for k1 in range(cutoff_a + 1):
        for k2 in range(cutoff_b + 1):
            kern[k1, k2] = p_event(event, k1, k2, alpha, beta, d)
    kern.flags.writeable = False
    return kern
