"""Brute-force Fock-space reference for the beam-splitter event probabilities.

The input ``(a_alpha^†)^k1 (b_beta^†)^k2 |0> / sqrt(k1! k2!)`` is expanded as a
polynomial in the four output creation operators and turned into Fock
amplitudes term by term.  Nothing here reuses the closed forms of
:mod:`mdisim.conditionals`; agreement between the two is the test.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .conditionals import Polarization
from .detectors import EventPair, FockAmplitudeMap, Occupation, \
    event_prob_given_output_state
from .errors import CapacityError, DomainError

ORACLE_CEILING = 8

_S = 1.0 / math.sqrt(2.0)

# polarization -> components on (H, V)
_POL = {
    Polarization.H: {0: 1.0},
    Polarization.V: {1: 1.0},
    Polarization.PLUS: {0: _S, 1: _S},
    Polarization.MINUS: {0: _S, 1: -_S},
}


def _output_form(port: str, pol: Polarization) -> dict[int, float]:
    """Creation operator of an input photon as a combination of output modes.

    Output modes: 0 = a_H, 1 = a_V, 2 = b_H, 3 = b_V.
    """
    sign_b = 1.0 if port == "a" else -1.0
    form: dict[int, float] = defaultdict(float)
    for p, c in _POL[pol].items():
        form[p] += c * _S
        form[2 + p] += c * _S * sign_b
    return dict(form)


def _multiply(poly: dict[Occupation, float], form: dict[int, float]) -> dict[Occupation, float]:
    out: dict[Occupation, float] = defaultdict(float)
    for occ, c in poly.items():
        for m, fc in form.items():
            n = list(occ)
            n[m] += 1
            out[tuple(n)] += c * fc
    return dict(out)


def expand_output_state(k1: int, k2: int, alpha: Polarization, beta: Polarization,
                        ceiling: int = ORACLE_CEILING) -> FockAmplitudeMap:
    """Fock amplitudes of the beam-splitter output for ``|k1>_alpha |k2>_beta``."""
    if k1 < 0 or k2 < 0:
        raise DomainError(f"photon numbers must be >= 0, got ({k1}, {k2})")
    if k1 + k2 > ceiling:
        raise CapacityError(f"{k1 + k2} photons exceed the oracle ceiling of {ceiling}")
    poly: dict[Occupation, float] = {(0, 0, 0, 0): 1.0}
    for _ in range(k1):
        poly = _multiply(poly, _output_form("a", alpha))
    for _ in range(k2):
        poly = _multiply(poly, _output_form("b", beta))
    norm_in = math.sqrt(math.factorial(k1) * math.factorial(k2))
    state = {}
    for occ, c in poly.items():
        amp = c * math.sqrt(math.prod(math.factorial(n) for n in occ)) / norm_in
        if amp != 0.0:
            state[occ] = amp
    return state


def oracle_event_prob(event: EventPair, k1: int, k2: int, alpha: Polarization,
                      beta: Polarization, d: float,
                      ceiling: int = ORACLE_CEILING) -> float:
    return event_prob_given_output_state(
        event, expand_output_state(k1, k2, alpha, beta, ceiling), d)
