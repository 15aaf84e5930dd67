import itertools
import math

import pytest

from mdisim.conditionals import MINUS, ORIENTATIONS, PLUS, H, V, p_event
from mdisim.detectors import SUCCESS_EVENTS
from mdisim.errors import CapacityError, DomainError
from mdisim.oracle import ORACLE_CEILING, expand_output_state, oracle_event_prob

S = 1 / math.sqrt(2)


def test_single_h_photon_splits():
    state = expand_output_state(1, 0, H, H)
    assert state == pytest.approx({(1, 0, 0, 0): S, (0, 0, 1, 0): S})


def test_bob_port_carries_minus_sign():
    state = expand_output_state(0, 1, V, V)
    assert state == pytest.approx({(0, 1, 0, 0): S, (0, 0, 0, 1): -S})


def test_hom_cancels_coincidences():
    state = expand_output_state(1, 1, H, H)
    assert state.get((1, 0, 1, 0), 0.0) == pytest.approx(0.0, abs=1e-15)
    assert abs(state[(2, 0, 0, 0)]) == pytest.approx(S)
    assert abs(state[(0, 0, 2, 0)]) == pytest.approx(S)


def test_vacuum():
    assert expand_output_state(0, 0, PLUS, MINUS) == {(0, 0, 0, 0): 1.0}


@pytest.mark.parametrize("orient", ORIENTATIONS, ids=lambda o: f"{o[0]}{o[1]}")
@pytest.mark.parametrize("k1, k2", [(0, 1), (2, 1), (3, 3), (4, 4)])
def test_normalized_and_number_conserving(orient, k1, k2):
    state = expand_output_state(k1, k2, *orient)
    assert math.fsum(a * a for a in state.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(sum(occ) == k1 + k2 for occ in state)


def test_capacity():
    expand_output_state(4, 4, PLUS, PLUS)
    with pytest.raises(CapacityError):
        expand_output_state(5, 4, PLUS, PLUS)
    with pytest.raises(CapacityError):
        oracle_event_prob(SUCCESS_EVENTS[0], 9, 0, H, H, 0.0)
    with pytest.raises(DomainError):
        expand_output_state(-1, 0, H, H)
    assert ORACLE_CEILING == 8


@pytest.mark.parametrize("d", [0.0, 1e-3, 0.05])
def test_closed_forms_agree(d):
    worst = 0.0
    for (alpha, beta), event in itertools.product(ORIENTATIONS, SUCCESS_EVENTS):
        for k1, k2 in itertools.product(range(4), repeat=2):
            worst = max(worst, abs(p_event(event, k1, k2, alpha, beta, d)
                                   - oracle_event_prob(event, k1, k2, alpha, beta, d)))
    assert worst <= 1e-12
