"""Three-intensity decoy-state bounds and the asymptotic key rate.

Each side prepares vacuum, a decoy ``mu`` and a signal ``mu'``.  From the
nine observable gains per basis we lower-bound the yield ``Y11`` of
single-photon pairs and upper-bound their phase-flip error ``e11``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .channel import ChannelParams, apply_loss
from .errors import DomainError, IllConditionedError, UndefinedBoundError
from .gains import BasisStatistics, SourcePairContext, basis_statistics
from .sources import (DEFAULT_CUTOFF, DEFAULT_TAIL_TOL, PhotonNumberDistribution, SourceSpec,
                      fock_distribution, vacuum_distribution)

VAC, DECOY, SIGNAL = "0", "mu", "mu'"
INTENSITIES = (VAC, DECOY, SIGNAL)
BASES = ("Z", "X")

DEFAULT_F_EC = 1.16

# flags
FLAG_Y11_CLAMPED = "y11-clamped"
FLAG_E11_CLAMPED = "e11-clamped"
FLAG_E11_OVERFLOW = "e11-overflow"
FLAG_ILL_CONDITIONED = "ill-conditioned"
FLAG_DECOY_CONDITION = "decoy-condition"
FLAG_NO_Y11 = "y11-nonpositive"
FLAG_BELOW_THRESHOLD = "below-threshold"

# relative size below which the bound denominator counts as cancelled away
CONDITION_RTOL = 1e-9


@dataclass(frozen=True)
class ThreeIntensityConfig:
    """Decoy and signal states of both sides; vacuum is implicit."""

    mu: float
    mu_prime: float
    alice_decoy: PhotonNumberDistribution
    alice_signal: PhotonNumberDistribution
    bob_decoy: PhotonNumberDistribution
    bob_signal: PhotonNumberDistribution

    def __post_init__(self):
        if not 0 <= self.mu < self.mu_prime:
            raise DomainError(f"need 0 <= mu < mu', got mu={self.mu}, mu'={self.mu_prime}")

    @classmethod
    def from_sources(cls, source_a: SourceSpec, source_b: SourceSpec, mu: float,
                     mu_prime: float, n_max: int = DEFAULT_CUTOFF,
                     tail_tol: float = DEFAULT_TAIL_TOL) -> "ThreeIntensityConfig":
        return cls(mu, mu_prime,
                   source_a.distribution(mu, n_max, tail_tol),
                   source_a.distribution(mu_prime, n_max, tail_tol),
                   source_b.distribution(mu, n_max, tail_tol),
                   source_b.distribution(mu_prime, n_max, tail_tol))

    def state(self, side: str, label: str) -> PhotonNumberDistribution:
        if label == VAC:
            return vacuum_distribution()
        if side == "A":
            return self.alice_decoy if label == DECOY else self.alice_signal
        return self.bob_decoy if label == DECOY else self.bob_signal

    # photon-number weights: a_k, a'_k (Alice) and b_k, b'_k (Bob)
    def a(self, k: int) -> float:
        return self.alice_decoy[k]

    def a_prime(self, k: int) -> float:
        return self.alice_signal[k]

    def b(self, k: int) -> float:
        return self.bob_decoy[k]

    def b_prime(self, k: int) -> float:
        return self.bob_signal[k]


@dataclass(frozen=True)
class GainTable:
    """Basis statistics for all nine intensity pairs, keyed ``(x, y, basis)``."""

    entries: Mapping[tuple[str, str, str], BasisStatistics]

    def stats(self, x: str, y: str, basis: str) -> BasisStatistics:
        return self.entries[(x, y, basis)]

    def gain(self, x: str, y: str, basis: str) -> float:
        return self.entries[(x, y, basis)].gain

    def error_gain(self, x: str, y: str, basis: str) -> float:
        return self.entries[(x, y, basis)].error_gain


def gain_table(cfg: ThreeIntensityConfig, channel: ChannelParams, dark_rate: float,
               misalignment: float) -> GainTable:
    arrived_a = {x: apply_loss(cfg.state("A", x), channel.eta_a) for x in INTENSITIES}
    arrived_b = {y: apply_loss(cfg.state("B", y), channel.eta_b) for y in INTENSITIES}
    entries = {}
    for x, y in itertools.product(INTENSITIES, repeat=2):
        ctx = SourcePairContext(arrived_a[x], arrived_b[y], dark_rate, misalignment)
        for basis in BASES:
            entries[(x, y, basis)] = basis_statistics(ctx, basis)
    return GainTable(entries)


@dataclass(frozen=True)
class DecoyBounds:
    basis: str
    y11_lower: float
    y11_true: float
    e11_upper: Optional[float] = None
    e11_true: Optional[float] = None
    # e11 bound with the unweighted numerator/denominator, for diagnostics only
    e11_upper_unweighted: Optional[float] = None
    flags: frozenset = field(default_factory=frozenset)

    @property
    def well_conditioned(self) -> bool:
        return not self.flags & {FLAG_ILL_CONDITIONED, FLAG_DECOY_CONDITION, FLAG_NO_Y11}


def _denominator(cfg: ThreeIntensityConfig) -> tuple[float, float]:
    """``a1' a1 (b2' b1 - b2 b1')`` and the scale of its two terms."""
    t1 = cfg.b_prime(2) * cfg.b(1)
    t2 = cfg.b(2) * cfg.b_prime(1)
    w = cfg.a_prime(1) * cfg.a(1)
    return w * (t1 - t2), w * (t1 + t2)


def decoy_condition_holds(cfg: ThreeIntensityConfig, rtol: float = 1e-12) -> bool:
    """Whether every multi-photon yield enters the ``Y11`` bound with a
    non-positive coefficient, which makes it a valid lower bound.

    The coefficient of ``Y_mn`` (``m, n >= 1``) in the numerator is
    ``a1' b2' a_m b_n - a1 b2 a'_m b'_n``; it vanishes for ``(1, 2)`` and
    must be <= 0 for the rest, and the denominator must be positive.
    """
    den, _ = _denominator(cfg)
    if not den > 0:
        return False
    w_decoy = cfg.a_prime(1) * cfg.b_prime(2)
    w_signal = cfg.a(1) * cfg.b(2)
    cut_a = max(cfg.alice_decoy.cutoff, cfg.alice_signal.cutoff)
    cut_b = max(cfg.bob_decoy.cutoff, cfg.bob_signal.cutoff)
    for m in range(1, cut_a + 1):
        for n in range(1, cut_b + 1):
            if (m, n) == (1, 1):
                continue
            lhs = w_decoy * cfg.a(m) * cfg.b(n)
            rhs = w_signal * cfg.a_prime(m) * cfg.b_prime(n)
            if lhs - rhs > rtol * max(lhs, rhs):
                return False
    return True


def _vacuum_contamination(table: GainTable, cfg: ThreeIntensityConfig, label: str,
                          basis: str) -> float:
    """Gain of the ``label, label`` pair from events where a side sent vacuum."""
    a0 = cfg.a(0) if label == DECOY else cfg.a_prime(0)
    b0 = cfg.b(0) if label == DECOY else cfg.b_prime(0)
    return (a0 * table.gain(VAC, label, basis) + b0 * table.gain(label, VAC, basis)
            - a0 * b0 * table.gain(VAC, VAC, basis))


def y11_lower_bound_raw(table: GainTable, cfg: ThreeIntensityConfig, basis: str) -> float:
    """Unclamped ``Y11`` lower bound; raises if the denominator cancels."""
    den, scale = _denominator(cfg)
    if den == 0.0 or abs(den) <= CONDITION_RTOL * scale:
        raise IllConditionedError(
            f"Y11 bound denominator {den:.3g} vanishes (mu={cfg.mu}, mu'={cfg.mu_prime})")
    decoy = table.gain(DECOY, DECOY, basis) - _vacuum_contamination(table, cfg, DECOY, basis)
    signal = table.gain(SIGNAL, SIGNAL, basis) - _vacuum_contamination(table, cfg, SIGNAL, basis)
    num = cfg.a_prime(1) * cfg.b_prime(2) * decoy - cfg.a(1) * cfg.b(2) * signal
    return num / den


def y11_lower_bound(table: GainTable, cfg: ThreeIntensityConfig, basis: str) -> float:
    return max(0.0, y11_lower_bound_raw(table, cfg, basis))


def _e11_numerator(table: GainTable, cfg: ThreeIntensityConfig, weighted: bool) -> float:
    a0, b0 = (cfg.a(0), cfg.b(0)) if weighted else (1.0, 1.0)
    return (table.error_gain(DECOY, DECOY, "X")
            - b0 * table.error_gain(DECOY, VAC, "X")
            - a0 * table.error_gain(VAC, DECOY, "X")
            + a0 * b0 * table.error_gain(VAC, VAC, "X"))


def e11_upper_bound_raw(table: GainTable, cfg: ThreeIntensityConfig,
                        y11_lower: float) -> float:
    """Unclamped upper bound on the single-pair phase-flip error.

    The error-weighted decoy gain minus its vacuum-side parts equals
    ``sum_{m,n>=1} a_m b_n Y_mn e_mn >= a1 b1 Y11 e11``.
    """
    if not y11_lower > 0:
        raise UndefinedBoundError(f"e11 bound needs Y11 lower bound > 0, got {y11_lower}")
    return _e11_numerator(table, cfg, True) / (cfg.a(1) * cfg.b(1) * y11_lower)


def e11_upper_bound(table: GainTable, cfg: ThreeIntensityConfig, y11_lower: float) -> float:
    return min(1.0, max(0.0, e11_upper_bound_raw(table, cfg, y11_lower)))


def true_single_pair_values(channel: ChannelParams, dark_rate: float, misalignment: float,
                            basis: str) -> tuple[float, Optional[float]]:
    """Yield and error of exactly-one-photon pairs (the infinite-decoy limit)."""
    one = fock_distribution(1)
    ctx = SourcePairContext.from_sources(one, one, channel, dark_rate, misalignment)
    st = basis_statistics(ctx, basis)
    return st.gain, st.adjusted_error


def decoy_bounds(table: GainTable, cfg: ThreeIntensityConfig, channel: ChannelParams,
                 dark_rate: float, misalignment: float) -> dict[str, DecoyBounds]:
    """Bounds in both bases, with clamping and conditioning recorded as flags."""
    condition_ok = decoy_condition_holds(cfg)
    out = {}
    for basis in BASES:
        flags = set()
        if not condition_ok:
            flags.add(FLAG_DECOY_CONDITION)
        y_true, e_true = true_single_pair_values(channel, dark_rate, misalignment, basis)
        try:
            y_raw = y11_lower_bound_raw(table, cfg, basis)
        except IllConditionedError:
            flags.add(FLAG_ILL_CONDITIONED)
            y_raw = 0.0
        if y_raw < 0:
            flags.add(FLAG_Y11_CLAMPED)
        y_low = max(0.0, y_raw)
        if basis == "Z":
            out[basis] = DecoyBounds(basis, y_low, y_true, flags=frozenset(flags))
            continue
        e_up = e_printed = None
        if y_low > 0:
            e_raw = e11_upper_bound_raw(table, cfg, y_low)
            if e_raw > 1:
                flags.add(FLAG_E11_OVERFLOW)
            elif e_raw < 0:
                flags.add(FLAG_E11_CLAMPED)
            e_up = min(1.0, max(0.0, e_raw))
            e_printed = _e11_numerator(table, cfg, False) / y_low
        else:
            flags.add(FLAG_NO_Y11)
        out[basis] = DecoyBounds(basis, y_low, y_true, e_up, e_true, e_printed,
                                 frozenset(flags))
    return out


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class KeyRate:
    rate: float
    raw: float
    flags: frozenset = field(default_factory=frozenset)


def _privacy_term(y11: float, e11: Optional[float]) -> float:
    # e11 >= 1/2 leaves nothing after privacy amplification
    if y11 <= 0 or e11 is None or e11 >= 0.5:
        return 0.0
    return y11 * (1.0 - binary_entropy(e11))


def key_rate(table: GainTable, cfg: ThreeIntensityConfig, bounds: Mapping[str, DecoyBounds],
             f_ec: float = DEFAULT_F_EC, infinite_decoy: bool = False) -> KeyRate:
    """Asymptotic key rate per pulse pair from signal-state Z-basis key bits.

    With ``infinite_decoy`` the exact single-pair yield and error replace
    their bounds.
    """
    z, x = bounds["Z"], bounds["X"]
    if infinite_decoy:
        privacy = _privacy_term(z.y11_true, x.e11_true)
    else:
        privacy = _privacy_term(z.y11_lower, x.e11_upper)
    signal = table.stats(SIGNAL, SIGNAL, "Z")
    leak = 0.0
    if signal.adjusted_error is not None:
        leak = signal.gain * f_ec * binary_entropy(signal.adjusted_error)
    raw = cfg.a_prime(1) * cfg.b_prime(1) * privacy - leak
    flags = frozenset() if raw > 0 else frozenset({FLAG_BELOW_THRESHOLD})
    return KeyRate(max(0.0, raw), raw, flags)


def optimize_mu_prime(evaluate: Callable[[float], float],
                      grid: Iterable[float]) -> tuple[float, float, bool]:
    """Grid search for the signal intensity maximizing ``evaluate``.

    Returns ``(mu_prime, rate, flagged)``; ties go to the smaller intensity
    and ``flagged`` is set when no grid point gives a positive rate.
    """
    points = sorted(grid)
    if not points:
        raise DomainError("mu' grid is empty")
    best, best_rate = points[0], -math.inf
    for mp in points:
        r = evaluate(mp)
        if r > best_rate:
            best, best_rate = mp, r
    if not best_rate > 0:
        return points[0], max(0.0, best_rate), True
    return best, best_rate, False
