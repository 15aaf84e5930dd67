"""Photon-number-diagonal source states.

Every source in the simulator is described by its photon-number statistics
``p_n`` alone.  Distributions are truncated at a cutoff ``N_max``; the mass
beyond the cutoff is kept in ``tail_mass`` so that ``sum(p) + tail_mass == 1``.
Constructors raise the cutoff automatically until the tail falls below the
requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateSourceError, DomainError

DEFAULT_CUTOFF = 12
DEFAULT_TAIL_TOL = 1e-10
MAX_CUTOFF = 64

VACUUM = "vacuum"
WEAK_COHERENT = "weak-coherent"
POISSONIAN_HSPS = "poissonian-hsps"
SUB_POISSONIAN_HSPS = "sub-poissonian-hsps"
FAMILIES = (VACUUM, WEAK_COHERENT, POISSONIAN_HSPS, SUB_POISSONIAN_HSPS)


@dataclass(frozen=True, eq=False)
class PhotonNumberDistribution:
    """Truncated photon-number distribution of a single pulse.

    ``probs[n]`` is the probability of exactly ``n`` photons for
    ``n <= cutoff``; ``tail_mass`` is the probability of more than
    ``cutoff`` photons.  The array is read-only.
    """

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size == 0:
            raise DomainError("a distribution needs at least the n=0 entry")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError("photon-number probabilities must be finite and >= 0")
        if self.tail_mass < 0:
            raise DomainError(f"negative tail mass {self.tail_mass}")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @property
    def cutoff(self) -> int:
        return self.probs.size - 1

    @property
    def total_mass(self) -> float:
        return float(self.probs.sum()) + self.tail_mass

    def mean(self) -> float:
        """Mean photon number of the truncated part."""
        return float(np.arange(self.probs.size) @ self.probs)

    def __getitem__(self, n: int) -> float:
        if n < 0:
            raise IndexError(n)
        return float(self.probs[n]) if n <= self.cutoff else 0.0

    def __len__(self) -> int:
        return self.probs.size

    def padded(self, cutoff: int) -> np.ndarray:
        """Probabilities ``p_0..p_cutoff``, zero-filled past the own cutoff."""
        out = np.zeros(cutoff + 1)
        m = min(cutoff, self.cutoff) + 1
        out[:m] = self.probs[:m]
        return out

    def __repr__(self) -> str:
        head = ", ".join(f"{p:.4g}" for p in self.probs[:4])
        return (f"PhotonNumberDistribution(cutoff={self.cutoff}, "
                f"probs=[{head}{', ...' if self.cutoff > 3 else ''}], "
                f"tail_mass={self.tail_mass:.3g})")


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def _check_intensity(x: float) -> None:
    if not x >= 0 or math.isinf(x):
        raise DomainError(f"intensity must be finite and >= 0, got {x}")


def _poisson_terms(x: float, n_max: int) -> np.ndarray:
    p = np.empty(n_max + 1)
    p[0] = math.exp(-x)
    for n in range(1, n_max + 1):
        p[n] = p[n - 1] * x / n
    return p


def _build(terms: Callable[[int], np.ndarray], n_max: int,
           tail_tol: float) -> PhotonNumberDistribution:
    """Grow the cutoff until ``1 - sum(p) <= tail_tol``.

    ``terms(n)`` must return the already-normalized ``p_0..p_n``.
    """
    if n_max < 0:
        raise DomainError(f"cutoff must be >= 0, got {n_max}")
    n = n_max
    while True:
        p = terms(n)
        tail = max(0.0, 1.0 - float(p.sum()))
        if tail <= tail_tol:
            return PhotonNumberDistribution(p, tail)
        if n >= MAX_CUTOFF:
            raise DomainError(
                f"tail mass {tail:.3g} still above {tail_tol:g} at cutoff {MAX_CUTOFF}")
        n = min(MAX_CUTOFF, max(n + 1, 2 * n))


def vacuum_distribution() -> PhotonNumberDistribution:
    return PhotonNumberDistribution([1.0])


def fock_distribution(n: int) -> PhotonNumberDistribution:
    """Exactly ``n`` photons."""
    if n < 0:
        raise DomainError(f"photon number must be >= 0, got {n}")
    p = np.zeros(n + 1)
    p[n] = 1.0
    return PhotonNumberDistribution(p)


def poisson_distribution(x: float, n_max: int = DEFAULT_CUTOFF,
                         tail_tol: float = DEFAULT_TAIL_TOL) -> PhotonNumberDistribution:
    """Poissonian statistics ``x^n e^{-x} / n!`` (weak coherent state)."""
    _check_intensity(x)
    return _build(lambda n: _poisson_terms(x, n), n_max, tail_tol)


def sub_poissonian_hsps(x: float, correlation: float, trigger_dark: float,
                        n_max: int = DEFAULT_CUTOFF,
                        tail_tol: float = DEFAULT_TAIL_TOL) -> PhotonNumberDistribution:
    """Heralded source with pair-correlation probability ``correlation``.

    With probability ``correlation`` a herald announces a genuine photon on
    top of the Poissonian background, shifting the distribution by one; the
    vacuum term also collects the trigger dark counts.  The raw weights sum
    to ``1 + correlation * trigger_dark`` and are renormalized to a state.
    """
    _check_intensity(x)
    _check_probability("correlation", correlation)
    _check_probability("trigger dark rate", trigger_dark)
    mass = 1.0 + correlation * trigger_dark

    def terms(n):
        pois = _poisson_terms(x, n)
        p = (1.0 - correlation) * pois
        p[0] += correlation * trigger_dark
        p[1:] += correlation * pois[:-1]
        return p / mass

    return _build(terms, n_max, tail_tol)


def heralded_poissonian(x: float, trigger_efficiency: float, trigger_dark: float,
                        n_max: int = DEFAULT_CUTOFF,
                        tail_tol: float = DEFAULT_TAIL_TOL) -> PhotonNumberDistribution:
    """Poissonian pair source post-selected on a click of the trigger detector.

    An ``n``-photon pulse is heralded with probability
    ``1 - (1 - trigger_efficiency)**n * (1 - trigger_dark)``.
    """
    _check_intensity(x)
    _check_probability("trigger efficiency", trigger_efficiency)
    _check_probability("trigger dark rate", trigger_dark)
    # sum_n Pois_n(x) (1-eta)^n = exp(-x eta)
    log_no_click = math.log1p(-trigger_dark) if trigger_dark < 1 else -math.inf
    herald_prob = -math.expm1(log_no_click - x * trigger_efficiency)
    if herald_prob <= 0.0:
        raise DegenerateSourceError(
            "trigger never fires: no heralded pulses for "
            f"x={x}, efficiency={trigger_efficiency}, dark={trigger_dark}")

    log_miss = math.log1p(-trigger_efficiency) if trigger_efficiency < 1 else -math.inf

    def terms(n):
        k = np.arange(n + 1)
        with np.errstate(invalid="ignore"):
            # 0 * -inf at k = 0 with a perfect trigger means "no photon to miss"
            log_silent = np.where(k == 0, 0.0, k * log_miss) + log_no_click
        click = -np.expm1(log_silent)
        return _poisson_terms(x, n) * click / herald_prob

    return _build(terms, n_max, tail_tol)


@dataclass(frozen=True)
class SourceSpec:
    """A source family with its fixed parameters; the intensity is supplied per use."""

    family: str
    trigger_efficiency: float = 0.75
    trigger_dark: float = 1e-6
    correlation: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown source family {self.family!r}; "
                              f"expected one of {', '.join(FAMILIES)}")
        _check_probability("trigger efficiency", self.trigger_efficiency)
        _check_probability("trigger dark rate", self.trigger_dark)
        _check_probability("correlation", self.correlation)

    def distribution(self, intensity: float, n_max: int = DEFAULT_CUTOFF,
                     tail_tol: float = DEFAULT_TAIL_TOL) -> PhotonNumberDistribution:
        if self.family == VACUUM:
            return vacuum_distribution()
        if self.family == WEAK_COHERENT:
            return poisson_distribution(intensity, n_max, tail_tol)
        if self.family == POISSONIAN_HSPS:
            return heralded_poissonian(intensity, self.trigger_efficiency,
                                       self.trigger_dark, n_max, tail_tol)
        return sub_poissonian_hsps(intensity, self.correlation, self.trigger_dark,
                                   n_max, tail_tol)
