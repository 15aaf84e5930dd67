"""Observable gains and error rates for a pair of photon-number-diagonal sources."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .channel import ChannelParams, apply_loss
from .conditionals import X_ORIENTATIONS, Z_ORIENTATIONS, Polarization, event_kernel
from .detectors import E12, E14, E23, E34, SUCCESS_EVENTS, EventPair, check_dark_rate
from .errors import DomainError
from .sources import PhotonNumberDistribution


@dataclass(frozen=True)
class BasisStatistics:
    """Gain and error rates of one basis.

    ``raw_error`` and ``adjusted_error`` are ``None`` when the gain is zero.
    """

    basis: str
    gain: float
    raw_error: Optional[float]
    adjusted_error: Optional[float]

    @property
    def error_gain(self) -> float:
        """``E * S``, which is linear in the source mixture."""
        if self.adjusted_error is None:
            return 0.0
        return self.adjusted_error * self.gain


@dataclass(frozen=True)
class SourcePairContext:
    """Photon-number statistics arriving at the beam splitter, after loss."""

    dist_a: PhotonNumberDistribution
    dist_b: PhotonNumberDistribution
    dark_rate: float
    misalignment: float = 0.0

    def __post_init__(self):
        check_dark_rate(self.dark_rate)
        if not 0.0 <= self.misalignment <= 1.0:
            raise DomainError(f"misalignment must lie in [0, 1], got {self.misalignment}")

    @classmethod
    def from_sources(cls, source_a: PhotonNumberDistribution,
                     source_b: PhotonNumberDistribution, channel: ChannelParams,
                     dark_rate: float, misalignment: float = 0.0) -> "SourcePairContext":
        return cls(apply_loss(source_a, channel.eta_a), apply_loss(source_b, channel.eta_b),
                   dark_rate, misalignment)


def alignment_adjust(raw_error: float, misalignment: float) -> float:
    """Flip a fraction ``misalignment`` of the error-free events.

    Events split into an error-free class and a random class (error 1/2);
    misalignment only acts on the first, hence ``E = E_d (1 - 2 E~) + E~``.
    """
    if not (0.0 <= raw_error <= 1.0 and 0.0 <= misalignment <= 1.0):
        raise DomainError(f"error rates must lie in [0, 1], got {raw_error}, {misalignment}")
    return misalignment * (1.0 - 2.0 * raw_error) + raw_error


def q_event(ctx: SourcePairContext, alpha: Polarization, beta: Polarization,
            event: EventPair) -> float:
    """Probability of ``event`` when Alice sends ``alpha`` and Bob sends ``beta``."""
    fa, fb = ctx.dist_a.probs, ctx.dist_b.probs
    kern = event_kernel(event, alpha, beta, ctx.dark_rate, fa.size - 1, fb.size - 1)
    return float(fa @ kern @ fb)


def _is_error(basis: str, alpha: Polarization, beta: Polarization, event: EventPair) -> bool:
    if basis == "Z":
        return alpha == beta
    # X basis: same polarizations should give Phi+ (1,2)/(3,4); opposite give Psi- (1,4)/(2,3)
    if alpha == beta:
        return event in (E14, E23)
    return event in (E12, E34)


@lru_cache(maxsize=1024)
def basis_kernels(basis: str, d: float, cutoff_a: int,
                  cutoff_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Summed kernels ``(4 S, 4 E~ S)`` over polarizations and success events."""
    orientations = Z_ORIENTATIONS if basis == "Z" else X_ORIENTATIONS
    gain = np.zeros((cutoff_a + 1, cutoff_b + 1))
    err = np.zeros_like(gain)
    for alpha, beta in orientations:
        for event in SUCCESS_EVENTS:
            kern = event_kernel(event, alpha, beta, d, cutoff_a, cutoff_b)
            gain += kern
            if _is_error(basis, alpha, beta, event):
                err += kern
    gain.flags.writeable = False
    err.flags.writeable = False
    return gain, err


def basis_statistics(ctx: SourcePairContext, basis: str) -> BasisStatistics:
    if basis not in ("Z", "X"):
        raise DomainError(f"basis must be 'Z' or 'X', got {basis!r}")
    fa, fb = ctx.dist_a.probs, ctx.dist_b.probs
    gain_k, err_k = basis_kernels(basis, ctx.dark_rate, fa.size - 1, fb.size - 1)
    total = float(fa @ gain_k @ fb)
    if total <= 0.0:
        return BasisStatistics(basis, 0.0, None, None)
    raw = min(1.0, float(fa @ err_k @ fb) / total)
    return BasisStatistics(basis, total / 4.0, raw, alignment_adjust(raw, ctx.misalignment))


def z_basis_statistics(ctx: SourcePairContext) -> BasisStatistics:
    """Z basis: orthogonal polarizations give correct bits, equal ones give errors."""
    return basis_statistics(ctx, "Z")


def x_basis_statistics(ctx: SourcePairContext) -> BasisStatistics:
    """X basis: equal polarizations are correct on (1,2), (3,4); opposite ones on (1,4), (2,3)."""
    return basis_statistics(ctx, "X")
