"""Linear lossy channel acting on photon-number distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .sources import PhotonNumberDistribution


def loss_matrix(eta: float, cutoff: int) -> np.ndarray:
    """``M[k, n] = C(n, k) eta^k (1 - eta)^(n - k)`` for ``k, n <= cutoff``."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmittance must lie in [0, 1], got {eta}")
    k = np.arange(cutoff + 1)
    # exponent n - k is negative below the diagonal, where the binomial table is zero
    survive = np.power(eta, k)[:, None]
    lost = np.power(1.0 - eta, np.clip(k[None, :] - k[:, None], 0, None))
    return _binomials(cutoff) * survive * lost


@lru_cache(maxsize=None)
def _binomials(cutoff: int) -> np.ndarray:
    """``C[k, n] = C(n, k)``."""
    table = np.array([[math.comb(n, k) for n in range(cutoff + 1)]
                      for k in range(cutoff + 1)], dtype=float)
    table.flags.writeable = False
    return table


def apply_loss(dist: PhotonNumberDistribution, eta: float) -> PhotonNumberDistribution:
    """Binomially thin every photon with survival probability ``eta``.

    The cutoff is unchanged.  Photons beyond the cutoff are not tracked, so
    the tail mass is carried over as is, which keeps the total at one.
    """
    f = loss_matrix(eta, dist.cutoff) @ dist.probs
    return PhotonNumberDistribution(f, dist.tail_mass)


def effective_transmittance(loss_db: float, detector_efficiency: float = 1.0) -> float:
    """Channel transmittance with the detector efficiency folded in."""
    if not loss_db >= 0:
        raise DomainError(f"channel loss must be >= 0 dB, got {loss_db}")
    if not 0.0 < detector_efficiency <= 1.0:
        raise DomainError(f"detector efficiency must lie in (0, 1], got {detector_efficiency}")
    return 10.0 ** (-loss_db / 10.0) * detector_efficiency


@dataclass(frozen=True)
class ChannelParams:
    """Per-arm losses from Alice and Bob to the relay."""

    loss_db_a: float
    loss_db_b: float
    detector_efficiency: float = 1.0

    def __post_init__(self):
        # validates all three fields
        effective_transmittance(self.loss_db_a, self.detector_efficiency)
        effective_transmittance(self.loss_db_b, self.detector_efficiency)

    @classmethod
    def symmetric(cls, total_loss_db: float, detector_efficiency: float = 1.0,
                  alice_fraction: float = 0.5) -> "ChannelParams":
        """Relay placed so that Alice's arm carries ``alice_fraction`` of the loss."""
        if not 0.0 <= alice_fraction <= 1.0:
            raise DomainError(f"alice_fraction must lie in [0, 1], got {alice_fraction}")
        la = total_loss_db * alice_fraction
        return cls(la, total_loss_db - la, detector_efficiency)

    @property
    def eta_a(self) -> float:
        return effective_transmittance(self.loss_db_a, self.detector_efficiency)

    @property
    def eta_b(self) -> float:
        return effective_transmittance(self.loss_db_b, self.detector_efficiency)

    @property
    def total_loss_db(self) -> float:
        return self.loss_db_a + self.loss_db_b

    def swapped(self) -> "ChannelParams":
        return ChannelParams(self.loss_db_b, self.loss_db_a, self.detector_efficiency)
