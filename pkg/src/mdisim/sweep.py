"""Channel-loss sweeps with signal-intensity optimization, and oracle verification runs."""

from __future__ import annotations

import csv
import io
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .channel import ChannelParams
from .conditionals import ORIENTATIONS, p_event
from .config import SweepConfig
from .decoy import (INTENSITIES, SIGNAL, DecoyBounds, GainTable, KeyRate,
                    ThreeIntensityConfig, decoy_bounds, gain_table, key_rate,
                    optimize_mu_prime)
from .detectors import SUCCESS_EVENTS
from .errors import CapacityError, ConfigError
from .oracle import ORACLE_CEILING, oracle_event_prob

log = logging.getLogger(__name__)

COLUMNS = (
    "loss_db", "mu_prime_star", "S_Z_mumu'", "E_Z_mumu'", "S_X_mumu'", "E_X_mumu'",
    "Y11_Z_true", "Y11_Z_lower", "Y11_X_true", "Y11_X_lower", "e11_X_true",
    "e11_X_upper", "R_3decoy", "R_infinite", "flags",
)

FLAG_NO_KEY = "no-key"


@dataclass(frozen=True)
class PointResult:
    """Everything computed at one loss value for the chosen signal intensity."""

    loss_db: float
    channel: ChannelParams
    decoy: ThreeIntensityConfig
    table: GainTable
    bounds: dict[str, DecoyBounds]
    rate: KeyRate
    rate_infinite: KeyRate
    optimizer_flagged: bool

    @property
    def mu_prime(self) -> float:
        return self.decoy.mu_prime

    @property
    def flags(self) -> frozenset:
        out = set(self.rate.flags)
        for b in self.bounds.values():
            out |= b.flags
        if self.optimizer_flagged:
            out.add(FLAG_NO_KEY)
        return frozenset(out)

    def row(self) -> dict:
        t, z, x = self.table, self.bounds["Z"], self.bounds["X"]
        sz, sx = t.stats(SIGNAL, SIGNAL, "Z"), t.stats(SIGNAL, SIGNAL, "X")
        return {
            "loss_db": self.loss_db,
            "mu_prime_star": self.mu_prime,
            "S_Z_mumu'": sz.gain,
            "E_Z_mumu'": sz.adjusted_error,
            "S_X_mumu'": sx.gain,
            "E_X_mumu'": sx.adjusted_error,
            "Y11_Z_true": z.y11_true,
            "Y11_Z_lower": z.y11_lower,
            "Y11_X_true": x.y11_true,
            "Y11_X_lower": x.y11_lower,
            "e11_X_true": x.e11_true,
            "e11_X_upper": x.e11_upper,
            "R_3decoy": self.rate.rate,
            "R_infinite": self.rate_infinite.rate,
            "flags": ";".join(sorted(self.flags)),
        }


def channel_for(cfg: SweepConfig, loss_db: float, per_arm_override: bool = False) -> ChannelParams:
    """Per-arm channel for a total loss.

    With ``per_arm_override`` an explicit ``loss_db_alice``/``loss_db_bob``
    replaces the split; if only one is given the other arm takes the rest of
    ``loss_db``.
    """
    la, lb = cfg.loss_db_alice, cfg.loss_db_bob
    if not per_arm_override or (la is None and lb is None):
        return ChannelParams.symmetric(loss_db, cfg.detector_efficiency, cfg.alice_loss_fraction)
    if la is None:
        la = loss_db - lb
    elif lb is None:
        lb = loss_db - la
    if la < 0 or lb < 0:
        raise ConfigError(f"per-arm loss exceeds the total of {loss_db} dB "
                          f"(alice {la}, bob {lb})")
    return ChannelParams(la, lb, cfg.detector_efficiency)


def evaluate(cfg: SweepConfig, channel: ChannelParams, mu_prime: float,
             loss_db: Optional[float] = None, optimizer_flagged: bool = False) -> PointResult:
    decoy = ThreeIntensityConfig.from_sources(cfg.source_a, cfg.source_b, cfg.mu, mu_prime,
                                              cfg.cutoff, cfg.tail_tolerance)
    table = gain_table(decoy, channel, cfg.dark_rate, cfg.misalignment)
    bounds = decoy_bounds(table, decoy, channel, cfg.dark_rate, cfg.misalignment)
    return PointResult(
        channel.total_loss_db if loss_db is None else loss_db, channel, decoy, table, bounds,
        key_rate(table, decoy, bounds, cfg.f_ec),
        key_rate(table, decoy, bounds, cfg.f_ec, infinite_decoy=True),
        optimizer_flagged)


def run_point(cfg: SweepConfig, loss_db: float, per_arm_override: bool = False,
              mu_prime: Optional[float] = None) -> PointResult:
    """Evaluate one loss value, optimizing the signal intensity unless given."""
    channel = channel_for(cfg, loss_db, per_arm_override)
    loss_db = channel.total_loss_db if per_arm_override else loss_db
    if mu_prime is not None:
        return evaluate(cfg, channel, mu_prime, loss_db)
    results = {}

    def rate(mp):
        results[mp] = evaluate(cfg, channel, mp, loss_db)
        return results[mp].rate.rate

    best, _, flagged = optimize_mu_prime(rate, cfg.mu_prime_grid)
    res = results[best]
    if flagged:
        res = evaluate(cfg, channel, best, loss_db, optimizer_flagged=True)
    return res


def _point_row(args) -> dict:
    cfg, loss = args
    return run_point(cfg, loss).row()


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    """One row per loss value, in increasing loss order."""
    tasks = [(cfg, loss) for loss in cfg.losses]
    log.info("sweeping %d loss points over %d mu' values", len(tasks), len(cfg.mu_prime_grid))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_point_row, tasks))
    return [_point_row(t) for t in tasks]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_csv(rows: Iterable[dict], stream, columns: Sequence[str] = COLUMNS) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])


def sweep_csv(cfg: SweepConfig, jobs: int = 1) -> str:
    buf = io.StringIO()
    write_csv(run_sweep(cfg, jobs), buf)
    return buf.getvalue()


def gain_table_rows(point: PointResult) -> list[dict]:
    rows = []
    for x, y in itertools.product(INTENSITIES, repeat=2):
        for basis in ("Z", "X"):
            st = point.table.stats(x, y, basis)
            rows.append({"alice": x, "bob": y, "basis": basis, "gain": st.gain,
                         "raw_error": st.raw_error, "error": st.adjusted_error})
    return rows


@dataclass(frozen=True)
class VerifyReport:
    comparisons: int
    mismatches: list
    max_abs_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return not self.mismatches


def run_verify(max_photons: int, dark_rates: Sequence[float] = (0.0,),
               tolerance: float = 1e-12) -> VerifyReport:
    """Compare every closed-form event probability with the Fock-space oracle.

    Covers ``k1, k2 <= max_photons``, all eight polarization pairs and all
    four success events, for each dark rate.
    """
    if 2 * max_photons > ORACLE_CEILING:
        raise CapacityError(f"max_photons={max_photons} needs {2 * max_photons} photons; "
                            f"the oracle stops at {ORACLE_CEILING}")
    count, worst, bad = 0, 0.0, []
    for d in dark_rates:
        for (alpha, beta), event in itertools.product(ORIENTATIONS, SUCCESS_EVENTS):
            for k1, k2 in itertools.product(range(max_photons + 1), repeat=2):
                closed = p_event(event, k1, k2, alpha, beta, d)
                brute = oracle_event_prob(event, k1, k2, alpha, beta, d)
                err = abs(closed - brute)
                count += 1
                worst = max(worst, err)
                if err > tolerance:
                    bad.append((d, f"{alpha}{beta}", str(event), k1, k2, closed, brute))
    return VerifyReport(count, bad, worst, tolerance)

