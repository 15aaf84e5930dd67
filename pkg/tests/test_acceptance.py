"""Acceptance criteria, each at its stated tolerance, one PASS/FAIL line each."""

import itertools
import subprocess
import sys
import time

import numpy as np
import pytest

from mdisim.channel import ChannelParams, apply_loss
from mdisim.conditionals import ORIENTATIONS, p_event, p_event_x
from mdisim.config import load_config
from mdisim.decoy import binary_entropy
from mdisim.detectors import E14, E23, SUCCESS_EVENTS
from mdisim.gains import SourcePairContext, alignment_adjust, basis_statistics
from mdisim.sources import SourceSpec, poisson_distribution
from mdisim.sweep import run_sweep, run_verify

FAMILIES = ("weak-coherent", "poissonian-hsps", "sub-poissonian-hsps")


@pytest.fixture(scope="module")
def sweeps():
    start = time.perf_counter()
    rows = {f: run_sweep(load_config(f"configs/{f}.ini")) for f in FAMILIES}
    return rows, time.perf_counter() - start


def test_1_oracle_equivalence(record_criterion):
    start = time.perf_counter()
    report = run_verify(4, (0.0, 1e-3, 0.05), tolerance=1e-12)
    elapsed = time.perf_counter() - start
    ok = report.passed and report.comparisons == 3 * 8 * 4 * 25 and elapsed < 10
    assert record_criterion(
        "1 oracle equivalence", ok,
        f"{report.comparisons} comparisons, max |diff| {report.max_abs_error:.2e}, "
        f"{elapsed:.2f}s")


def test_2_hom_suppression(record_criterion):
    worst = 0.0
    for d in (0.0, 1e-3, 0.05, 0.3):
        expected = 0.25 * d * (1 - d) ** 2
        for event in (E14, E23):
            worst = max(worst, abs(p_event_x(event, 1, 1, d, "++") - expected))
    ok = worst <= 1e-12 and p_event_x(E14, 1, 1, 0.0, "++") == 0.0
    assert record_criterion("2 HOM suppression", ok, f"max |diff| {worst:.2e}")


def test_3_bound_sandwich(sweeps, record_criterion):
    rows, elapsed = sweeps
    bad, checked = [], 0
    bad_flags = {"ill-conditioned", "decoy-condition", "y11-nonpositive"}
    for family, table in rows.items():
        for r in table:
            flags = set(r["flags"].split(";")) - {""}
            if r["R_3decoy"] > r["R_infinite"]:
                bad.append((family, r["loss_db"], "R"))
            if flags & bad_flags:
                continue
            checked += 1
            for b in "ZX":
                if r[f"Y11_{b}_lower"] > r[f"Y11_{b}_true"] + 1e-12:
                    bad.append((family, r["loss_db"], f"Y11_{b}"))
            if r["e11_X_upper"] < r["e11_X_true"] - 1e-12:
                bad.append((family, r["loss_db"], "e11"))
    total = sum(len(t) for t in rows.values())
    ok = not bad and total == 3 * 81 and elapsed < 300
    assert record_criterion(
        "3 bound sandwich", ok,
        f"{checked}/{total} well-conditioned points, {len(bad)} violations, "
        f"sweeps {elapsed:.1f}s")


def rates(table):
    return np.array([r["R_3decoy"] for r in table]), np.array([r["loss_db"] for r in table])


def test_4a_monotone_in_loss(sweeps, record_criterion):
    rows, _ = sweeps
    worst = {f: float(np.max(np.diff(rates(t)[0]))) for f, t in rows.items()}
    ok = all(v <= 0 for v in worst.values())
    assert record_criterion("4a rate monotone in loss", ok,
                            ", ".join(f"{f} max step {v:.2e}" for f, v in worst.items()))


def test_4b_finite_cutoff(sweeps, record_criterion):
    rows, _ = sweeps
    cut = {}
    for f, table in rows.items():
        zero = [r["loss_db"] for r in table if r["R_3decoy"] == 0 and "no-key" in r["flags"]]
        cut[f] = zero[0] if zero else None
    ok = all(v is not None for v in cut.values())
    assert record_criterion("4b zero-rate flag at finite loss", ok,
                            ", ".join(f"{f} at {v} dB" for f, v in cut.items()))


def test_4c_family_ordering(sweeps, record_criterion):
    rows, _ = sweeps
    w, loss = rates(rows["weak-coherent"])
    p, _ = rates(rows["poissonian-hsps"])
    s, _ = rates(rows["sub-poissonian-hsps"])
    overtaken = np.flatnonzero((p > s) & (p > 0))
    crossover = float(loss[overtaken[0]]) if overtaken.size else None
    if crossover is None:
        ok = False
        detail = "Poissonian HSPS never exceeds sub-Poissonian HSPS"
    else:
        before = loss < crossover
        live = before & (s > 0)
        leads = bool(np.all(s[live] > np.maximum(w[live], p[live]))) and live.any()
        after = (loss >= crossover) & ((p > 0) | (s > 0))
        stays = bool(np.all(p[after] >= s[after]))
        ok = leads and stays and 50 <= crossover <= 75
        detail = (f"crossover at {crossover} dB, sub-Poissonian leads before: {leads}, "
                  f"Poissonian ahead after: {stays}")
    ratio = s[1] / p[1] if p[1] > 0 else float("nan")
    assert record_criterion("4c family ordering", ok, f"{detail}; R_S/R_P at 1 dB {ratio:.3f}")


def test_5_property_suites(record_criterion):
    failures = []
    rng = np.random.default_rng(5)

    for x in rng.uniform(0, 3, 20):
        for spec in (SourceSpec("weak-coherent"), SourceSpec("poissonian-hsps"),
                     SourceSpec("sub-poissonian-hsps", correlation=rng.uniform())):
            dist = spec.distribution(x)
            if abs(dist.total_mass - 1) > 1e-12:
                failures.append(("normalization", spec.family, x))

    for x, t1, t2 in rng.uniform(0, 1, (20, 3)) * [2, 1, 1]:
        dist = poisson_distribution(x, 20)
        twice = apply_loss(apply_loss(dist, t1), t2).probs
        if np.max(np.abs(twice - apply_loss(dist, t1 * t2).probs)) > 1e-12:
            failures.append(("composition", x, t1, t2))
        thin = apply_loss(dist, t1).probs
        if np.max(np.abs(thin - poisson_distribution(x * t1, 20).padded(20))) > 1e-12:
            failures.append(("thinning", x, t1))

    for (k1, k2), d, orient in itertools.product(
            itertools.product(range(6), repeat=2), (0.0, 1e-3, 0.05), ORIENTATIONS):
        if sum(p_event(e, k1, k2, *orient, d) for e in SUCCESS_EVENTS) > 1 + 1e-12:
            failures.append(("event sum", k1, k2, d, orient))
    for e, k1, k2, d in itertools.product(SUCCESS_EVENTS, range(6), range(6), (0.0, 0.05)):
        if (p_event_x(e, k1, k2, d, "-+") != p_event_x(e, k1, k2, d, "+-")
                or p_event_x(e, k1, k2, d, "--") != p_event_x(e, k1, k2, d, "++")):
            failures.append(("exchange", str(e), k1, k2, d))

    for e_d in np.linspace(0, 1, 11):
        if alignment_adjust(0.0, e_d) != e_d or abs(alignment_adjust(0.5, e_d) - 0.5) > 1e-15:
            failures.append(("alignment", e_d))

    xs = np.linspace(0, 1, 101)
    h = np.array([binary_entropy(v) for v in xs])
    if np.max(np.abs(h - h[::-1])) > 1e-14 or np.any(np.diff(h, 2) > 1e-12):
        failures.append(("entropy",))

    ch = ChannelParams.symmetric(10.0)
    for x, basis in itertools.product((0.05, 0.5, 1.0), "ZX"):
        st = [basis_statistics(SourcePairContext.from_sources(
            poisson_distribution(x, n), poisson_distribution(x, n), ch, 3e-6, 0.015), basis)
            for n in (12, 24)]
        if (abs(st[0].gain - st[1].gain) >= 1e-9
                or abs(st[0].adjusted_error - st[1].adjusted_error) >= 1e-9):
            failures.append(("truncation", x, basis))

    assert record_criterion("5 property suites", not failures,
                            f"{len(failures)} failures {failures[:3]}")


def test_6_determinism(tmp_path, record_criterion):
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        subprocess.run([sys.executable, "-m", "mdisim", "sweep", "configs/weak-coherent.ini",
                        "-o", str(out)], check=True)
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    assert record_criterion("6 determinism", ok,
                            f"{len(outputs[0])} bytes, identical: {outputs[0] == outputs[1]}")
