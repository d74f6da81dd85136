from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mobius_qec.analysis import ChannelModel
from mobius_qec.decoder import MwpmDecoder
from mobius_qec.montecarlo import (
    NoCrossingError,
    _pack_rows,
    _unpack,
    batch_rng,
    derive_seeds,
    estimate_pl,
    find_crossing,
    sample_error,
    sample_errors,
    sweep,
    wilson_interval,
)
from mobius_qec.stabilizer import PauliOperator


def exact_pl_phase_flip(code, p: float) -> float:
    """Sum over all 2^n Z patterns; Z errors only meet X checks."""
    dec = MwpmDecoder(code)
    total = 0.0
    for z in range(1 << code.n):
        if dec.fails(0, z):
            w = bin(z).count("1")
            total += p**w * (1 - p) ** (code.n - w)
    return total


def test_batch_streams_are_reproducible_and_distinct():
    a = batch_rng(7, 3).random(5)
    assert np.array_equal(a, batch_rng(7, 3).random(5))
    assert not np.array_equal(a, batch_rng(7, 4).random(5))
    assert not np.array_equal(a, batch_rng(8, 3).random(5))
    with pytest.raises(ValueError):
        batch_rng(-1, 0)


@given(st.lists(st.integers(0, 2**70 - 1), min_size=1, max_size=5))
def test_pack_unpack_roundtrip(values):
    bits = _unpack(values, 70)
    assert _pack_rows(bits) == values
    small = [v & (2**20 - 1) for v in values]
    assert _pack_rows(_unpack(small, 20)) == small


def test_sampling_frequencies():
    ch = ChannelModel.from_bias(0.3, 10)
    x, z = sample_errors(ch, 50, batch_rng(1, 0), 2000)
    shots = x.size
    freq = {
        "X": np.sum(x & ~z & 1) / shots,
        "Y": np.sum(x & z) / shots,
        "Z": np.sum(z & ~x & 1) / shots,
    }
    for kind, prob in (("X", ch.p_x), ("Y", ch.p_y), ("Z", ch.p_z)):
        sigma = math.sqrt(prob * (1 - prob) / shots)
        assert abs(freq[kind] - prob) < 5 * sigma
    assert isinstance(sample_error(ch, 15, batch_rng(1, 0)), PauliOperator)


def test_zero_noise_gives_no_failures(cyl15):
    r = estimate_pl(cyl15, ChannelModel.depolarizing(0.0), seed=1, max_shots=5000)
    assert r.failures == 0 and r.shots == 5000 and r.stopped_by == "max_shots"
    assert r.ci_low == 0 and 0 < r.ci_high < 1e-3


def test_phase_flip_only_gives_logical_z(cyl15):
    r = estimate_pl(cyl15, ChannelModel.phase_flip(0.2), seed=3, min_failures=200)
    assert r.breakdown["logical_x"] == r.breakdown["logical_y"] == 0
    assert r.breakdown["logical_z"] == r.failures >= 200


def test_breakdown_matches_per_shot_classification(mob15):
    ch = ChannelModel.depolarizing(0.15)
    r = estimate_pl(mob15, ch, seed=11, max_shots=3000, min_failures=10**9, batch_size=1000)
    dec = MwpmDecoder(mob15)
    counts = {"logical_x": 0, "logical_y": 0, "logical_z": 0}
    for b in range(3):
        x, z = sample_errors(ch, 15, batch_rng(11, b), 1000)
        for xv, zv in zip(_pack_rows(x), _pack_rows(z)):
            cls = dec.decode_and_classify(PauliOperator(15, xv, zv)).residual_class
            if cls != "stabilizer":
                counts[cls] += 1
    assert r.breakdown == counts and r.failures == sum(counts.values())


def test_exact_phase_flip_rate_inside_interval(cyl15):
    exact = exact_pl_phase_flip(cyl15, 0.05)
    r = estimate_pl(cyl15, ChannelModel.phase_flip(0.05), seed=2024, min_failures=300)
    sigma = (r.ci_high - r.ci_low) / (2 * 1.959964)
    assert abs(r.p_l_hat - exact) <= 3 * sigma


def test_stop_rule_and_determinism(cyl15):
    ch = ChannelModel.depolarizing(0.05)
    a = estimate_pl(cyl15, ch, seed=5, min_failures=50, batch_size=500)
    b = estimate_pl(cyl15, ch, seed=5, min_failures=50, batch_size=500, workers=2)
    assert a == b
    assert a.failures >= 50 and a.shots == 500 * a.batches
    capped = estimate_pl(cyl15, ch, seed=5, min_failures=10**9, max_shots=1234, batch_size=500)
    assert capped.shots == 1234 and capped.stopped_by == "max_shots"
    with pytest.raises(ValueError):
        estimate_pl(cyl15, ch, seed=5, max_shots=0)


def test_wilson_interval():
    lo, hi = wilson_interval(10, 100)
    assert lo < 0.1 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    assert wilson_interval(0, 100)[0] == 0


def test_derive_seeds():
    s = derive_seeds(42, 4)
    assert s == derive_seeds(42, 4) and len(set(s)) == 4
    assert derive_seeds(42, 2) == s[:2]


def test_sweep_is_monotone_in_p(cyl15):
    reports = sweep(cyl15, 1.0, [0.02, 0.08, 0.2], seed=9, min_failures=200)
    rates = [r.p_l_hat for r in reports]
    assert rates == sorted(rates)
    assert sweep(cyl15, 1.0, [], seed=9) == []


def test_find_crossing():
    grid = [0.1, 0.2, 0.3]
    p, bracket = find_crossing(grid, [0.1, 0.2, 0.3], [0.05, 0.2 * math.e ** 0.0, 0.6])
    assert bracket == (0.1, 0.2) and p == pytest.approx(0.2)
    p, bracket = find_crossing(grid, [0.2, 0.2, 0.2], [0.1, 0.1, 0.4])
    assert bracket == (0.2, 0.3)
    assert p == pytest.approx(0.2 + 0.1 * math.log(2) / math.log(4))
    with pytest.raises(NoCrossingError):
        find_crossing(grid, [0.1, 0.2, 0.3], [0.1, 0.2, 0.3])
    with pytest.raises(NoCrossingError):
        find_crossing(grid, [0.1, 0.2, 0.3], [0.05, 0.1, 0.2])
    with pytest.raises(NoCrossingError):
        find_crossing([0.1], [0.1], [0.2])
