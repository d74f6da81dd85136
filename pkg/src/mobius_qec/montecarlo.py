"""Sampled logical error rates, sweeps over p, and threshold crossings.

Randomness is counter based: batch ``b`` of a run with seed ``s`` draws from
Philox keyed by ``s`` with its counter starting at ``b``.  A batch therefore
sees the same errors no matter which worker runs it, and the stopping rule is
evaluated on whole batches in index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .analysis import ChannelModel
from .construction import build
from .decoder import MwpmDecoder
from .stabilizer import CssCode, PauliOperator

DEFAULT_BATCH = 4096
LOGICAL_CLASSES = ("logical_x", "logical_z", "logical_y")


class NoCrossingError(RuntimeError):
    """The compared curves do not cross inside the p window."""


def batch_rng(seed: int, batch: int) -> np.random.Generator:
    """Independent stream for ``batch``; the batch index lives in the top counter word."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, batch]))


def sample_errors(channel: ChannelModel, n: int, rng: np.random.Generator,
                  shots: int) -> tuple[np.ndarray, np.ndarray]:
    """(x, z) bit arrays of shape (shots, n) for i.i.d. Pauli noise."""
    u = rng.random((shots, n))
    px, py, pz = float(channel.p_x), float(channel.p_y), float(channel.p_z)
    is_x = u < px
    is_y = (u >= px) & (u < px + py)
    is_z = (u >= px + py) & (u < px + py + pz)
    x = (is_x | is_y).astype(np.uint8)
    z = (is_z | is_y).astype(np.uint8)
    return x, z


def sample_error(channel: ChannelModel, n: int, rng: np.random.Generator) -> PauliOperator:
    x, z = sample_errors(channel, n, rng, 1)
    return PauliOperator(n, _pack_rows(x)[0], _pack_rows(z)[0])


def _pack_rows(bits: np.ndarray) -> list[int]:
    """Each row as an int with bit c = column c."""
    if bits.shape[1] == 0:
        return [0] * bits.shape[0]
    if bits.shape[1] <= 63:
        weights = np.left_shift(np.int64(1), np.arange(bits.shape[1], dtype=np.int64))
        return [int(v) for v in bits.astype(np.int64) @ weights]
    return [int("".join(map(str, row[::-1])), 2) for row in bits]


def _unpack(values: Sequence[int], width: int) -> np.ndarray:
    out = np.zeros((len(values), width), dtype=np.uint8)
    for r, v in enumerate(values):
        while v:
            low = v & -v
            out[r, low.bit_length() - 1] = 1
            v ^= low
    return out


@dataclass
class SimulationReport:
    code: str
    family: str
    lc: int | None
    lf: int | None
    p: float
    A: float | str
    seed: int
    shots: int
    failures: int
    p_l_hat: float
    ci_low: float
    ci_high: float
    breakdown: dict[str, int] = field(default_factory=dict)
    batches: int = 0
    stopped_by: str = "min_failures"

    def to_json(self) -> dict:
        return asdict(self)


def wilson_interval(failures: int, shots: int) -> tuple[float, float]:
    if shots == 0:
        return 0.0, 1.0
    ci = binomtest(failures, shots).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


class _Runner:
    """Decodes batches for one code; one instance per process."""

    def __init__(self, code: CssCode, tie_break: str) -> None:
        self.code = code
        self.decoder = MwpmDecoder(code, tie_break)
        self.h_x = code.h_x.to_array().T.astype(np.int64)
        self.h_z = code.h_z.to_array().T.astype(np.int64)
        n = code.n
        self.lx = np.array([[(v.x >> q) & 1 for q in range(n)] for v in code.logical_x_basis], dtype=np.int64).T
        self.lz = np.array([[(v.z >> q) & 1 for q in range(n)] for v in code.logical_z_basis], dtype=np.int64).T

    def corrections(self, flags: list[int], graph, cache) -> list[int]:
        side = self.decoder._side
        return [side(graph, cache, f) for f in flags]

    def run_batch(self, channel: ChannelModel, seed: int, batch: int, shots: int) -> tuple[int, dict[str, int]]:
        code, dec = self.code, self.decoder
        x, z = sample_errors(channel, code.n, batch_rng(seed, batch), shots)
        sx = _pack_rows((z.astype(np.int64) @ self.h_x) & 1)  # X checks see Z errors
        sz = _pack_rows((x.astype(np.int64) @ self.h_z) & 1)
        cz = _unpack(self.corrections(sx, dec.graph_x, dec._cache_x), code.n)
        cx = _unpack(self.corrections(sz, dec.graph_z, dec._cache_z), code.n)
        # residuals have trivial syndrome; they are logical iff they anticommute with a logical
        bad_x = (((x ^ cx).astype(np.int64) @ self.lz) & 1).any(axis=1)
        bad_z = (((z ^ cz).astype(np.int64) @ self.lx) & 1).any(axis=1)
        counts = {
            "logical_x": int(np.sum(bad_x & ~bad_z)),
            "logical_z": int(np.sum(bad_z & ~bad_x)),
            "logical_y": int(np.sum(bad_x & bad_z)),
        }
        return sum(counts.values()), counts


_WORKER: dict[tuple, _Runner] = {}


def _worker_batch(family: str, lc: int, lf: int, tie_break: str, channel: ChannelModel,
                  seed: int, batch: int, shots: int) -> tuple[int, dict[str, int]]:
    key = (family, lc, lf, tie_break)
    runner = _WORKER.get(key)
    if runner is None:
        runner = _WORKER[key] = _Runner(build(family, lc, lf), tie_break)
    return runner.run_batch(channel, seed, batch, shots)


def estimate_pl(code: CssCode, channel: ChannelModel, *, seed: int, min_failures: int = 100,
                max_shots: int = 10**6, batch_size: int = DEFAULT_BATCH, workers: int = 1,
                tie_break: str = "lex") -> SimulationReport:
    """Sample until ``min_failures`` failures or ``max_shots`` shots, whichever comes first.

    The stop is checked after each whole batch, so the report depends only on
    (code, channel, seed, batch_size, limits).
    """
    if max_shots < 1:
        raise ValueError("max_shots must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    n_batches = -(-max_shots // batch_size)
    sizes = [min(batch_size, max_shots - b * batch_size) for b in range(n_batches)]
    failures = shots = done = 0
    breakdown = {c: 0 for c in LOGICAL_CLASSES}
    pool = None
    if workers > 1 and code.pair.family != "custom":
        pool = ProcessPoolExecutor(workers)
    runner = None if pool else _Runner(code, tie_break)
    try:
        while done < n_batches and failures < min_failures:
            ids = list(range(done, min(done + max(workers, 1), n_batches)))
            if pool:
                args = [(code.pair.family, code.pair.lc, code.pair.lf, tie_break, channel, seed, b, sizes[b]) for b in ids]
                results = list(pool.map(_worker_batch, *zip(*args)))
            else:
                results = [runner.run_batch(channel, seed, b, sizes[b]) for b in ids]
            for b, (f, counts) in zip(ids, results):
                failures += f
                shots += sizes[b]
                done = b + 1
                for c in LOGICAL_CLASSES:
                    breakdown[c] += counts[c]
                if failures >= min_failures:
                    break
    finally:
        if pool:
            pool.shutdown()
    lo, hi = wilson_interval(failures, shots)
    a = channel.bias
    return SimulationReport(
        code=code.name,
        family=code.pair.family,
        lc=code.pair.lc,
        lf=code.pair.lf,
        p=float(channel.p),
        A="inf" if a == math.inf else float(a),
        seed=seed,
        shots=shots,
        failures=failures,
        p_l_hat=failures / shots,
        ci_low=lo,
        ci_high=hi,
        breakdown=breakdown,
        batches=done,
        stopped_by="min_failures" if failures >= min_failures else "max_shots",
    )


def derive_seeds(master: int, count: int) -> list[int]:
    """Independent 64-bit seeds for ``count`` sub-runs of one master seed."""
    children = np.random.SeedSequence(master).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def sweep(code: CssCode, bias: float, p_grid: Sequence[float], *, seed: int, **kwargs) -> list[SimulationReport]:
    seeds = derive_seeds(seed, len(p_grid))
    return [
        estimate_pl(code, ChannelModel.from_bias(p, bias), seed=s, **kwargs)
        for p, s in zip(p_grid, seeds)
    ]


@dataclass
class Crossing:
    d_low: int
    d_high: int
    p: float
    bracket: tuple[float, float]


@dataclass
class ThresholdEstimate:
    family: str
    A: float | str
    value: float
    crossings: list[Crossing]
    curves: dict[int, list[SimulationReport]]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "A": self.A,
            "threshold": self.value,
            "crossings": [asdict(c) for c in self.crossings],
        }


def find_crossing(p_grid: Sequence[float], low: Sequence[float], high: Sequence[float]) -> tuple[float, tuple[float, float]]:
    """First p where the larger-distance curve rises above the smaller one.

    The log ratio of the curves is interpolated linearly between the
    bracketing grid points.
    """
    if len(p_grid) < 2:
        raise NoCrossingError("need at least two grid points")
    floor = 1e-300
    diff = [math.log(max(h, floor)) - math.log(max(l, floor)) for l, h in zip(low, high)]
    for k in range(len(p_grid) - 1):
        a, b = diff[k], diff[k + 1]
        if a < 0 <= b and b > a:
            p0, p1 = p_grid[k], p_grid[k + 1]
            return p0 + (p1 - p0) * (-a) / (b - a), (p0, p1)
    raise NoCrossingError(f"curves do not cross in [{p_grid[0]}, {p_grid[-1]}]")


def threshold(family: str, bias: float, p_grid: Sequence[float], *, distances: Sequence[int] = (3, 5),
              seed: int, shots: int = 4000, workers: int = 1, tie_break: str = "lex") -> ThresholdEstimate:
    """Crossing points of fixed-shot p_L(p) curves for consecutive distances."""
    if len(distances) < 2:
        raise ValueError("need at least two distances")
    grid = sorted(p_grid)
    seeds = derive_seeds(seed, len(distances))
    curves = {}
    for d, s in zip(distances, seeds):
        code = build(family, d, d)
        curves[d] = sweep(code, bias, grid, seed=s, min_failures=shots + 1, max_shots=shots,
                          workers=workers, tie_break=tie_break)
    crossings = []
    for d0, d1 in zip(distances, distances[1:]):
        p, bracket = find_crossing(grid, [r.p_l_hat for r in curves[d0]], [r.p_l_hat for r in curves[d1]])
        crossings.append(Crossing(d0, d1, p, bracket))
    value = sum(c.p for c in crossings) / len(crossings)
    return ThresholdEstimate(family, "inf" if bias == math.inf else float(bias), value, crossings, curves)
