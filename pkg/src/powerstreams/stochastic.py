"""Continuous-time exclusion-process random walk on a 1-D lattice.

Each agent attempts a move at rate ``Pm``; the direction is left or right
with probability 1/2.  A move onto an occupied site, or off the lattice
under no-flux boundaries, is aborted, but the waiting time still elapses.
Replicate ``r`` draws from its own PCG64 stream keyed by ``(seed, r)``, and
ensemble counts are summed as integers, so results do not depend on how
replicates are scheduled.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lattice import Boundary

__all__ = ["SimConfig", "EnsembleResult", "replicate_rng", "run_replicate", "ensemble_average"]

RNG_DESCRIPTION = "numpy PCG64, SeedSequence(seed, spawn_key=(replicate,))"
_CHUNK = 512


@dataclass(frozen=True)
class SimConfig:
    N: int
    Pm: float
    bc: Boundary
    initial_occupied: tuple
    record_times: tuple
    replicates: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bc", Boundary(self.bc))
        occ = tuple(int(i) for i in self.initial_occupied)
        times = tuple(float(t) for t in self.record_times)
        object.__setattr__(self, "initial_occupied", occ)
        object.__setattr__(self, "record_times", times)
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.Pm < 0:
            raise ValueError("Pm must be non-negative")
        if len(set(occ)) != len(occ):
            raise ValueError("occupied sites must be distinct")
        if any(i < 0 or i >= self.N for i in occ):
            raise ValueError(f"occupied sites must lie in [0, {self.N - 1}]")
        if any(t < 0 for t in times) or list(times) != sorted(times):
            raise ValueError("record_times must be sorted and non-negative")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class EnsembleResult:
    times: np.ndarray
    occupancy: np.ndarray  # (len(times), N) frequencies
    replicates: int
    stderr: np.ndarray
    metadata: dict = field(default_factory=dict)


def replicate_rng(seed, r):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(r,))))


def run_replicate(cfg, rng, track_displacement=False, check_exclusion=False):
    """Simulate one trajectory and snapshot it at ``cfg.record_times``.

    Returns a ``(len(record_times), N)`` boolean array; with
    ``track_displacement`` also the unwrapped net displacement of every
    agent at each record time.
    """
    N, n_rec = cfg.N, len(cfg.record_times)
    n_agents = len(cfg.initial_occupied)
    rate = n_agents * cfg.Pm
    periodic = cfg.bc is Boundary.PERIODIC
    positions = list(cfg.initial_occupied)
    occupied = [False] * N
    for i in positions:
        occupied[i] = True
    moved = [0] * n_agents
    snaps = np.zeros((n_rec, N), dtype=bool)
    disp = np.zeros((n_rec, n_agents), dtype=np.int64)

    def draw():
        return (
            rng.exponential(1.0 / rate, _CHUNK).tolist(),
            rng.integers(0, n_agents, _CHUNK).tolist(),
            (2 * rng.integers(0, 2, _CHUNK) - 1).tolist(),
        )

    next_t = np.inf
    k = 0
    if rate > 0:
        waits, agents, steps = draw()
        next_t = waits[0]

    for r_i, t_rec in enumerate(cfg.record_times):
        while next_t <= t_rec:
            t = next_t
            a, step = agents[k], steps[k]
            src = positions[a]
            dst = src + step
            if periodic:
                dst %= N
            if 0 <= dst < N and not occupied[dst]:
                occupied[src] = False
                occupied[dst] = True
                positions[a] = dst
                moved[a] += step
            if check_exclusion and sum(occupied) != n_agents:
                raise AssertionError("exclusion violated")
            k += 1
            if k == _CHUNK:
                waits, agents, steps = draw()
                k = 0
            next_t = t + waits[k]
        snaps[r_i] = occupied
        disp[r_i] = moved
    if track_displacement:
        return snaps, disp
    return snaps


def _count_block(cfg, lo, hi):
    counts = np.zeros((len(cfg.record_times), cfg.N), dtype=np.int64)
    for r in range(lo, hi):
        counts += run_replicate(cfg, replicate_rng(cfg.seed, r))
    return counts


def ensemble_average(cfg, workers=None):
    """Occupancy frequency per site and record time over ``cfg.replicates`` runs.

    ``workers`` > 1 spreads replicate blocks over processes; the integer
    counts are summed so the result is identical for any worker count.
    """
    R = cfg.replicates
    workers = workers or int(os.environ.get("POWERSTREAMS_WORKERS", "1"))
    if workers <= 1 or R < 2 * workers:
        counts = _count_block(cfg, 0, R)
    else:
        edges = np.linspace(0, R, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_count_block, [cfg] * workers, edges[:-1], edges[1:])
            counts = sum(parts)
    freq = counts / R
    se = np.sqrt(freq * (1 - freq) / max(R - 1, 1))
    return EnsembleResult(
        times=np.array(cfg.record_times),
        occupancy=freq,
        replicates=R,
        stderr=se,
        metadata={"rng": RNG_DESCRIPTION, "seed": cfg.seed, "workers": workers},
    )
