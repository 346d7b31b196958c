"""Classical Langevin dynamics of the chain with the BBK integrator.

Coordinates are displacements u_i = x_i - i a from the lattice sites, so the
walls sit at u = 0. One BBK step with random force R_i (variance
2 g_i T_i / dt, i.e. impulse variance 2 g_i T_i dt) reads

    v <- v + dt/(2m) (F(u) - g v + R_n)
    u <- u + dt v
    draw R_{n+1}
    v <- (v + dt/(2m) (F(u) + R_{n+1})) / (1 + g dt / (2m))

and R_{n+1} is reused in the first half-kick of the next step. Beads with
g = 0 reduce to velocity Verlet.

Noise streams: realization r of stream s draws from
``default_rng(SeedSequence(base_seed, spawn_key=(s, r)))``; forward runs use
stream 0 and temperature-reversed runs stream 1. Noise is drawn in blocks of
``chunk_steps`` rows of shape (thermostated beads,), so results do not depend
on the block size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .model import BathSpec, ChainSpec, validate


class IntegrationBlowup(ArithmeticError):
    def __init__(self, step: int):
        self.step = step
        super().__init__(f"non-finite state at step {step}")


@dataclass(frozen=True)
class FKPotentialSpec:
    """Onsite Frenkel-Kontorova potential, q = 2 pi / period.

    ``form="cosine"``:      V_i cos(q u_i + phase)
    ``form="normalized"``:  (V_i / q^2) (1 - cos(q u_i + phase)), curvature V_i
    at the minimum when phase = 0.
    """

    amplitudes: tuple[float, ...]
    period: float = 1.0
    phase: float = 0.0
    form: str = "cosine"

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(v) for v in self.amplitudes))
        if not all(math.isfinite(v) and v >= 0 for v in self.amplitudes):
            raise ValueError("FK amplitudes must be finite and >= 0")
        if not self.period > 0:
            raise ValueError("FK period must be positive")
        if self.form not in ("cosine", "normalized"):
            raise ValueError(f"unknown FK form {self.form!r}")

    @classmethod
    def split(cls, n: int, v_left: float, v_right: float, n_left: int = 2, **kwargs) -> "FKPotentialSpec":
        """``v_left`` on the first ``n_left`` beads, ``v_right`` on the rest."""
        return cls([v_left] * n_left + [v_right] * (n - n_left), **kwargs)

    def cosine_terms(self) -> tuple[np.ndarray, float, float]:
        """(amplitudes, q, phase) of the equivalent ``A cos(q u + phase)`` form."""
        q = 2 * math.pi / self.period
        amp = np.asarray(self.amplitudes, dtype=float)
        if self.form == "normalized":
            return amp / q**2, q, self.phase + math.pi
        return amp, q, self.phase


@dataclass(frozen=True)
class MDConfig:
    dt: float = 0.005
    equilibration_steps: int = 2_000_000
    production_steps: int = 10_000_000
    realizations: int = 16
    base_seed: int = 0
    measure_bond: tuple[int, int] | None = None
    chunk_steps: int = 100_000

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.production_steps < 1 or self.realizations < 1 or self.equilibration_steps < 0:
            raise ValueError("need production_steps >= 1, realizations >= 1, equilibration_steps >= 0")
        if self.measure_bond is not None:
            i, j = self.measure_bond
            if j != i + 1:
                raise ValueError("measure_bond must be a nearest-neighbour pair (i, i + 1)")

    def bond(self, n: int) -> tuple[int, int]:
        if self.measure_bond is not None:
            return tuple(self.measure_bond)
        i = max(0, (n - 2) // 2)
        return (i, i + 1)


@dataclass
class MDResult:
    mean_current: float
    stderr: float
    per_realization: list[float]
    trajectory_meta: dict
    bond_currents: np.ndarray = field(repr=False)
    mean_square_velocity: np.ndarray = field(repr=False)
    window_currents: np.ndarray = field(repr=False)
    trajectory: np.ndarray | None = field(default=None, repr=False)


@dataclass
class MDState:
    u: np.ndarray
    v: np.ndarray
    force: np.ndarray
    random_force: np.ndarray
    step: int = 0


def _params(chain: ChainSpec, fk: FKPotentialSpec | None):
    n = chain.n
    if fk is None:
        amp, q, phase = np.zeros(n), 2 * math.pi / chain.spacing, 0.0
    else:
        if len(fk.amplitudes) != n:
            raise ValueError(f"FK spec has {len(fk.amplitudes)} amplitudes for {n} beads")
        amp, q, phase = fk.cosine_terms()
    return (
        np.asarray(chain.springs, dtype=float),
        np.asarray(chain.pinning, dtype=float),
        amp.astype(float),
        float(q),
        float(phase),
    )


@njit(cache=True, nogil=True)
def _force(u, springs, pinning, amp, q, phase, out):
    n = u.shape[0]
    for i in range(n):
        left = u[i - 1] if i > 0 else 0.0
        right = u[i + 1] if i < n - 1 else 0.0
        out[i] = (
            -springs[i] * (u[i] - left)
            + springs[i + 1] * (right - u[i])
            - pinning[i] * u[i]
            + amp[i] * q * math.sin(q * u[i] + phase)
        )


def force(chain: ChainSpec, fk: FKPotentialSpec | None, positions) -> np.ndarray:
    """Deterministic force on each bead for displacements ``positions``."""
    springs, pinning, amp, q, phase = _params(chain, fk)
    out = np.empty(chain.n)
    _force(np.asarray(positions, dtype=float), springs, pinning, amp, q, phase, out)
    return out


@njit(cache=True, nogil=True)
def _advance(u, v, f, rf, noise, therm, sigma, inv_m, gamma, springs, pinning, amp, q, phase, dt,
             bond_sums, v2_sums, measure):
    """Run ``noise.shape[0]`` BBK steps in place; returns the first bad step or -1."""
    n = u.shape[0]
    half = 0.5 * dt
    for s in range(noise.shape[0]):
        for i in range(n):
            v[i] += half * inv_m[i] * (f[i] - gamma[i] * v[i] + rf[i])
            u[i] += dt * v[i]
        _force(u, springs, pinning, amp, q, phase, f)
        for a in range(therm.shape[0]):
            rf[therm[a]] = sigma[a] * noise[s, a]
        for i in range(n):
            v[i] = (v[i] + half * inv_m[i] * (f[i] + rf[i])) / (1.0 + half * gamma[i] * inv_m[i])
        if not math.isfinite(u[0] + v[0] + u[n - 1] + v[n - 1]):
            return s
        if measure:
            for i in range(n - 1):
                bond_sums[i] += 0.5 * springs[i + 1] * (v[i] + v[i + 1]) * (u[i] - u[i + 1])
            for i in range(n):
                v2_sums[i] += v[i] * v[i]
    return -1


class _Integrator:
    def __init__(self, chain: ChainSpec, fk: FKPotentialSpec | None, baths: BathSpec, dt: float):
        self.n = chain.n
        self.dt = dt
        self.springs, self.pinning, self.amp, self.q, self.phase = _params(chain, fk)
        self.inv_m = 1.0 / np.asarray(chain.masses)
        self.gamma = np.asarray(baths.frictions, dtype=float)
        self.therm = np.array(baths.thermostated, dtype=np.int64)
        t = np.asarray(baths.temperatures)[self.therm]
        self.sigma = np.sqrt(2.0 * self.gamma[self.therm] * t / dt)

    def initial_state(self, rng) -> MDState:
        u, v = np.zeros(self.n), np.zeros(self.n)
        f = np.empty(self.n)
        _force(u, self.springs, self.pinning, self.amp, self.q, self.phase, f)
        rf = np.zeros(self.n)
        rf[self.therm] = self.sigma * rng.standard_normal(self.therm.size)
        return MDState(u, v, f, rf)

    def advance(self, state: MDState, noise, bond_sums=None, v2_sums=None):
        measure = bond_sums is not None
        if not measure:
            bond_sums, v2_sums = np.zeros(self.n - 1), np.zeros(self.n)
        bad = _advance(state.u, state.v, state.force, state.random_force, noise, self.therm, self.sigma,
                       self.inv_m, self.gamma, self.springs, self.pinning, self.amp, self.q, self.phase,
                       self.dt, bond_sums, v2_sums, measure)
        if bad >= 0:
            raise IntegrationBlowup(state.step + bad)
        state.step += noise.shape[0]


def bbk_step(state: MDState, chain: ChainSpec, fk: FKPotentialSpec | None, baths: BathSpec, dt: float, rng) -> MDState:
    """Advance ``state`` by one BBK step in place and return it."""
    integ = _Integrator(chain, fk, baths, dt)
    integ.advance(state, rng.standard_normal((1, integ.therm.size)))
    return state


def initial_state(chain: ChainSpec, fk, baths: BathSpec, dt: float, rng) -> MDState:
    return _Integrator(chain, fk, baths, dt).initial_state(rng)


def measure_current(positions, velocities, chain: ChainSpec, bond: tuple[int, int]) -> float:
    """Time-averaged power through bond (i, i + 1), positive from left to right.

    ``positions`` are displacements from the lattice sites, shape (steps, n).
    The estimator is -(k/2) (v_i + v_{i+1}) (x_{i+1} - x_i - a).
    """
    u = np.atleast_2d(np.asarray(positions, dtype=float))
    v = np.atleast_2d(np.asarray(velocities, dtype=float))
    if u.shape[0] == 0 or u.size == 0:
        raise ValueError("empty trajectory window")
    i, j = bond
    if j != i + 1:
        raise ValueError("bond must be (i, i + 1)")
    k = chain.springs[j]
    return float(np.mean(0.5 * k * (v[:, i] + v[:, j]) * (u[:, i] - u[:, j])))


def _realization(integ: _Integrator, md: MDConfig, seed_seq, dump_every):
    rng = np.random.default_rng(seed_seq)
    state = integ.initial_state(rng)
    nt = integ.therm.size
    left = md.equilibration_steps
    while left > 0:
        steps = min(md.chunk_steps, left)
        integ.advance(state, rng.standard_normal((steps, nt)))
        left -= steps

    bond_sums = np.zeros(integ.n - 1)
    v2_sums = np.zeros(integ.n)
    windows = []
    frames = []
    block = md.chunk_steps if not dump_every else min(md.chunk_steps, dump_every)
    left = md.production_steps
    while left > 0:
        steps = min(block, left)
        before = bond_sums.copy()
        integ.advance(state, rng.standard_normal((steps, nt)), bond_sums, v2_sums)
        windows.append((bond_sums - before) / steps)
        if dump_every and (state.step - md.equilibration_steps) % dump_every == 0:
            frames.append((state.step, state.u.copy(), state.v.copy()))
        left -= steps
    return bond_sums / md.production_steps, v2_sums / md.production_steps, np.array(windows), frames


def run_md(
    chain: ChainSpec,
    baths: BathSpec,
    fk: FKPotentialSpec | None,
    md: MDConfig,
    stream: int = 0,
    workers: int = 1,
    dump_every: int | None = None,
) -> MDResult:
    """Steady-state bond currents averaged over time and noise realizations."""
    validate(chain, baths)
    if chain.n < 2:
        raise ValueError("need at least two beads to measure a bond current")
    integ = _Integrator(chain, fk, baths, md.dt)
    seeds = [np.random.SeedSequence(md.base_seed, spawn_key=(stream, r)) for r in range(md.realizations)]

    def one(args):
        r, seq = args
        return _realization(integ, md, seq, dump_every if r == 0 else None)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, enumerate(seeds)))
    else:
        results = [one(a) for a in enumerate(seeds)]

    bond = md.bond(chain.n)
    bonds = np.array([res[0] for res in results])
    per = [float(b[bond[0]]) for b in bonds]
    windows = np.array([res[2][:, bond[0]] for res in results])
    mean = float(np.mean(per))
    if len(per) > 1:
        stderr = float(np.std(per, ddof=1) / math.sqrt(len(per)))
    else:
        w = windows[0]
        stderr = float(np.std(w, ddof=1) / math.sqrt(w.size)) if w.size > 1 else 0.0

    trajectory = None
    frames = results[0][3]
    if frames:
        trajectory = np.array([(step, b, u[b], v[b]) for step, u, v in frames for b in range(chain.n)])
    meta = {
        "dt": md.dt,
        "equilibration_steps": md.equilibration_steps,
        "production_steps": md.production_steps,
        "realizations": md.realizations,
        "base_seed": md.base_seed,
        "stream": stream,
        "bond": bond,
    }
    return MDResult(mean, stderr, per, meta, bonds, np.array([res[1] for res in results]), windows, trajectory)


def ratio_with_error(forward: MDResult, reverse: MDResult) -> tuple[float, float]:
    j, jr = forward.mean_current, reverse.mean_current
    r = abs(j / jr)
    err = r * math.hypot(forward.stderr / j, reverse.stderr / jr)
    return r, err


def run_fk_rectification(
    chain: ChainSpec,
    fk: FKPotentialSpec | None,
    t_hot: float,
    t_cold: float,
    md: MDConfig,
    gamma: float = 1.0,
    workers: int = 1,
):
    """Forward and reversed two-bath runs with baths on the end beads only.

    Returns ``(forward, reverse, R, R_err)`` with R = |J / J~|.
    """
    n = chain.n
    fwd_baths = BathSpec.edges(n, [t_hot], [t_cold], gamma=gamma)
    rev_baths = BathSpec.edges(n, [t_cold], [t_hot], gamma=gamma)
    forward = run_md(chain, fwd_baths, fk, md, stream=0, workers=workers)
    reverse = run_md(chain, rev_baths, fk, md, stream=1, workers=workers)
    r, err = ratio_with_error(forward, reverse)
    return forward, reverse, r, err
