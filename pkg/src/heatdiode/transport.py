"""Steady-state heat currents from the Landauer-type spectral formulas.

Classical:  J_l = sum_m M_lm (T_l - T_m),
            M_lm = (g_l g_m / pi) int dw w^2 |G_lm(w)|^2
Quantum:    J_l = sum_m (g_l g_m / pi) int dw w^3 |G_lm|^2 [n_l(w) - n_m(w)]

Both integrands are even in w, so every integral is taken as twice the
integral over [0, inf). The trapezoid scheme covers [0, omega_max] on a
uniform grid and adds the power-law tail beyond the cutoff with an adaptive
rule. Only pairs of thermostated beads contribute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from .greens import green_columns
from .model import (
    BathSpec,
    ChainSpec,
    EffectiveFrictionSpec,
    QuadratureSpec,
    ValidationError,
    reverse_temperatures,
    swap_affinity,
    validate,
)

CHUNK_ELEMENTS = 2_000_000
ADAPTIVE_EPSREL = 1e-11
ADAPTIVE_LIMIT = 20_000
#: |J~| at or below this fraction of the forward bath currents counts as zero
RATIO_FLOOR = 1e-13


class QuadratureError(ArithmeticError):
    pass


def omega_occupation(omega, temperature: float) -> np.ndarray:
    """w * n(w, T) with n the Bose function; tends to T as w -> 0, zero at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0:
        return np.zeros_like(omega)
    x = omega / temperature
    out = np.full_like(x, temperature)
    small = (x > 0) & (x <= 700)
    out[small] = temperature * x[small] / np.expm1(x[small])
    out[x > 700] = 0.0
    return out


def _pairs(baths: BathSpec) -> list[tuple[int, int]]:
    therm = baths.thermostated
    return [(l, m) for a, l in enumerate(therm) for m in therm[a + 1:]]


def _spectrum(chain: ChainSpec, frictions, pairs, omega: np.ndarray) -> np.ndarray:
    """g_l g_m w^2 |G_lm|^2 / pi for each pair, shape ``(len(pairs), len(omega))``."""
    cols = sorted({m for _, m in pairs})
    index = {m: c for c, m in enumerate(cols)}
    g = green_columns(chain, frictions, omega, cols)
    s = np.empty((len(pairs), omega.size))
    for p, (l, m) in enumerate(pairs):
        s[p] = frictions[l] * frictions[m] / math.pi * omega**2 * np.abs(g[index[m], l]) ** 2
    return s


@dataclass
class _Integrals:
    classical: np.ndarray
    quantum: list[np.ndarray]
    error_estimate: float


def _trapezoid(chain, baths, pairs, quad, temp_sets) -> _Integrals:
    n_pts = quad.points
    h = quad.omega_max / (n_pts - 1)
    frictions = baths.frictions
    therm = baths.thermostated
    slot = {b: i for i, b in enumerate(therm)}
    left = [slot[l] for l, _ in pairs]
    right = [slot[m] for _, m in pairs]
    # free chain: G^{-1}(0) is singular, sample the w -> 0 limit just off the origin
    origin = 0.0 if chain.is_anchored() else 1e-3 * h

    chunk = max(1, CHUNK_ELEMENTS // max(chain.n * max(len(pairs), 1), 1))
    classical = np.zeros(len(pairs))
    coarse = np.zeros(len(pairs))
    quantum = [np.zeros(len(pairs)) for _ in temp_sets]
    for start in range(0, n_pts, chunk):
        j = np.arange(start, min(start + chunk, n_pts))
        omega = j * h
        omega[j == 0] = origin
        w = np.full(j.size, h)
        w[(j == 0) | (j == n_pts - 1)] = 0.5 * h
        s = _spectrum(chain, frictions, pairs, omega)
        sw = s * w
        classical += np.sum(sw, axis=1)
        if (n_pts - 1) % 2 == 0:
            wc = np.where(j % 2 == 0, 2 * h, 0.0)
            wc[(j == 0) | (j == n_pts - 1)] = h
            coarse += np.sum(s * wc, axis=1)
        for q, temps in zip(quantum, temp_sets):
            occ = np.array([omega_occupation(omega, temps[b]) for b in therm])
            q += np.sum(sw * (occ[left] - occ[right]), axis=1)
    if (n_pts - 1) % 2 == 0 and len(pairs):
        scale = np.max(np.abs(classical)) or 1.0
        err = float(np.max(np.abs(classical - coarse)) / 3 / scale)
    else:
        err = math.nan
    # the classical integrand only decays as a power law; add the tail beyond the cutoff
    tail, _ = _vec_quad(chain, baths, pairs, temp_sets, quad.omega_max)
    classical += tail[0]
    for q, t in zip(quantum, tail[1:]):
        q += t
    return _Integrals(2 * classical, [2 * q for q in quantum], err)


def _integrand(chain, baths, pairs, temp_sets):
    """Scalar-frequency integrand stacking the classical and each quantum spectrum."""
    frictions = baths.frictions
    therm = baths.thermostated
    slot = {b: i for i, b in enumerate(therm)}
    left = [slot[l] for l, _ in pairs]
    right = [slot[m] for _, m in pairs]

    def integrand(x):
        omega = np.array([max(x, 1e-12)])
        s = _spectrum(chain, frictions, pairs, omega)[:, 0]
        parts = [s]
        for temps in temp_sets:
            occ = np.array([omega_occupation(omega, temps[b])[0] for b in therm])
            parts.append(s * (occ[left] - occ[right]))
        return np.concatenate(parts)

    return integrand


def _vec_quad(chain, baths, pairs, temp_sets, lower):
    total, err, info = quad_vec(
        _integrand(chain, baths, pairs, temp_sets), lower, np.inf,
        epsrel=ADAPTIVE_EPSREL, limit=ADAPTIVE_LIMIT, full_output=True,
    )
    if not info.success:
        raise QuadratureError(f"adaptive quadrature did not converge: {info.message}")
    return np.split(np.asarray(total), len(temp_sets) + 1), float(err)


def _adaptive(chain, baths, pairs, quad, temp_sets) -> _Integrals:
    parts, err = _vec_quad(chain, baths, pairs, temp_sets, 0.0)
    scale = np.max(np.abs(parts[0])) or 1.0
    return _Integrals(2 * parts[0], [2 * p for p in parts[1:]], err / scale)


def _integrate(chain, baths, quad, temp_sets=()) -> tuple[list, _Integrals]:
    pairs = _pairs(baths)
    if not pairs:
        return pairs, _Integrals(np.zeros(0), [np.zeros(0) for _ in temp_sets], 0.0)
    if quad.scheme == "adaptive":
        return pairs, _adaptive(chain, baths, pairs, quad, temp_sets)
    return pairs, _trapezoid(chain, baths, pairs, quad, temp_sets)


def _antisymmetric(n: int, pairs, values) -> np.ndarray:
    out = np.zeros((n, n))
    for (l, m), v in zip(pairs, values):
        out[l, m] = v
        out[m, l] = -v
    return out


@dataclass(frozen=True)
class TransmissionMatrix:
    """Symmetric matrix of M_lm; zero on the diagonal and for unthermostated beads."""

    values: np.ndarray
    quad: QuadratureSpec
    error_estimate: float = math.nan

    def __getitem__(self, pair: tuple[int, int]) -> float:
        return float(self.values[pair])


@dataclass
class CurrentReport:
    regime: str
    per_bath: dict[int, float]
    total_forward: float
    hot_set: tuple[int, ...]
    cold_set: tuple[int, ...]
    per_bath_reverse: dict[int, float] | None = None
    total_reverse: float | None = None
    delta: float | None = None
    ratio: float | None = None
    ratio_unbounded: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def cold_total(self) -> float:
        """Heat delivered to the cold baths; equals ``total_forward`` in steady state."""
        return -sum(self.per_bath[i] for i in self.cold_set)

    @property
    def conservation_residual(self) -> float:
        residuals = [_residual(self.per_bath)]
        if self.per_bath_reverse is not None:
            residuals.append(_residual(self.per_bath_reverse))
        return max(residuals)

    @property
    def rectification(self) -> float | None:
        """max(R, 1/R), the orientation-free ratio used for contour maps."""
        if self.ratio is None:
            return None
        if self.ratio_unbounded or self.ratio == 0:
            return math.inf
        return max(self.ratio, 1.0 / self.ratio)


def _residual(per_bath: dict[int, float]) -> float:
    scale = sum(abs(v) for v in per_bath.values())
    return abs(sum(per_bath.values())) / scale if scale else 0.0


def _currents(n: int, therm, temps, mat: np.ndarray) -> dict[int, float]:
    """J_l = sum_m mat[l, m] * (T_l - T_m); ``mat`` symmetric."""
    t = np.asarray(temps)
    return {l: float(sum(mat[l, m] * (t[l] - t[m]) for m in therm if m != l)) for l in therm}


def _report(regime, baths, per_bath) -> CurrentReport:
    total = float(sum(per_bath[i] for i in baths.hot_set))
    return CurrentReport(regime, per_bath, total, baths.hot_set, baths.cold_set)


def _complete(report: CurrentReport, per_bath_rev: dict[int, float]) -> CurrentReport:
    j, jr = report.total_forward, float(sum(per_bath_rev[i] for i in report.hot_set))
    report.per_bath_reverse = per_bath_rev
    report.total_reverse = jr
    report.delta = j + jr
    scale = sum(abs(v) for v in report.per_bath.values())
    if abs(jr) <= RATIO_FLOOR * scale or jr == 0:
        report.ratio = math.inf if j != 0 else math.nan
        report.ratio_unbounded = True
    else:
        report.ratio = abs(j / jr)
    return report


def compute_M(chain: ChainSpec, baths: BathSpec, quad: QuadratureSpec | None = None) -> TransmissionMatrix:
    validate(chain, baths)
    quad = (quad or QuadratureSpec()).resolve(chain)
    pairs, ints = _integrate(chain, baths, quad)
    values = np.abs(_antisymmetric(chain.n, pairs, ints.classical))
    return TransmissionMatrix(values, quad, ints.error_estimate)


def classical_currents(M: TransmissionMatrix, baths: BathSpec) -> CurrentReport:
    per_bath = _currents(len(baths.frictions), baths.thermostated, baths.temperatures, M.values)
    return _report("classical", baths, per_bath)


def _quantum_per_bath(n, therm, pairs, q) -> dict[int, float]:
    mat = _antisymmetric(n, pairs, q)
    return {l: float(sum(mat[l, m] for m in therm if m != l)) for l in therm}


def quantum_currents(chain: ChainSpec, baths: BathSpec, quad: QuadratureSpec | None = None) -> CurrentReport:
    validate(chain, baths)
    quad = (quad or QuadratureSpec()).resolve(chain)
    pairs, ints = _integrate(chain, baths, quad, [baths.temperatures])
    per_bath = _quantum_per_bath(chain.n, baths.thermostated, pairs, ints.quantum[0])
    report = _report("quantum", baths, per_bath)
    report.extras["error_estimate"] = ints.error_estimate
    return report


def reversed_baths(baths: BathSpec, reversal: str = "mirror") -> BathSpec:
    """Temperature profile for the backward direction.

    ``mirror`` swaps bead i with bead n-1-i and requires a mirror-symmetric set
    of thermostated beads. ``swap`` exchanges the hot and cold temperatures of a
    single-affinity layout and works for any partition.
    """
    if reversal == "swap":
        return swap_affinity(baths)
    if reversal != "mirror":
        raise ValueError(f"unknown reversal {reversal!r}")
    n = len(baths.frictions)
    therm = set(baths.thermostated)
    if therm != {n - 1 - i for i in therm}:
        raise ValidationError(["mirror reversal needs a mirror-symmetric set of thermostated beads"])
    return reverse_temperatures(baths, n)


def rectification(
    chain: ChainSpec,
    baths: BathSpec,
    quad: QuadratureSpec | None = None,
    regime: str = "classical",
    reversal: str = "mirror",
) -> CurrentReport:
    """Forward and backward currents, delta J = J + J~ and R = |J / J~|.

    Both directions share one pass over the frequency grid: M_lm in the
    classical regime, and |G_lm|^2 with two sets of occupation factors in the
    quantum one.
    """
    validate(chain, baths)
    quad = (quad or QuadratureSpec()).resolve(chain)
    back = reversed_baths(baths, reversal)
    therm = baths.thermostated
    if regime == "classical":
        pairs, ints = _integrate(chain, baths, quad)
        mat = np.abs(_antisymmetric(chain.n, pairs, ints.classical))
        fwd = _currents(chain.n, therm, baths.temperatures, mat)
        rev = _currents(chain.n, therm, back.temperatures, mat)
    elif regime == "quantum":
        pairs, ints = _integrate(chain, baths, quad, [baths.temperatures, back.temperatures])
        fwd = _quantum_per_bath(chain.n, therm, pairs, ints.quantum[0])
        rev = _quantum_per_bath(chain.n, therm, pairs, ints.quantum[1])
    else:
        raise ValueError(f"unknown regime {regime!r}")
    report = _complete(_report(regime, baths, fwd), rev)
    report.extras["error_estimate"] = ints.error_estimate
    return report


def zone_size(baths: BathSpec, n: int) -> int:
    """Beads per thermostated zone for an edge layout, else ValidationError."""
    nb = len(baths.hot_set)
    if (
        baths.hot_set != tuple(range(nb))
        or baths.cold_set != tuple(range(n - nb, n))
        or 2 * nb > n
    ):
        raise ValidationError(["layout must be beads 0..NB-1 hot and n-NB..n-1 cold"])
    return nb


def delta_j_closed_form(M: TransmissionMatrix, baths: BathSpec) -> float:
    """Classical delta J from M alone, for NB hot edge beads and NB cold edge beads.

    delta J = sum_i sum_{j != i} [(T_i - T_j) + (T'_i - T'_j)] M_{i, j'}
    with i' = n - 1 - i the mirror bead. For NB = 2 this reduces to
    [(T_1 - T_2) - (T_4 - T_5)] (M_14 - M_25) on five beads.
    """
    n = len(baths.frictions)
    nb = zone_size(baths, n)
    t = baths.temperatures
    total = 0.0
    for i in range(nb):
        for j in range(nb):
            if i == j:
                continue
            total += ((t[i] - t[j]) + (t[n - 1 - i] - t[n - 1 - j])) * M[i, n - 1 - j]
    return total


def effective_diode(
    chain: ChainSpec,
    eff: EffectiveFrictionSpec,
    t_hot: float,
    t_cold: float,
    quad: QuadratureSpec | None = None,
    regime: str = "classical",
) -> CurrentReport:
    """Two-bath chain whose end frictions depend on the attached bath temperature.

    Only the first and last beads are thermostated. Each direction gets its
    own Green's function because the frictions change with the bias.
    """
    n = chain.n
    base = eff.base_frictions
    if len(base) != n or any(g > 0 for g in base[1:-1]) or base[0] <= 0 or base[-1] <= 0:
        raise ValidationError(["effective diode needs frictions on the two end beads only"])
    bias = t_hot - t_cold

    def run(first_hot: bool) -> dict[int, float]:
        frictions = [0.0] * n
        frictions[0] = eff.friction(0, first_hot, bias)
        frictions[-1] = eff.friction(n - 1, not first_hot, bias)
        if frictions[0] <= 0 or frictions[-1] <= 0:
            raise ValidationError([f"temperature-dependent friction is not positive: {frictions[0]}, {frictions[-1]}"])
        temps = [0.0] * n
        temps[0], temps[-1] = (t_hot, t_cold) if first_hot else (t_cold, t_hot)
        baths = BathSpec(frictions, temps, [0], [n - 1])
        if regime == "classical":
            return classical_currents(compute_M(chain, baths, quad), baths).per_bath
        if regime == "quantum":
            return quantum_currents(chain, baths, quad).per_bath
        raise ValueError(f"unknown regime {regime!r}")

    fwd = run(True)
    layout = BathSpec([base[0]] + [0.0] * (n - 2) + [base[-1]], [t_hot] + [0.0] * (n - 2) + [t_cold], [0], [n - 1])
    return _complete(_report(regime, layout, fwd), run(False))
