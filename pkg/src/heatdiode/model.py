"""Chain, bath and quadrature specifications.

Beads are indexed from 0 in the Python API. Spring ``k[i]`` couples bead
``i - 1`` to bead ``i``; ``k[0]`` and ``k[n]`` attach the end beads to the
fixed walls. Units are natural (hbar = k_B = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

#: minimum ratio between the integration cutoff and the largest bead frequency
CUTOFF_FACTOR = 10.0
DEFAULT_POINTS = 200_001


class ValidationError(ValueError):
    """Raised when a model violates one or more invariants.

    ``errors`` lists every violation found, not only the first.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ChainSpec:
    masses: tuple[float, ...]
    springs: tuple[float, ...]
    pinning: tuple[float, ...] = ()
    spacing: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "masses", _floats(self.masses))
        object.__setattr__(self, "springs", _floats(self.springs))
        pinning = self.pinning if len(self.pinning) else [0.0] * len(self.masses)
        object.__setattr__(self, "pinning", _floats(pinning))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def n(self) -> int:
        return len(self.masses)

    @classmethod
    def from_springs(cls, springs, masses=None, pinning=None, spacing=1.0) -> "ChainSpec":
        """Chain with unit masses unless given; ``len(springs)`` must be n + 1."""
        n = len(springs) - 1
        return cls(
            masses=masses if masses is not None else [1.0] * n,
            springs=springs,
            pinning=pinning if pinning is not None else [0.0] * n,
            spacing=spacing,
        )

    @classmethod
    def uniform(cls, n: int, k: float = 1.0, mass: float = 1.0, pinning=None) -> "ChainSpec":
        return cls.from_springs([k] * (n + 1), masses=[mass] * n, pinning=pinning)

    def stiffness(self) -> np.ndarray:
        """Real symmetric stiffness matrix, walls and pinning included."""
        k = np.asarray(self.springs)
        diag = k[:-1] + k[1:] + np.asarray(self.pinning)
        mat = np.diag(diag)
        off = -k[1:-1]
        mat += np.diag(off, 1) + np.diag(off, -1)
        return mat

    def frequency_scale(self) -> float:
        """Largest single-bead frequency sqrt((k_{i-1} + k_i + pin_i) / m_i)."""
        k = np.asarray(self.springs)
        diag = k[:-1] + k[1:] + np.asarray(self.pinning)
        return float(np.sqrt(np.max(diag / np.asarray(self.masses))))

    def is_anchored(self) -> bool:
        return self.springs[0] > 0 or self.springs[-1] > 0 or any(p > 0 for p in self.pinning)


@dataclass(frozen=True)
class BathSpec:
    """Per-bead Langevin baths.

    A friction of zero marks an interior bead; its temperature is ignored.
    """

    frictions: tuple[float, ...]
    temperatures: tuple[float, ...]
    hot_set: tuple[int, ...]
    cold_set: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "frictions", _floats(self.frictions))
        object.__setattr__(self, "temperatures", _floats(self.temperatures))
        object.__setattr__(self, "hot_set", tuple(int(i) for i in self.hot_set))
        object.__setattr__(self, "cold_set", tuple(int(i) for i in self.cold_set))

    @property
    def thermostated(self) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.frictions) if g > 0)

    @classmethod
    def edges(cls, n: int, hot_temps, cold_temps, gamma: float = 1.0) -> "BathSpec":
        """Hot baths on the first beads, cold baths on the last ones.

        ``hot_temps`` are listed from bead 0 inward and ``cold_temps`` from the
        innermost cold bead out to bead n - 1, so ``edges(5, [1, .5], [.2, .1])``
        gives T = (1, .5, -, .2, .1).
        """
        nh, nc = len(hot_temps), len(cold_temps)
        if nh + nc > n:
            raise ValidationError([f"{nh} hot + {nc} cold baths do not fit on {n} beads"])
        frictions = [0.0] * n
        temps = [0.0] * n
        hot = list(range(nh))
        cold = list(range(n - nc, n))
        for i, t in zip(hot, hot_temps):
            frictions[i], temps[i] = gamma, t
        for i, t in zip(cold, cold_temps):
            frictions[i], temps[i] = gamma, t
        return cls(frictions, temps, hot, cold)

    def with_temperatures(self, temperatures) -> "BathSpec":
        return replace(self, temperatures=_floats(temperatures))

    def with_frictions(self, frictions) -> "BathSpec":
        return replace(self, frictions=_floats(frictions))


@dataclass(frozen=True)
class QuadratureSpec:
    """Frequency grid for the spectral integrals.

    ``omega_max=None`` picks ``CUTOFF_FACTOR`` times the chain frequency scale.
    """

    omega_max: float | None = None
    points: int = DEFAULT_POINTS
    scheme: str = "trapezoid"

    def resolve(self, chain: ChainSpec) -> "QuadratureSpec":
        """Return a copy with a concrete cutoff, checking it is large enough."""
        floor = CUTOFF_FACTOR * chain.frequency_scale()
        errors = []
        if self.scheme not in ("trapezoid", "adaptive"):
            errors.append(f"unknown quadrature scheme {self.scheme!r}")
        if self.points < 2:
            errors.append(f"need at least 2 grid points, got {self.points}")
        omega_max = floor if self.omega_max is None else float(self.omega_max)
        if omega_max < floor * (1 - 1e-12):
            errors.append(f"omega_max={omega_max:g} is below {CUTOFF_FACTOR:g} x frequency scale ({floor:g})")
        if errors:
            raise ValidationError(errors)
        return replace(self, omega_max=omega_max)


@dataclass(frozen=True)
class EffectiveFrictionSpec:
    """End-bead frictions that grow linearly with the attached bath's bias.

    The bead held at the hotter temperature gets ``gamma + slope * (T_H - T_C)``
    and the colder one ``gamma - slope * (T_H - T_C)``.
    """

    base_frictions: tuple[float, ...]
    slope: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "base_frictions", _floats(self.base_frictions))
        object.__setattr__(self, "slope", float(self.slope))

    def friction(self, bead: int, hot: bool, bias: float) -> float:
        sign = 1.0 if hot else -1.0
        return self.base_frictions[bead] + sign * self.slope * bias


@dataclass(frozen=True)
class Model:
    """A chain together with its baths, known to satisfy every invariant."""

    chain: ChainSpec
    baths: BathSpec

    @property
    def n(self) -> int:
        return self.chain.n


def check(chain: ChainSpec, baths: BathSpec) -> list[str]:
    """Return the list of invariant violations (empty when valid)."""
    errors = []
    n = chain.n
    if n < 1:
        errors.append("chain needs at least one bead")
    if len(chain.springs) != n + 1:
        errors.append(f"expected {n + 1} spring constants for {n} beads, got {len(chain.springs)}")
    if len(chain.pinning) != n:
        errors.append(f"expected {n} pinning constants, got {len(chain.pinning)}")
    for name, values in (("friction", baths.frictions), ("temperature", baths.temperatures)):
        if len(values) != n:
            errors.append(f"expected {n} {name} values, got {len(values)}")
    if errors:
        return errors

    for i, m in enumerate(chain.masses):
        if not (math.isfinite(m) and m > 0):
            errors.append(f"mass of bead {i} must be positive, got {m}")
    for i, k in enumerate(chain.springs):
        if not (math.isfinite(k) and k >= 0):
            errors.append(f"spring {i} must be finite and >= 0, got {k}")
    for i, p in enumerate(chain.pinning):
        if not (math.isfinite(p) and p >= 0):
            errors.append(f"pinning of bead {i} must be finite and >= 0, got {p}")
    if not (math.isfinite(chain.spacing) and chain.spacing > 0):
        errors.append(f"spacing must be positive, got {chain.spacing}")
    for i, g in enumerate(baths.frictions):
        if not (math.isfinite(g) and g >= 0):
            errors.append(f"friction of bead {i} must be finite and >= 0, got {g}")
    for i, t in enumerate(baths.temperatures):
        if not (math.isfinite(t) and t >= 0):
            errors.append(f"temperature of bead {i} must be finite and >= 0, got {t}")

    hot, cold = set(baths.hot_set), set(baths.cold_set)
    if not hot:
        errors.append("hot set is empty")
    if not cold:
        errors.append("cold set is empty")
    if len(hot) != len(baths.hot_set) or len(cold) != len(baths.cold_set):
        errors.append("hot/cold sets contain duplicates")
    if hot & cold:
        errors.append(f"beads {sorted(hot & cold)} are in both hot and cold sets")
    for i in sorted(hot | cold):
        if not 0 <= i < n:
            errors.append(f"bath index {i} out of range for {n} beads")
        elif baths.frictions[i] <= 0:
            errors.append(f"bead {i} is in a bath set but has zero friction")
    missing = set(baths.thermostated) - hot - cold
    if missing:
        errors.append(f"thermostated beads {sorted(missing)} are in neither hot nor cold set")

    if not errors and chain.is_anchored():
        try:
            np.linalg.cholesky(chain.stiffness())
        except np.linalg.LinAlgError:
            errors.append("stiffness matrix is not positive definite (mechanically unstable chain)")
    return errors


def validate(chain: ChainSpec, baths: BathSpec) -> Model:
    errors = check(chain, baths)
    if errors:
        raise ValidationError(errors)
    return Model(chain, baths)


def reverse_temperatures(baths: BathSpec, n: int | None = None) -> BathSpec:
    """Mirror the temperature profile: bead i takes the temperature of bead n-1-i.

    Frictions and the hot/cold sets are left untouched.
    """
    n = len(baths.temperatures) if n is None else n
    if n != len(baths.temperatures):
        raise ValidationError([f"bath spec has {len(baths.temperatures)} beads, not {n}"])
    return baths.with_temperatures(baths.temperatures[::-1])


def swap_affinity(baths: BathSpec) -> BathSpec:
    """Exchange the hot and cold temperatures of a single-affinity layout."""
    t = baths.temperatures
    hot_t = {t[i] for i in baths.hot_set}
    cold_t = {t[i] for i in baths.cold_set}
    if len(hot_t) != 1 or len(cold_t) != 1:
        raise ValidationError(["swap_affinity needs one temperature per side"])
    (th,), (tc,) = hot_t, cold_t
    temps = list(t)
    for i in baths.hot_set:
        temps[i] = tc
    for i in baths.cold_set:
        temps[i] = th
    return baths.with_temperatures(temps)


def linear_gradient_profile(t_top: float, t_bottom: float, n_b: int) -> list[float]:
    if n_b < 1:
        raise ValueError("n_b must be at least 1")
    if n_b == 1:
        return [0.5 * (t_top + t_bottom)]
    return [float(x) for x in np.linspace(t_top, t_bottom, n_b)]
