import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import solve_continuous_lyapunov

from heatdiode.model import BathSpec, ChainSpec, EffectiveFrictionSpec, QuadratureSpec, ValidationError
from heatdiode.transport import (
    classical_currents,
    compute_M,
    delta_j_closed_form,
    effective_diode,
    omega_occupation,
    quantum_currents,
    rectification,
    reversed_baths,
)

from conftest import COARSE, chains, multi_bath, single_affinity, tgho_baths

TGHO = ChainSpec.from_springs([2, 2, 1, 1, 0.1, 0.1])


def steady_state_powers(chain, baths):
    """Heat injected by each bath from the exact stationary covariance of the Langevin SDE."""
    n = chain.n
    m = np.asarray(chain.masses)
    g = np.asarray(baths.frictions)
    t = np.asarray(baths.temperatures)
    drift = np.zeros((2 * n, 2 * n))
    drift[:n, n:] = np.eye(n)
    drift[n:, :n] = -chain.stiffness() / m[:, None]
    drift[n:, n:] = -np.diag(g / m)
    diffusion = np.zeros((2 * n, 2 * n))
    diffusion[n:, n:] = np.diag(2 * g * t / m**2)
    cov = solve_continuous_lyapunov(drift, -diffusion)
    v2 = np.diag(cov)[n:]
    return {i: g[i] * (t[i] - m[i] * v2[i]) / m[i] for i in baths.thermostated}


@given(chains(), st.data())
def test_currents_are_conserved(chain, data):
    baths = data.draw(multi_bath(chain.n))
    for rep in (classical_currents(compute_M(chain, baths, COARSE), baths), quantum_currents(chain, baths, COARSE)):
        assert rep.conservation_residual < 1e-10
        assert rep.cold_total == pytest.approx(rep.total_forward, rel=1e-9, abs=1e-15)


@given(chains(max_n=10), st.data(), st.sampled_from(["classical", "quantum"]))
def test_single_affinity_never_rectifies(chain, data, regime):
    baths = data.draw(single_affinity(chain.n))
    rep = rectification(chain, baths, COARSE, regime, reversal="swap")
    assert abs(rep.delta) <= 1e-10 * abs(rep.total_forward)
    assert rep.ratio == pytest.approx(1.0, abs=1e-10)


@given(chains(), st.data())
def test_transmission_matrix_symmetric_and_supported_on_baths(chain, data):
    baths = data.draw(multi_bath(chain.n))
    M = compute_M(chain, baths, COARSE).values
    assert np.array_equal(M, M.T)
    assert np.all(M >= 0) and np.all(np.diag(M) == 0)
    idle = [i for i in range(chain.n) if i not in baths.thermostated]
    assert np.all(M[idle] == 0)


@given(st.floats(0.1, 10), st.floats(0, 5))
def test_classical_current_is_affine_in_temperature(scale, shift):
    base = tgho_baths()
    M = compute_M(TGHO, base, COARSE)
    moved = base.with_temperatures([scale * t + shift for t in base.temperatures])
    j0 = classical_currents(M, base).per_bath
    j1 = classical_currents(M, moved).per_bath
    for i in j0:
        assert j1[i] == pytest.approx(scale * j0[i], rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("springs", [[2, 2, 1, 1, 0.1, 0.1], [1, 1, 1, 1, 1, 1], [0.3, 1.4, 0.8, 2.0, 0.6, 0.9]])
def test_landauer_matches_exact_langevin_covariance(springs):
    chain = ChainSpec.from_springs(springs, masses=[1, 1.5, 0.7, 1.2, 0.9])
    baths = BathSpec([1.0, 0.6, 0, 1.3, 0.8], [1.0, 0.5, 0, 0.2, 0.1], [0, 1], [3, 4])
    exact = steady_state_powers(chain, baths)
    rep = classical_currents(compute_M(chain, baths), baths)
    for i, j in exact.items():
        assert rep.per_bath[i] == pytest.approx(j, rel=1e-8)


def test_trapezoid_matches_adaptive():
    baths = tgho_baths()
    a = rectification(TGHO, baths, QuadratureSpec(), "quantum")
    b = rectification(TGHO, baths, QuadratureSpec(scheme="adaptive"), "quantum")
    assert a.total_forward == pytest.approx(b.total_forward, rel=1e-9)
    assert a.ratio == pytest.approx(b.ratio, rel=1e-9)
    m1 = compute_M(TGHO, baths).values
    m2 = compute_M(TGHO, baths, QuadratureSpec(scheme="adaptive")).values
    assert np.allclose(m1, m2, rtol=1e-9, atol=0)


def test_reference_diode_rectifies():
    rep = rectification(TGHO, tgho_baths())
    assert rep.total_forward > 0 > rep.total_reverse
    assert rep.ratio == pytest.approx(1.3675, abs=1e-3)
    assert rep.rectification == rep.ratio


def test_five_bead_closed_form():
    baths = tgho_baths()
    M = compute_M(TGHO, baths, COARSE)
    t = baths.temperatures
    expected = ((t[0] - t[1]) - (t[3] - t[4])) * (M[0, 3] - M[1, 4])
    assert delta_j_closed_form(M, baths) == pytest.approx(expected, rel=1e-12)
    assert rectification(TGHO, baths, COARSE).delta == pytest.approx(expected, rel=1e-9)


@given(st.integers(2, 5), st.integers(0, 3), st.data())
@settings(max_examples=30)
def test_zone_closed_form_matches_two_directions(n_b, n_i, data):
    n = 2 * n_b + n_i
    chain = data.draw(chains(min_n=n, max_n=n))
    temps = data.draw(st.lists(st.floats(0.05, 2.0), min_size=2 * n_b, max_size=2 * n_b))
    baths = BathSpec.edges(n, temps[:n_b], temps[n_b:])
    rep = rectification(chain, baths, COARSE)
    closed = delta_j_closed_form(compute_M(chain, baths, COARSE), baths)
    assert closed == pytest.approx(rep.delta, rel=1e-8, abs=1e-12 * abs(rep.total_forward))


@given(st.integers(5, 9), st.floats(0.1, 2), st.floats(0.1, 2), st.data(), st.sampled_from(["classical", "quantum"]))
@settings(max_examples=30)
def test_edge_symmetric_chain_does_not_rectify(n, k_outer, k_edge, data, regime):
    interior = data.draw(st.lists(st.floats(0.1, 2), min_size=n - 3, max_size=n - 3))
    chain = ChainSpec.from_springs([k_outer, k_edge, *interior, k_edge, k_outer])
    rep = rectification(chain, tgho_baths(n=n), COARSE, regime)
    assert abs(rep.delta) <= 1e-9 * abs(rep.total_forward)


def test_quantum_reduces_to_classical_at_high_temperature():
    baths = tgho_baths(tuple(1e3 * t for t in (1.0, 0.5, 0.2, 0.1)))
    cl = classical_currents(compute_M(TGHO, baths), baths).per_bath
    qu = quantum_currents(TGHO, baths).per_bath
    for i in cl:
        assert qu[i] == pytest.approx(cl[i], rel=1e-3)


def test_quantum_classical_diode_differs_only_quantum_mechanically():
    baths = tgho_baths((10.0, 8.0, 2.0, 0.0))
    assert abs(rectification(TGHO, baths, COARSE).delta) < 1e-12
    assert abs(rectification(TGHO, baths, COARSE, "quantum").ratio - 1) > 1e-3


def test_omega_occupation_limits():
    w = np.array([0.0, 1e-8, 1.0, 1e4])
    x = omega_occupation(w, 2.0)
    assert x[0] == 2.0 and x[1] == pytest.approx(2.0 - 0.5e-8, rel=1e-12)
    assert x[2] == pytest.approx(1.0 / math.expm1(0.5))
    assert x[3] == 0.0
    assert np.all(omega_occupation(w, 0.0) == 0.0)


def test_free_chain_currents_are_finite():
    chain = ChainSpec.from_springs([0, 1, 0.5, 1, 0])
    baths = BathSpec([1, 0, 0, 1], [1, 0, 0, 0.5], [0], [3])
    rep = rectification(chain, baths, COARSE, "quantum", reversal="swap")
    assert math.isfinite(rep.total_forward) and rep.total_forward > 0


def test_mirror_reversal_needs_mirror_symmetric_layout():
    baths = BathSpec([1, 1, 0, 1, 0], [1, 0.5, 0, 0.1, 0], [0, 1], [3])
    with pytest.raises(ValidationError):
        reversed_baths(baths)
    with pytest.raises(ValueError):
        reversed_baths(baths, "rotate")


def _effective(slope, base, biases):
    chain = ChainSpec.uniform(len(base))
    eff = EffectiveFrictionSpec(base, slope)
    return np.array([effective_diode(chain, eff, 1.0 + b, 1.0, COARSE).delta for b in biases])


def test_effective_diode_scales_quadratically():
    biases = np.geomspace(0.02, 0.2, 6)
    delta = _effective(0.05, (1.0, 0, 0, 0, 0.5), biases)
    slope = np.polyfit(np.log(biases), np.log(np.abs(delta)), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.02)


@pytest.mark.parametrize("slope, base", [(0.0, (1.0, 0, 0, 0, 0.5)), (0.05, (0.8, 0, 0, 0, 0.8))])
def test_effective_diode_controls(slope, base):
    # constant frictions, or a mirror-symmetric chain, cannot rectify
    assert np.all(np.abs(_effective(slope, base, [0.05, 0.2])) < 1e-12)


def test_effective_diode_rejects_interior_baths_and_negative_friction():
    chain = ChainSpec.uniform(4)
    with pytest.raises(ValidationError):
        effective_diode(chain, EffectiveFrictionSpec((1, 1, 0, 1), 0.1), 1.0, 0.5, COARSE)
    with pytest.raises(ValidationError, match="not positive"):
        effective_diode(chain, EffectiveFrictionSpec((1, 0, 0, 0.1), 1.0), 2.0, 1.0, COARSE)
