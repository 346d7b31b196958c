import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heatdiode.md import (
    FKPotentialSpec,
    IntegrationBlowup,
    MDConfig,
    MDState,
    _Integrator,
    bbk_step,
    force,
    initial_state,
    measure_current,
    ratio_with_error,
    run_md,
)
from heatdiode.model import BathSpec, ChainSpec
from heatdiode.transport import rectification

from conftest import tgho_baths

TGHO = ChainSpec.from_springs([2, 2, 1, 1, 0.1, 0.1])
SHORT = MDConfig(equilibration_steps=20_000, production_steps=50_000, realizations=2, chunk_steps=10_000)


def potential(chain, fk, u):
    k = np.asarray(chain.springs)
    ext = np.concatenate([[0.0], u, [0.0]])
    e = 0.5 * np.sum(k * np.diff(ext) ** 2) + 0.5 * np.sum(np.asarray(chain.pinning) * u**2)
    if fk is not None:
        amp, q, phase = fk.cosine_terms()
        e += np.sum(amp * np.cos(q * u + phase))
    return e


def energy(chain, fk, state):
    return 0.5 * np.sum(np.asarray(chain.masses) * state.v**2) + potential(chain, fk, state.u)


def test_zero_force_at_rest():
    assert np.all(force(TGHO, None, np.zeros(5)) == 0)


def test_fk_force_at_quarter_period():
    chain = ChainSpec.from_springs([0.0, 0.0])
    f = force(chain, FKPotentialSpec([0.7], period=2.0), [0.5])
    assert abs(f[0]) == pytest.approx(2 * math.pi * 0.7 / 2.0)


@given(st.lists(st.floats(-1, 1), min_size=5, max_size=5), st.sampled_from(["cosine", "normalized"]),
       st.floats(0, 2 * math.pi))
def test_force_is_minus_gradient(u, form, phase):
    chain = ChainSpec.from_springs([0.3, 1.2, 0.8, 1.0, 0.5, 2.0], pinning=[0.1, 0, 0.4, 0, 0.2])
    fk = FKPotentialSpec([0.5, 1.0, 0.0, 2.0, 1.5], period=1.3, phase=phase, form=form)
    u = np.array(u)
    h = 1e-6
    grad = [(potential(chain, fk, u + h * e) - potential(chain, fk, u - h * e)) / (2 * h) for e in np.eye(5)]
    assert np.allclose(force(chain, fk, u), -np.array(grad), atol=1e-6)


def test_normalized_form_has_curvature_v():
    chain = ChainSpec.from_springs([0.0, 0.0])
    fk = FKPotentialSpec([3.0], form="normalized")
    assert -force(chain, fk, [1e-4])[0] / 1e-4 == pytest.approx(3.0, rel=1e-6)


def test_fk_split():
    fk = FKPotentialSpec.split(5, 0.25, 1.0)
    assert fk.amplitudes == (0.25, 0.25, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        FKPotentialSpec([-1.0])
    with pytest.raises(ValueError):
        FKPotentialSpec([1.0], form="square")


def test_single_steps_match_blocked_advance():
    baths = tgho_baths()
    integ = _Integrator(TGHO, None, baths, 0.01)
    noise = np.random.default_rng(3).standard_normal((200, 4))
    a = integ.initial_state(np.random.default_rng(1))
    b = MDState(a.u.copy(), a.v.copy(), a.force.copy(), a.random_force.copy())
    integ.advance(a, noise)
    for row in noise:
        integ.advance(b, row[None, :])
    assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v) and a.step == b.step == 200


def test_bbk_step_advances_one_step():
    baths = tgho_baths()
    state = initial_state(TGHO, None, baths, 0.01, np.random.default_rng(0))
    bbk_step(state, TGHO, None, baths, 0.01, np.random.default_rng(1))
    assert state.step == 1 and np.any(state.u != 0)


@pytest.mark.parametrize("fk", [None, FKPotentialSpec([0.5, 0.5, 1, 1, 1], phase=math.pi)])
def test_energy_conserved_without_baths(fk):
    baths = BathSpec([0.0] * 5, [0.0] * 5, [], [])
    integ = _Integrator(TGHO, fk, baths, 0.005)
    state = integ.initial_state(np.random.default_rng(0))
    state.u[:] = [0.1, -0.05, 0.08, 0.0, -0.1]
    state.v[:] = [0.2, 0.0, -0.1, 0.05, 0.0]
    integ.advance(state, np.zeros((0, 0)))
    # recompute forces for the displaced start
    state.force[:] = force(TGHO, fk, state.u)
    e0 = energy(TGHO, fk, state)
    integ.advance(state, np.zeros((1_000_000, 0)))
    assert abs(energy(TGHO, fk, state) - e0) / e0 < 1e-4


def test_zero_temperature_damps_out():
    baths = BathSpec([1.0, 0, 0, 0, 1.0], [0.0] * 5, [0], [4])
    integ = _Integrator(TGHO, None, baths, 0.01)
    state = integ.initial_state(np.random.default_rng(0))
    state.u[:] = 0.3
    state.force[:] = force(TGHO, None, state.u)
    e0 = energy(TGHO, None, state)
    integ.advance(state, np.zeros((200_000, 2)))
    assert energy(TGHO, None, state) < 1e-10 * e0


def test_equipartition_at_equal_temperatures():
    chain = ChainSpec.from_springs([1, 1, 1, 1], masses=[1.0, 2.0, 0.5])
    baths = BathSpec([1.0, 0.5, 1.0], [0.7, 0.7, 0.7], [0, 1], [2])
    md = MDConfig(dt=0.005, equilibration_steps=50_000, production_steps=1_000_000, realizations=2)
    res = run_md(chain, baths, None, md)
    kinetic = np.asarray(chain.masses) * res.mean_square_velocity.mean(axis=0)
    assert np.allclose(kinetic, 0.7, rtol=0.03)
    # no gradient, no mean current; a 0.5 temperature drop would give ~0.1 here
    assert abs(res.mean_current) < 0.01


def test_runs_are_deterministic_and_seeded():
    a = run_md(TGHO, tgho_baths(), None, SHORT)
    b = run_md(TGHO, tgho_baths(), None, SHORT)
    c = run_md(TGHO, tgho_baths(), None, MDConfig(**{**SHORT.__dict__, "base_seed": 7}))
    assert a.per_realization == b.per_realization
    assert a.per_realization != c.per_realization


def test_results_do_not_depend_on_block_size_or_workers():
    a = run_md(TGHO, tgho_baths(), None, SHORT)
    b = run_md(TGHO, tgho_baths(), None, MDConfig(**{**SHORT.__dict__, "chunk_steps": 7_000}), workers=2)
    assert np.allclose(a.per_realization, b.per_realization, rtol=1e-12)


def test_bond_currents_agree_across_unthermostated_bead():
    md = MDConfig(equilibration_steps=50_000, production_steps=400_000, realizations=1)
    res = run_md(TGHO, tgho_baths(), None, md)
    bonds = res.bond_currents[0]
    # the mean currents into and out of the bare middle bead differ only by its energy change
    assert bonds[1] == pytest.approx(bonds[2], abs=5e-3)
    assert res.trajectory_meta["bond"] == (1, 2)


def test_measure_current_matches_kernel_accumulator():
    baths = tgho_baths()
    integ = _Integrator(TGHO, None, baths, 0.01)
    state = integ.initial_state(np.random.default_rng(0))
    noise = np.random.default_rng(5).standard_normal((500, 4))
    us, vs = [], []
    for row in noise:
        integ.advance(state, row[None, :])
        us.append(state.u.copy())
        vs.append(state.v.copy())
    state2 = integ.initial_state(np.random.default_rng(0))
    sums = np.zeros(4)
    integ.advance(state2, noise, sums, np.zeros(5))
    for i in range(4):
        assert measure_current(us, vs, TGHO, (i, i + 1)) == pytest.approx(sums[i] / 500, rel=1e-10)
    with pytest.raises(ValueError):
        measure_current(np.zeros((0, 5)), np.zeros((0, 5)), TGHO, (0, 1))
    with pytest.raises(ValueError):
        measure_current(us, vs, TGHO, (0, 2))


def test_current_positive_from_hot_left_and_matches_landauer():
    md = MDConfig(equilibration_steps=100_000, production_steps=1_000_000, realizations=4)
    res = run_md(TGHO, tgho_baths(), None, md)
    ref = rectification(TGHO, tgho_baths()).total_forward
    assert res.mean_current > 0
    assert abs(res.mean_current - ref) <= max(0.05 * ref, 3 * res.stderr)


def test_blowup_is_reported():
    md = MDConfig(dt=5.0, equilibration_steps=0, production_steps=100_000, realizations=1)
    with pytest.raises(IntegrationBlowup):
        run_md(TGHO, tgho_baths(), None, md)


def test_trajectory_dump_is_thinned():
    res = run_md(TGHO, tgho_baths(), None, SHORT, dump_every=10_000)
    assert res.trajectory.shape == (5 * 5, 4)
    assert set(res.trajectory[:, 1]) == set(range(5))


def test_ratio_with_error_propagates():
    class R:
        def __init__(self, j, e):
            self.mean_current, self.stderr = j, e

    r, err = ratio_with_error(R(2.0, 0.1), R(-1.0, 0.05))
    assert r == 2.0 and err == pytest.approx(2.0 * math.hypot(0.05, 0.05))


def test_config_validation():
    with pytest.raises(ValueError):
        MDConfig(dt=0)
    with pytest.raises(ValueError):
        MDConfig(measure_bond=(1, 3))
    assert MDConfig().bond(5) == (1, 2)
