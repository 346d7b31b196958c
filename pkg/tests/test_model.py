import pytest
from hypothesis import given, strategies as st

from heatdiode.model import (
    BathSpec,
    ChainSpec,
    QuadratureSpec,
    ValidationError,
    check,
    linear_gradient_profile,
    reverse_temperatures,
    swap_affinity,
    validate,
)

from conftest import chains, single_affinity, tgho_baths


def test_from_springs_fills_unit_masses_and_zero_pinning():
    chain = ChainSpec.from_springs([2, 2, 1, 1, 0.1, 0.1])
    assert chain.n == 5
    assert chain.masses == (1.0,) * 5
    assert chain.pinning == (0.0,) * 5


def test_stiffness_matrix_layout():
    chain = ChainSpec.from_springs([1, 2, 3], pinning=[0.5, 0.0])
    assert chain.stiffness().tolist() == [[3.5, -2.0], [-2.0, 5.0]]


def test_validate_accepts_reference_diode():
    model = validate(ChainSpec.from_springs([2, 2, 1, 1, 0.1, 0.1]), tgho_baths())
    assert model.n == 5


def test_validation_lists_every_problem():
    chain = ChainSpec([1.0, -1.0, 1.0], [1, 1, 1, 1])
    baths = BathSpec([1, 0, 1], [1, 0, -0.5], [0], [2])
    errors = check(chain, baths)
    assert any("mass of bead 1" in e for e in errors)
    assert any("temperature of bead 2" in e for e in errors)
    with pytest.raises(ValidationError) as exc:
        validate(chain, baths)
    assert len(exc.value.errors) == len(errors) == 2


@pytest.mark.parametrize(
    "baths, fragment",
    [
        (BathSpec([1, 0, 1], [1, 0, 0], [], [2]), "hot set is empty"),
        (BathSpec([1, 0, 1], [1, 0, 0], [0], [0, 2]), "both hot and cold"),
        (BathSpec([1, 1, 1], [1, 1, 0], [0], [2]), "neither hot nor cold"),
        (BathSpec([1, 0, 1], [1, 0, 0], [0, 1], [2]), "zero friction"),
        (BathSpec([1, 0, 1], [1, 0, 0], [0], [5]), "out of range"),
        (BathSpec([1, 0], [1, 0], [0], [1]), "expected 3 friction"),
    ],
)
def test_bath_set_violations(baths, fragment):
    errors = check(ChainSpec.uniform(3), baths)
    assert any(fragment in e for e in errors), errors


def test_negative_pinning_rejected():
    chain = ChainSpec.from_springs([1, 1, 1], pinning=[-5, 0])
    assert check(chain, BathSpec([1, 1], [1, 0], [0], [1]))


def test_free_chain_is_allowed():
    chain = ChainSpec.from_springs([0, 1, 1, 0])
    assert not chain.is_anchored()
    assert check(chain, BathSpec([1, 0, 1], [1, 0, 0.5], [0], [2])) == []


@given(chains(), st.data())
def test_reversal_is_an_involution(chain, data):
    baths = data.draw(single_affinity(chain.n))
    assert reverse_temperatures(reverse_temperatures(baths)) == baths
    assert swap_affinity(swap_affinity(baths)) == baths


def test_reverse_keeps_frictions_and_sets():
    baths = tgho_baths()
    rev = reverse_temperatures(baths)
    assert rev.temperatures == (0.1, 0.2, 0.0, 0.5, 1.0)
    assert rev.frictions == baths.frictions and rev.hot_set == baths.hot_set


def test_swap_requires_single_affinity():
    with pytest.raises(ValidationError):
        swap_affinity(tgho_baths())


def test_edges_layout():
    baths = BathSpec.edges(6, [3, 2], [1], gamma=0.5)
    assert baths.hot_set == (0, 1) and baths.cold_set == (5,)
    assert baths.frictions == (0.5, 0.5, 0, 0, 0, 0.5)
    assert baths.temperatures == (3, 2, 0, 0, 0, 1)
    with pytest.raises(ValidationError):
        BathSpec.edges(2, [1, 1], [0])


def test_linear_gradient_profile():
    assert linear_gradient_profile(1.0, 0.5, 3) == [1.0, 0.75, 0.5]
    assert linear_gradient_profile(1.0, 0.5, 1) == [0.75]
    with pytest.raises(ValueError):
        linear_gradient_profile(1.0, 0.5, 0)


def test_quadrature_cutoff_defaults_and_floor():
    chain = ChainSpec.uniform(4, k=1.0)
    assert QuadratureSpec().resolve(chain).omega_max == pytest.approx(10 * 2**0.5)
    with pytest.raises(ValidationError, match="below"):
        QuadratureSpec(omega_max=5.0).resolve(chain)
    with pytest.raises(ValidationError, match="scheme"):
        QuadratureSpec(scheme="simpson").resolve(chain)
