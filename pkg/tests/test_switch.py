import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalcell import gibbs_charger as gc
from causalcell import oracles
from causalcell.channels import compose, identity_channel, is_cptp, remix, unitary_channel
from causalcell.errors import DimensionMismatch, NegativeTime
from causalcell.qops import KET_G, SIGMA_X, SIGMA_Z, matexp_hermitian_generator, projector, tensor
from causalcell.switch import (
    ONE, PLUS, ZERO, ControlState, cross_terms, measure_control, measure_control_by_projection,
    switch_evolve, switch_kraus, switch_of_duration,
)
from helpers import random_channel, random_density, random_unitary

P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def test_control_state_default_is_plus():
    np.testing.assert_allclose(PLUS.vector, np.array([1, 1]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(ZERO.vector, [1, 0], atol=1e-15)
    np.testing.assert_allclose(np.abs(ONE.vector), [0, 1], atol=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_control_state_normalized(theta, phi):
    assert np.linalg.norm(ControlState(theta, phi).vector) == pytest.approx(1.0, abs=1e-14)


def test_switch_of_identities():
    w = switch_kraus(identity_channel(), identity_channel())
    assert len(w) == 1
    np.testing.assert_allclose(w.ops[0], np.eye(4), atol=1e-15)


def test_switch_of_unitaries(rng):
    u, v = random_unitary(rng), random_unitary(rng)
    w = switch_kraus(unitary_channel(u), unitary_channel(v))
    assert len(w) == 1
    np.testing.assert_allclose(w.ops[0], tensor(P1, u @ v) + tensor(P0, v @ u), atol=1e-14)


def test_switch_kraus_complete(rng):
    for _ in range(20):
        w = switch_kraus(random_channel(rng), random_channel(rng))
        assert len(w) == 4
        assert is_cptp(w.ops, 1e-10)


def test_switch_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        switch_kraus(identity_channel(2), identity_channel(3))


def test_switch_evolve_identity(rng):
    rho = random_density(rng)
    out = switch_evolve(identity_channel(), identity_channel(), PLUS, rho)
    np.testing.assert_allclose(out, tensor(PLUS.rho, rho), atol=1e-15)


def test_definite_order_limits(rng):
    a, b = random_channel(rng, 2, 3), random_channel(rng, 2, 2)
    rho = random_density(rng)
    out0 = switch_evolve(a, b, ZERO, rho)
    np.testing.assert_allclose(out0[:2, :2], compose(a, b)(rho), atol=1e-10)
    out1 = switch_evolve(a, b, ONE, rho)
    np.testing.assert_allclose(out1[2:, 2:], compose(b, a)(rho), atol=1e-10)


def test_unitary_switch_block_structure(rng):
    u, v = random_unitary(rng), random_unitary(rng)
    rho = random_density(rng)
    out = switch_evolve(unitary_channel(u), unitary_channel(v), PLUS, rho)
    uv, vu = u @ v, v @ u
    np.testing.assert_allclose(out[:2, :2] + out[2:, 2:],
                               0.5 * (uv @ rho @ uv.conj().T + vu @ rho @ vu.conj().T), atol=1e-12)
    np.testing.assert_allclose(out[:2, 2:], 0.5 * vu @ rho @ uv.conj().T, atol=1e-12)
    np.testing.assert_allclose(out, oracles.unitary_switch_joint(u, v, rho), atol=1e-12)


def test_measure_product_plus(rng):
    rho = random_density(rng)
    plus, minus = measure_control(tensor(PLUS.rho, rho))
    assert plus.probability == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(plus.state, rho, atol=1e-14)
    assert minus.probability == pytest.approx(0.0, abs=1e-14)
    assert not minus.defined and minus.state is None


def test_identical_unitaries_have_empty_minus_branch():
    factory = lambda t: unitary_channel(matexp_hermitian_generator(SIGMA_X + 0.3 * SIGMA_Z, t))
    for t in np.linspace(0, 5, 11):
        _, minus = switch_of_duration(factory, t)
        assert minus.probability <= 1e-14


def test_minus_branch_of_unitaries(rng):
    u, v = random_unitary(rng), random_unitary(rng)
    rho = random_density(rng)
    _, minus = measure_control(switch_evolve(unitary_channel(u), unitary_channel(v), PLUS, rho))
    np.testing.assert_allclose(minus.unnormalized, oracles.unitary_switch_minus(u, v, rho), atol=1e-12)


def test_measurement_routes_agree(rng):
    for _ in range(20):
        ctrl = ControlState(*rng.uniform(0, 2 * np.pi, 2))
        out = switch_evolve(random_channel(rng), random_channel(rng), ctrl, random_density(rng))
        for a, b in zip(measure_control(out), measure_control_by_projection(out)):
            np.testing.assert_allclose(a.unnormalized, b.unnormalized, atol=1e-13)


def test_branch_probabilities_sum_to_one(rng):
    for _ in range(1000):
        ctrl = ControlState(*rng.uniform(0, 2 * np.pi, 2))
        plus, minus = measure_control(switch_evolve(random_channel(rng), random_channel(rng), ctrl,
                                                    random_density(rng)))
        assert abs(plus.probability + minus.probability - 1) <= 1e-10
        for b in (plus, minus):
            assert -1e-12 <= b.probability <= 1 + 1e-12
            if b.defined:
                assert abs(np.trace(b.state) - 1) <= 1e-10
                assert np.linalg.eigvalsh(b.state).min() >= -1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kraus_representation_invariance(seed):
    rng = np.random.default_rng(seed)
    a, b = random_channel(rng, 2, 2), random_channel(rng, 2, 3)
    rho = random_density(rng)
    ref = switch_evolve(a, b, PLUS, rho)
    out = switch_evolve(remix(a, random_unitary(rng, 2)), remix(b, random_unitary(rng, 3)), PLUS, rho)
    assert np.max(np.abs(out - ref)) <= 1e-10


def test_cross_terms_reconstruct_maps(rng):
    a, b = random_channel(rng), random_channel(rng)
    rho = random_density(rng)
    phi, delta = cross_terms(*measure_control(switch_evolve(a, b, PLUS, rho)))
    avg = 0.5 * (compose(a, b)(rho) + compose(b, a)(rho))
    np.testing.assert_allclose(phi, avg, atol=1e-10)
    # interference term: sum over Kraus pairs of (A_i B_j) rho (B_j A_i)^dag, hermitized
    d = sum(ai @ bj @ rho @ (bj @ ai).conj().T for ai in a.ops for bj in b.ops)
    np.testing.assert_allclose(delta, 0.5 * (d + d.conj().T), atol=1e-10)


def test_switch_of_duration_zero_time(rng):
    rho = random_density(rng)
    plus, minus = switch_of_duration(lambda t: random_channel(np.random.default_rng(1)) if t else identity_channel(),
                                     0.0, PLUS, rho)
    assert plus.probability == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(plus.state, rho, atol=1e-14)


def test_switch_of_duration_defaults_to_ground():
    plus, _ = switch_of_duration(lambda t: identity_channel(), 1.0)
    np.testing.assert_allclose(plus.state, projector(KET_G))


def test_switch_of_duration_splits_time():
    seen = []

    def factory(t):
        seen.append(t)
        return identity_channel()

    switch_of_duration(factory, 2.0)
    switch_of_duration(factory, 2.0, branch_ratio=1.0)
    assert seen == [1.0, 2.0]
    with pytest.raises(NegativeTime):
        switch_of_duration(factory, -1.0)


def test_gibbs_pair_against_dilation():
    spec = gc.GibbsSpec(1.0, 1.0, 0.3)
    rho_b = spec.charger_state
    plus, minus = gc.switched_charge(spec, gc.STANDARD, 1.0)
    joint, p_ref, m_ref = oracles.dilated_gibbs_switch(1.0, 1.0, 0.3, 1.0, rho_b, 0.5, 0.5, PLUS.vector)
    assert np.max(np.abs(plus.unnormalized - p_ref)) <= 1e-9
    assert np.max(np.abs(minus.unnormalized - m_ref)) <= 1e-9
