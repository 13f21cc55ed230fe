import math

import numpy as np
import pytest

from collisim.states import (
    BlochParams,
    bloch_to_state,
    pauli_expectations,
    plus_state,
    pure_state,
    reservoir_moments,
)


class TestBlochParams:
    def test_theta_bounds(self):
        with pytest.raises(ValueError):
            BlochParams(-0.1)
        with pytest.raises(ValueError):
            BlochParams(math.pi + 0.1)
        # within tolerance clamps instead of rejecting
        assert BlochParams(-1e-13).theta == 0.0
        assert BlochParams(math.pi + 1e-13).theta == math.pi

    def test_phi_normalization(self):
        assert BlochParams(1.0, 3 * math.pi / 2).phi == 3 * math.pi / 2
        assert abs(BlochParams(1.0, 2 * math.pi + 0.5).phi - 0.5) <= 1e-12
        assert abs(BlochParams(1.0, -0.5).phi - (2 * math.pi - 0.5)) <= 1e-12


class TestPureState:
    def test_north_pole(self):
        assert np.allclose(pure_state(BlochParams(0.0, 0.0)), np.diag([1.0, 0.0]))

    def test_plus_state(self):
        rho = pure_state(BlochParams(math.pi / 2, 0.0))
        assert np.allclose(rho, np.full((2, 2), 0.5))
        assert np.allclose(plus_state(), rho)

    def test_tilted_state_entries(self):
        rho = pure_state(BlochParams(math.pi / 3, math.pi / 2))
        assert abs(rho[0, 0] - 0.75) <= 1e-12
        assert abs(rho[1, 1] - 0.25) <= 1e-12
        assert abs(rho[0, 1] - (-1j * math.sqrt(3) / 4)) <= 1e-12

    def test_purity(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            p = BlochParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            rho = pure_state(p)
            assert abs(np.linalg.det(rho)) <= 1e-12
            assert abs(np.trace(rho @ rho).real - 1.0) <= 1e-12


class TestPauliExpectations:
    def test_maximally_mixed(self):
        assert pauli_expectations(np.eye(2) / 2) == (0.0, 0.0, 0.0)

    def test_matches_bloch_map(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            theta = rng.uniform(0, math.pi)
            phi = rng.uniform(0, 2 * math.pi)
            x, y, z = pauli_expectations(pure_state(BlochParams(theta, phi)))
            assert abs(x - math.sin(theta) * math.cos(phi)) <= 1e-12
            assert abs(y - math.sin(theta) * math.sin(phi)) <= 1e-12
            assert abs(z - math.cos(theta)) <= 1e-12

    def test_specific_point(self):
        x, y, z = pauli_expectations(pure_state(BlochParams(2 * math.pi / 3, math.pi / 2)))
        assert abs(x) <= 1e-12
        assert abs(y - math.sqrt(3) / 2) <= 1e-12
        assert abs(z + 0.5) <= 1e-12

    def test_bloch_round_trip(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            v = rng.normal(size=3)
            v = v / np.linalg.norm(v) * rng.uniform(0, 1)
            rho = bloch_to_state(*v)
            assert np.allclose(pauli_expectations(rho), v, atol=1e-12)


class TestReservoirMoments:
    def test_north_pole(self):
        m = reservoir_moments(BlochParams(0.0, 0.0))
        assert (m.spm, m.smp, m.sm, m.sz) == (1.0, 0.0, 0.0, 1.0)

    def test_south_pole(self):
        m = reservoir_moments(BlochParams(math.pi, 0.0))
        assert m.spm == 0.0 and m.smp == 1.0 and m.sz == -1.0
        assert abs(m.sm) <= 1e-16

    def test_equator_with_phase(self):
        m = reservoir_moments(BlochParams(math.pi / 2, math.pi / 2))
        assert abs(m.sm - (-0.5j)) <= 1e-12
        assert abs(m.sz) <= 1e-12

    def test_invariants(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            p = BlochParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            m = reservoir_moments(p)
            assert abs(m.spm + m.smp - 1.0) <= 1e-12
            assert abs(m.sp - np.conj(m.sm)) <= 1e-15
            assert abs(abs(m.sm) - math.sin(p.theta) / 2) <= 1e-12

    def test_moments_rebuild_the_state(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            p = BlochParams(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            m = reservoir_moments(p)
            rebuilt = np.array([[m.spm, m.sm], [m.sp, m.smp]], dtype=complex)
            assert np.max(np.abs(rebuilt - pure_state(p))) <= 1e-12
