import math

import numpy as np
import pytest

from collisim.engine import (
    CollisionSchedule,
    NoiseParams,
    ReservoirSpec,
    build_interaction_hamiltonian,
    collide_once,
    decay_step,
    sample_schedule,
    simulate,
    steady_state_estimate,
)
from collisim.linalg import kron, tensor
from collisim.states import (
    IDENTITY,
    SIGMA_Z,
    BlochParams,
    pauli_expectations,
    plus_state,
    pure_state,
)

PI = math.pi


def spec(theta, phi=0.0, j=0.01):
    return ReservoirSpec(BlochParams(theta, phi), j)


class TestInteractionHamiltonian:
    def test_single_reservoir_exchange_form(self):
        h = build_interaction_hamiltonian([spec(0.0, j=1.0)])
        nz = {(int(i), int(k)): h[i, k] for i, k in np.argwhere(np.abs(h) > 0)}
        assert set(nz) == {(1, 2), (2, 1)}
        assert nz[(1, 2)] == 1.0 and nz[(2, 1)] == 1.0

    def test_hermitian_by_construction(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 3, 4):
            specs = [
                spec(rng.uniform(0, PI), rng.uniform(0, 2 * PI), rng.uniform(0, 0.1))
                for _ in range(n)
            ]
            h = build_interaction_hamiltonian(specs)
            assert np.array_equal(h, h.conj().T)

    def test_conserves_total_magnetization(self):
        h = build_interaction_hamiltonian([spec(0.0), spec(PI, j=0.01)])
        sz_total = sum(
            tensor([SIGMA_Z if k == i else IDENTITY for k in range(3)])
            for i in range(3)
        )
        comm = h @ sz_total - sz_total @ h
        assert np.max(np.abs(comm)) <= 1e-15

    def test_reservoir_count_bounds(self):
        with pytest.raises(ValueError):
            build_interaction_hamiltonian([])
        with pytest.raises(ValueError):
            build_interaction_hamiltonian([spec(0.0)] * 5)


class TestCollideOnce:
    def test_no_exchange_when_both_excited(self):
        probe = np.diag([1.0, 0.0]).astype(complex)
        out = collide_once(probe, [spec(0.0)], tau=7.0)
        assert np.max(np.abs(out - probe)) <= 1e-12

    def test_full_swap(self):
        probe = np.diag([0.0, 1.0]).astype(complex)
        out = collide_once(probe, [spec(0.0, j=1.0)], tau=PI / 2)
        assert np.max(np.abs(out - np.diag([1.0, 0.0]))) <= 1e-12

    def test_weak_exchange_population(self):
        probe = np.diag([0.0, 1.0]).astype(complex)
        out = collide_once(probe, [spec(0.0, j=0.01)], tau=3.0)
        assert abs(out[0, 0].real - math.sin(0.03) ** 2) <= 1e-12

    def test_joint_excitation_conserved(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            specs = [
                spec(rng.uniform(0, PI), rng.uniform(0, 2 * PI), rng.uniform(0.001, 0.05))
                for _ in range(2)
            ]
            probe = pure_state(
                BlochParams(rng.uniform(0, PI), rng.uniform(0, 2 * PI))
            )
            anc = kron(pure_state(specs[0].params), pure_state(specs[1].params))
            joint = kron(probe, anc)
            from collisim.linalg import herm_unitary

            u = herm_unitary(build_interaction_hamiltonian(specs), 3.0)
            evolved = u @ joint @ u.conj().T
            sz_total = sum(
                tensor([SIGMA_Z if k == i else IDENTITY for k in range(3)])
                for i in range(3)
            )
            before = np.trace(sz_total @ joint).real
            after = np.trace(sz_total @ evolved).real
            assert abs(before - after) <= 1e-10


class TestDecayStep:
    def test_zero_duration_is_identity(self):
        rho = plus_state()
        out = decay_step(rho, NoiseParams(1e-3, 1e-3), 0.0)
        assert np.array_equal(out, rho)

    def test_population_half_life(self):
        gamma = 2e-5
        duration = math.log(2) / (2 * gamma)
        rho = np.diag([1.0, 0.0]).astype(complex)
        out = decay_step(rho, NoiseParams(gamma_theta=gamma), duration)
        assert abs(out[0, 0].real - 0.5) <= 1e-12
        assert abs(np.trace(out) - 1.0) <= 1e-15

    def test_zero_rates_identity(self):
        rho = plus_state()
        out = decay_step(rho, NoiseParams(), 123.0)
        assert np.array_equal(out, rho)

    def test_coherence_decay_rate(self):
        noise = NoiseParams(gamma_theta=1e-4, gamma_phi=3e-4)
        duration = 500.0
        out = decay_step(plus_state(), noise, duration)
        expected = 0.5 * math.exp(-(1e-4 + 4 * 3e-4) * duration)
        assert abs(out[0, 1].real - expected) <= 1e-12

    def test_negative_duration_rejected(self):
        with pytest.raises(ValueError):
            decay_step(plus_state(), NoiseParams(), -1.0)


class TestSchedule:
    def test_regular_forces_unit_probability(self):
        with pytest.raises(ValueError):
            CollisionSchedule(tau=3.0, slots=10, p=0.5, mode="regular")

    def test_regular_sampling_all_true(self):
        sched = CollisionSchedule(tau=3.0, slots=5, mode="regular")
        assert sample_schedule(sched).all()

    def test_binomial_concentration(self):
        sched = CollisionSchedule(
            tau=3.0, slots=100_000, p=0.5, mode="stochastic", seed=99
        )
        count = sample_schedule(sched).sum()
        sigma = math.sqrt(100_000 * 0.25)
        assert abs(count - 50_000) <= 3 * sigma

    def test_seed_determinism(self):
        sched = CollisionSchedule(tau=3.0, slots=1000, p=0.3, mode="stochastic", seed=7)
        assert np.array_equal(sample_schedule(sched), sample_schedule(sched))

    def test_success_probability_relation(self):
        sched = CollisionSchedule.from_mean_interactions(16000, 3.0, 5e4)
        assert sched.p == 0.96
        assert sched.slots == 16667
        assert abs(sched.mean_interactions - 16000) <= sched.p

    def test_overcommitted_mean_rejected(self):
        with pytest.raises(ValueError, match="exceeds 1"):
            CollisionSchedule.from_mean_interactions(18000, 3.0, 5e4)
        with pytest.raises(ValueError):
            CollisionSchedule.from_mean_interactions(
                18000, 3.0, 5e4, mode="regular"
            )

    def test_regular_idle_time_derivation(self):
        sched = CollisionSchedule.from_mean_interactions(
            10000, 3.0, 5e4, mode="regular"
        )
        assert sched.slots == 10000
        assert abs(sched.tau0 - 2.0) <= 1e-12
        assert sched.p == 1.0


class TestSteadyStateEstimate:
    def test_constant_trajectory(self):
        bloch = np.tile([0.1, -0.2, 0.9], (50, 1))
        steady, converged = steady_state_estimate(bloch, window=10, tol=0.01)
        assert steady == pytest.approx((0.1, -0.2, 0.9), abs=1e-15)
        assert converged

    def test_drifting_trajectory_not_converged(self):
        z = np.linspace(0, 1, 100)
        bloch = np.column_stack([np.zeros(100), np.zeros(100), z])
        _, converged = steady_state_estimate(bloch, window=40, tol=0.01)
        assert not converged

    def test_window_bounds(self):
        bloch = np.zeros((10, 3))
        with pytest.raises(ValueError):
            steady_state_estimate(bloch, window=6, tol=0.1)
        with pytest.raises(ValueError):
            steady_state_estimate(bloch, window=0, tol=0.1)


class TestSimulate:
    def test_polar_homogenization(self):
        sched = CollisionSchedule(tau=3.0, slots=18000, mode="regular")
        for theta, target in ((0.0, 1.0), (PI, -1.0)):
            traj = simulate(plus_state(), [spec(theta)], sched,
                            validate_each_slot=True)
            assert abs(traj.bloch[-1, 2] - target) <= 0.02
            assert traj.converged
            # steady diagonal matches the reservoir diagonal
            assert abs((1 + traj.steady[2]) / 2 - (1 + target) / 2) <= 0.02

    def test_record_shapes_and_norms(self):
        sched = CollisionSchedule(tau=3.0, slots=500, p=0.7, mode="stochastic", seed=1)
        traj = simulate(plus_state(), [spec(0.3)], sched)
        assert len(traj.slot_times) == len(traj.bloch) == len(traj.collided) == 500
        norms = np.linalg.norm(traj.bloch, axis=1)
        assert norms.max() <= 1 + 1e-9

    def test_seeded_runs_identical(self):
        sched = CollisionSchedule(tau=3.0, slots=2000, p=0.5, mode="stochastic", seed=11)
        a = simulate(plus_state(), [spec(0.0)], sched)
        b = simulate(plus_state(), [spec(0.0)], sched)
        assert np.array_equal(a.bloch, b.bloch)
        assert np.array_equal(a.collided, b.collided)

    def test_noise_pulls_toward_ground(self):
        # idle slots decay the probe, so equilibration degrades as p drops
        noise = NoiseParams(gamma_theta=2e-5)
        finals = []
        for k_mean in (10000, 12000, 16000):
            sched, _ = _sched_for_k(k_mean)
            traj = simulate(plus_state(), [spec(0.0)], sched, noise)
            finals.append(traj.steady[2])
        assert finals[0] < finals[1] < finals[2]

    def test_requires_an_active_coupling(self):
        sched = CollisionSchedule(tau=3.0, slots=10, mode="regular")
        with pytest.raises(ValueError):
            simulate(plus_state(), [spec(0.0, j=0.0)], sched)

    def test_coherent_reservoir_drive_suppresses_magnetization(self):
        # Units with transverse coherence act as a resonant drive on the
        # probe; the steady magnetization is reduced by 1 + 8|<s->|^2/(J tau)^2
        # relative to the population-weighted value, with the sign preserved.
        theta = PI / 3
        sched = CollisionSchedule(tau=3.0, slots=18000, mode="regular")
        traj = simulate(plus_state(), [spec(theta)], sched)
        alpha = 0.01 * 3.0
        coherence_sq = (math.sin(theta) / 2) ** 2
        predicted = math.cos(theta) / (1 + 8 * coherence_sq / alpha**2)
        assert traj.steady[2] == pytest.approx(predicted, rel=0.05)
        assert math.copysign(1, traj.steady[2]) == math.copysign(1, math.cos(theta))

    def test_steady_sign_invariant_under_coupling_rescale(self):
        sched = CollisionSchedule(tau=3.0, slots=18000, mode="regular")
        for t1, t2 in ((0.6, 1.1), (2.6, 1.2), (0.9, 2.7)):
            signs = []
            for scale in (0.5, 1.0, 2.0):
                specs = [spec(t1, j=0.01 * scale), spec(t2, j=0.01 * scale)]
                traj = simulate(plus_state(), specs, sched)
                signs.append(traj.steady[2] >= 0)
            assert len(set(signs)) == 1

    def test_mixture_mode_polar_reservoirs(self):
        sched = CollisionSchedule(tau=3.0, slots=18000, mode="regular", seed=2)
        specs = [spec(0.0, j=0.00737), spec(PI, j=0.00263)]
        traj = simulate(plus_state(), specs, sched, mixture=True)
        # mixture weights are linear in J, so the fixed point differs from
        # the simultaneous mode; the dominant reservoir still wins the sign
        assert traj.steady[2] > 0


def _sched_for_k(k_mean, tau=3.0, total_time=5e4):
    p = k_mean * tau / total_time
    slots = int(round(total_time / tau))
    if p >= 1:
        return CollisionSchedule(tau=tau, slots=slots, mode="regular"), True
    return CollisionSchedule(tau=tau, slots=slots, p=p, mode="stochastic", seed=5), False
