"""Repeated-collision simulator for a probe qubit and N information reservoirs.

One slot spans t_bar = tau + tau0.  A colliding slot applies the exact joint
unitary exp(-i H_int tau) with one fresh ancilla per reservoir (interaction
picture, resonant case), then single-qubit noise for tau0.  A non-colliding
slot applies noise for the whole slot.  Ancillas are never reused.

The per-slot map is linear on the probe state, so ``simulate`` precomputes the
two 4x4 slot superoperators (column-stacking convention) from collide_once /
decay_step and iterates matrix-vector products; this is exactly the per-slot
tensor-product evolution, just factored once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDensityMatrixError
from .linalg import herm_unitary, partial_trace, tensor, unvectorize, vectorize
from .states import (
    IDENTITY,
    SIGMA_M,
    SIGMA_P,
    BlochParams,
    pure_state,
)

MAX_RESERVOIRS = 4


@dataclass(frozen=True)
class ReservoirSpec:
    """One information reservoir: Bloch angles of its units plus coupling J >= 0."""

    params: BlochParams
    coupling: float

    def __post_init__(self):
        if not (self.coupling >= 0.0 and math.isfinite(self.coupling)):
            raise ValueError(f"coupling must be finite and >= 0, got {self.coupling}")


@dataclass(frozen=True)
class NoiseParams:
    """Energy dissipation rate gamma_theta and pure dephasing rate gamma_phi.

    Lindblad convention: L[A] rho = Gamma (2 A rho A^dag - A^dag A rho
    - rho A^dag A), so the excited population decays at 2*gamma_theta and the
    coherence at gamma_theta + 4*gamma_phi.  (The literature splits 50/50 on
    this factor of 2; this package uses the convention above everywhere.)
    """

    gamma_theta: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        for name in ("gamma_theta", "gamma_phi"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    @property
    def trivial(self) -> bool:
        return self.gamma_theta == 0.0 and self.gamma_phi == 0.0


@dataclass(frozen=True)
class CollisionSchedule:
    """Slot structure: interaction time tau, idle time tau0, Bernoulli(p) slots.

    mode="regular" forces p=1 (every slot collides).  The mean interaction
    number is p * slots.
    """

    tau: float
    slots: int
    tau0: float = 0.0
    p: float = 1.0
    seed: int = 0
    mode: str = "regular"

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.tau0 < 0:
            raise ValueError("tau0 must be >= 0")
        if self.slots < 1:
            raise ValueError("slots must be >= 1")
        if self.mode not in ("regular", "stochastic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "regular":
            if self.p != 1.0:
                raise ValueError("regular mode forces p = 1")
        elif not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")

    @property
    def slot_time(self) -> float:
        return self.tau + self.tau0

    @property
    def mean_interactions(self) -> float:
        return self.p * self.slots

    @classmethod
    def from_mean_interactions(
        cls,
        k_mean: float,
        tau: float,
        total_time: float,
        mode: str = "stochastic",
        seed: int = 0,
    ) -> "CollisionSchedule":
        """Derive a schedule from (T, <k>, tau).

        stochastic: T/tau slots of length tau, success probability
        p = <k> tau / T (errors if p > 1, i.e. <k> tau > T).
        regular: <k> slots with slot time t_bar = T/<k>, so tau0 = T/<k> - tau
        (errors if that is negative).
        """
        if mode == "stochastic":
            p = k_mean * tau / total_time
            if p > 1.0:
                raise ValueError(
                    f"probability of success p = <k> tau / T = {p} exceeds 1"
                )
            return cls(
                tau=tau,
                slots=int(round(total_time / tau)),
                tau0=0.0,
                p=p,
                seed=seed,
                mode="stochastic",
            )
        if mode == "regular":
            t_bar = total_time / k_mean
            tau0 = t_bar - tau
            if tau0 < 0:
                raise ValueError(
                    f"slot time T/<k> = {t_bar} is shorter than tau = {tau}"
                )
            return cls(
                tau=tau, slots=int(round(k_mean)), tau0=tau0, p=1.0, seed=seed,
                mode="regular",
            )
        raise ValueError(f"unknown mode {mode!r}")


@dataclass
class TrajectoryRecord:
    """Per-slot Bloch history of the probe plus a tail-averaged steady summary."""

    slot_times: np.ndarray
    bloch: np.ndarray          # (slots, 3)
    collided: np.ndarray       # (slots,) bool
    steady: tuple[float, float, float]
    converged: bool
    final_state: np.ndarray = field(repr=False, default=None)


def build_interaction_hamiltonian(specs: list[ReservoirSpec]) -> np.ndarray:
    """Sum_i J_i (sigma0^+ sigma_i^- + sigma0^- sigma_i^+) on 2^(N+1) dims.

    Probe first in tensor order; free Hamiltonian omitted (resonant
    interaction picture).
    """
    n = len(specs)
    if not 1 <= n <= MAX_RESERVOIRS:
        raise ValueError(f"need 1..{MAX_RESERVOIRS} reservoirs, got {n}")
    dim = 2 ** (n + 1)
    h = np.zeros((dim, dim), dtype=complex)
    for i, spec in enumerate(specs):
        ops_a = [SIGMA_P] + [IDENTITY] * n
        ops_a[i + 1] = SIGMA_M
        ops_b = [SIGMA_M] + [IDENTITY] * n
        ops_b[i + 1] = SIGMA_P
        h += spec.coupling * (tensor(ops_a) + tensor(ops_b))
    return h


def reservoir_joint_state(specs: list[ReservoirSpec]) -> np.ndarray:
    """Fresh-ancilla product state, one unit per reservoir."""
    return tensor([pure_state(s.params) for s in specs])


def collide_once(
    probe: np.ndarray,
    specs: list[ReservoirSpec],
    tau: float,
    unitary: np.ndarray | None = None,
) -> np.ndarray:
    """One collision event: attach fresh ancillas, evolve exactly, trace them out.

    ``unitary`` may carry the precomputed exp(-i H tau) for hot loops.
    """
    if unitary is None:
        unitary = herm_unitary(build_interaction_hamiltonian(specs), tau)
    joint = np.kron(np.asarray(probe, dtype=complex), reservoir_joint_state(specs))
    evolved = unitary @ joint @ unitary.conj().T
    return partial_trace(evolved, keep=0, dims=[2] * (len(specs) + 1))


def decay_step(probe: np.ndarray, noise: NoiseParams, duration: float) -> np.ndarray:
    """Closed-form single-qubit noise channel over ``duration``.

    Populations relax toward |g> at rate 2*gamma_theta; the coherence decays
    by exp(-(gamma_theta + 4*gamma_phi) * duration).
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    probe = np.asarray(probe, dtype=complex)
    if duration == 0.0 or noise.trivial:
        return probe.copy()
    pop = math.exp(-2.0 * noise.gamma_theta * duration)
    coh = math.exp(-(noise.gamma_theta + 4.0 * noise.gamma_phi) * duration)
    out = np.empty_like(probe)
    out[0, 0] = probe[0, 0] * pop
    out[1, 1] = probe[1, 1] + probe[0, 0] * (1.0 - pop)
    out[0, 1] = probe[0, 1] * coh
    out[1, 0] = probe[1, 0] * coh
    return out


def sample_schedule(schedule: CollisionSchedule) -> np.ndarray:
    """K Bernoulli(p) draws from a seeded PRNG; regular mode is all-true."""
    if schedule.mode == "regular":
        return np.ones(schedule.slots, dtype=bool)
    rng = np.random.default_rng(schedule.seed)
    return rng.random(schedule.slots) < schedule.p


def _map_to_superoperator(apply_map, dim: int = 2) -> np.ndarray:
    """4x4 (dim^2 x dim^2) matrix of a linear map on dim x dim matrices."""
    sup = np.empty((dim * dim, dim * dim), dtype=complex)
    for j in range(dim * dim):
        basis = np.zeros(dim * dim, dtype=complex)
        basis[j] = 1.0
        sup[:, j] = vectorize(apply_map(unvectorize(basis, dim)))
    return sup


def slot_superoperators(
    specs: list[ReservoirSpec],
    schedule: CollisionSchedule,
    noise: NoiseParams,
) -> tuple[np.ndarray, np.ndarray]:
    """(collision-slot map, idle-slot map) as 4x4 superoperators."""
    unitary = herm_unitary(build_interaction_hamiltonian(specs), schedule.tau)

    def collision_slot(rho):
        return decay_step(collide_once(rho, specs, schedule.tau, unitary), noise,
                          schedule.tau0)

    def idle_slot(rho):
        return decay_step(rho, noise, schedule.slot_time)

    return _map_to_superoperator(collision_slot), _map_to_superoperator(idle_slot)


def steady_state_estimate(
    bloch: np.ndarray, window: int, tol: float
) -> tuple[tuple[float, float, float], bool]:
    """Mean of the last ``window`` Bloch vectors; converged when the maximal
    component deviation from that mean inside the window is <= tol."""
    bloch = np.asarray(bloch, dtype=float)
    if window < 1 or 2 * window > len(bloch):
        raise ValueError(f"window must satisfy 1 <= window <= K/2 (got {window})")
    tail = bloch[-window:]
    mean = tail.mean(axis=0)
    converged = bool(np.max(np.abs(tail - mean)) <= tol)
    return (float(mean[0]), float(mean[1]), float(mean[2])), converged


def _check_physicality(vs: np.ndarray) -> None:
    """Vectorized density-matrix checks on every recorded slot state.

    vs has one column-stacked state per row: [rho_ee, rho_ge, rho_eg, rho_gg].
    Tolerances match check_density_matrix (1e-12 / 1e-9 / -1e-9).
    """
    herm = np.max(np.abs(vs[:, 1] - np.conj(vs[:, 2])))
    if herm > 1e-12:
        raise InvalidDensityMatrixError(f"slot state Hermiticity violation {herm}")
    trace_dev = np.max(np.abs(vs[:, 0] + vs[:, 3] - 1.0))
    if trace_dev > 1e-9:
        raise InvalidDensityMatrixError(f"slot state trace deviation {trace_dev}")
    diff = (vs[:, 0] - vs[:, 3]).real
    disc = np.sqrt(diff * diff + 4.0 * np.abs(vs[:, 2]) ** 2)
    eig_min = ((vs[:, 0] + vs[:, 3]).real - disc) / 2.0
    if eig_min.min() < -1e-9:
        raise InvalidDensityMatrixError(f"slot state eigenvalue {eig_min.min()}")


def simulate(
    probe0: np.ndarray,
    specs: list[ReservoirSpec],
    schedule: CollisionSchedule,
    noise: NoiseParams | None = None,
    steady_window: int = 1000,
    steady_tol: float = 0.01,
    validate_each_slot: bool = False,
    mixture: bool = False,
) -> TrajectoryRecord:
    """Run the full collision trajectory and record the probe Bloch vector.

    ``mixture=True`` switches to the alternative per-slot random-reservoir
    mode (one reservoir drawn per collision with probability proportional to
    its coupling) instead of the default simultaneous joint collision.  The
    simultaneous mode is the oracle path.
    """
    noise = noise or NoiseParams()
    if sum(s.coupling for s in specs) <= 0:
        raise ValueError("at least one reservoir must have coupling > 0")
    collided = sample_schedule(schedule)

    if mixture:
        weights = np.array([s.coupling for s in specs], dtype=float)
        weights = weights / weights.sum()
        rng = np.random.default_rng(schedule.seed + 1)
        choices = rng.choice(len(specs), size=schedule.slots, p=weights)
        per_reservoir = [
            slot_superoperators([s], schedule, noise)[0] for s in specs
        ]
        _, idle = slot_superoperators(specs[:1], schedule, noise)
    else:
        collision_map, idle = slot_superoperators(specs, schedule, noise)

    k = schedule.slots
    vs = np.empty((k, 4), dtype=complex)
    v = vectorize(np.asarray(probe0, dtype=complex))
    for n in range(k):
        if collided[n]:
            m = per_reservoir[choices[n]] if mixture else collision_map
        else:
            m = idle
        v = m @ v
        vs[n] = v

    if validate_each_slot:
        _check_physicality(vs)

    x = (vs[:, 2] + vs[:, 1]).real
    y = (1j * (vs[:, 2] - vs[:, 1])).real
    z = (vs[:, 0] - vs[:, 3]).real
    bloch = np.column_stack([x, y, z])

    window = min(steady_window, k // 2) or 1
    steady, converged = steady_state_estimate(bloch, window, steady_tol)
    times = schedule.slot_time * np.arange(1, k + 1)
    return TrajectoryRecord(
        slot_times=times,
        bloch=bloch,
        collided=collided,
        steady=steady,
        converged=converged,
        final_state=unvectorize(v, 2),
    )
