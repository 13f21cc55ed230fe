"""Executable acceptance criteria.

Each criterion runs at its stated tolerance and reports a structured result;
``run_all`` powers both the pytest acceptance module and ``collisim verify``
(one JSON line per criterion).  Nothing here carries timestamps, so reports
are byte-identical for identical (seed, version).

One criterion, ``steady_state_oracle_grid``, is expected to FAIL: the exact
collision dynamics do not reproduce the closed-form populations once the
reservoir units carry coherence (the first-order exchange drive suppresses
the steady magnetization by 1 + 2|gamma1|^2/gamma_damp^2 while preserving its
sign).  See notes/decisions.md in the repository root for the analysis; the
criterion is implemented exactly as stated and left red rather than loosened.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import pattern_scan, random_pairs
from .engine import (
    CollisionSchedule,
    NoiseParams,
    ReservoirSpec,
    sample_schedule,
    simulate,
)
from .errors import InvalidDensityMatrixError
from .experiments import ExperimentConfig, REGISTRY, render_csv
from .master import closed_form_steady_state, steady_coherence
from .qfi import (
    dphi_rho,
    dtheta_rho,
    finite_difference_drho,
    qfi_phi_analytic,
    qfi_scan_decide,
    qfi_theta_comparison,
    qfi_tls,
)
from .states import BlochParams, plus_state
from .train import TrainConfig, actual_magnetization, cost, gradient, train

PI = math.pi
J_DEFAULT = 0.01
TAU = 3.0
SLOTS = 18000


@dataclass
class CriterionResult:
    id: str
    measured: float | str
    expected: float | str
    tolerance: float | str
    passed: bool
    detail: str = ""

    def to_json(self) -> str:
        def plain(v):
            if isinstance(v, (bool, np.bool_)):
                return bool(v)
            if isinstance(v, (int, np.integer)):
                return int(v)
            if isinstance(v, (float, np.floating)):
                return float(v)
            return v

        payload = {
            "id": self.id,
            "measured": plain(self.measured),
            "expected": plain(self.expected),
            "tolerance": plain(self.tolerance),
            "pass": plain(self.passed),
            "detail": self.detail,
        }
        return json.dumps(payload, sort_keys=True)


@dataclass
class AcceptanceContext:
    """Shared seed plus counters backing the physicality criterion."""

    seed: int = 12345
    validated_runs: int = 0
    physicality_violations: list[str] = field(default_factory=list)

    def simulate(self, probe0, specs, schedule, noise=None, **kw):
        kw.setdefault("validate_each_slot", True)
        try:
            traj = simulate(probe0, specs, schedule, noise, **kw)
        except InvalidDensityMatrixError as exc:
            self.physicality_violations.append(str(exc))
            raise
        self.validated_runs += 1
        return traj


def _spec(theta: float, phi: float = 0.0, j: float = J_DEFAULT) -> ReservoirSpec:
    return ReservoirSpec(BlochParams(theta, phi), j)


def _regular(slots: int = SLOTS, seed: int = 0) -> CollisionSchedule:
    return CollisionSchedule(tau=TAU, slots=slots, mode="regular", seed=seed)


def check_homogenization(ctx: AcceptanceContext) -> CriterionResult:
    """Single polar reservoir: final magnetization within 0.02 of +-1 and the
    steady diagonal within 0.02 of the reservoir diagonal."""
    devs = []
    for theta, target in ((0.0, 1.0), (PI, -1.0)):
        traj = ctx.simulate(plus_state(), [_spec(theta)], _regular(seed=ctx.seed))
        z = traj.bloch[-1, 2]
        devs.append(abs(z - target))
        # diagonal of the steady state vs the reservoir diagonal
        devs.append(abs((1 + traj.steady[2]) / 2 - (1 + target) / 2))
    measured = max(devs)
    return CriterionResult(
        id="homogenization_fig2a_fig2b",
        measured=measured,
        expected=0.0,
        tolerance=0.02,
        passed=measured <= 0.02,
        detail="final <sigma_z> and steady diagonal vs polar reservoirs",
    )


def check_oracle_grid(ctx: AcceptanceContext) -> CriterionResult:
    """10x10 interior (theta1, theta2) grid: simulated steady <sigma_z> vs the
    closed-form quadratic-weight formula, tolerance 0.02 at every point.

    Expected to fail: see the module docstring and notes/decisions.md.
    """
    axis = np.linspace(0.0, PI, 12)[1:-1]
    schedule = _regular(seed=ctx.seed)
    worst = 0.0
    worst_at = (0.0, 0.0)
    sign_mismatches = 0
    for t1 in axis:
        for t2 in axis:
            specs = [_spec(float(t1)), _spec(float(t2))]
            traj = ctx.simulate(plus_state(), specs, schedule)
            z_closed = (math.cos(t1) + math.cos(t2)) / 2
            dev = abs(traj.steady[2] - z_closed)
            if dev > worst:
                worst, worst_at = dev, (float(t1), float(t2))
            if abs(z_closed) > 1e-6 and np.sign(traj.steady[2]) != np.sign(z_closed):
                sign_mismatches += 1
    return CriterionResult(
        id="steady_state_oracle_grid",
        measured=worst,
        expected=0.0,
        tolerance=0.02,
        passed=worst <= 0.02,
        detail=(
            f"worst at theta=({worst_at[0]:.3f},{worst_at[1]:.3f});"
            f" sign mismatches {sign_mismatches}/100; coherent reservoir units"
            " drive the probe and suppress the steady magnetization, so the"
            " closed-form populations hold only near the poles"
            " (see notes/decisions.md)"
        ),
    )


def check_fig3_value(ctx: AcceptanceContext) -> CriterionResult:
    specs = [_spec(0.0, j=0.00737), _spec(PI, j=0.00263)]
    schedule = _regular(seed=ctx.seed)
    _, bloch = closed_form_steady_state(specs, 1.0 / schedule.slot_time, TAU)
    closed = bloch[2]
    traj = ctx.simulate(
        plus_state(), specs, schedule, NoiseParams(gamma_theta=2e-5)
    )
    sim_dev = abs(traj.steady[2] - closed)
    four_digit = round(closed, 4)

    neg_specs = [_spec(0.0, j=0.0036), _spec(PI, j=0.00631)]
    _, neg_bloch = closed_form_steady_state(neg_specs, 1.0 / schedule.slot_time, TAU)
    residual = neg_bloch[2] - (-0.492)

    passed = four_digit == 0.7741 and sim_dev <= 0.02
    return CriterionResult(
        id="fig3_value",
        measured=closed,
        expected=0.7741,
        tolerance=0.02,
        passed=passed,
        detail=(
            f"closed form {closed:.6f} (4 digits: {four_digit}),"
            f" simulation deviation {sim_dev:.4f};"
            f" quoted -0.492 point: nearest corrected couplings give"
            f" {neg_bloch[2]:.4f}, residual {residual:+.4f}"
            " (inconsistent quoted input, logged not asserted)"
        ),
    )


def check_fig4a_boundary(ctx: AcceptanceContext) -> CriterionResult:
    """Zero crossing of the steady magnetization on the 19x19 grid lies on
    theta1 + theta2 = pi within one grid step."""
    steps = 19
    axis = np.linspace(0.0, PI, steps)
    step = axis[1] - axis[0]
    schedule = _regular(seed=ctx.seed)
    worst = 0.0
    for t1 in axis:
        signs = []
        for t2 in axis:
            specs = [_spec(float(t1)), _spec(float(t2))]
            traj = ctx.simulate(plus_state(), specs, schedule)
            signs.append(traj.steady[2] >= 0)
        boundary = PI - t1
        flip = next((j for j in range(steps) if not signs[j]), None)
        if flip is None:
            crossing_dev = abs(axis[-1] - boundary)
        else:
            # boundary lies between axis[flip-1] and axis[flip]
            lo = axis[flip - 1] if flip > 0 else axis[0]
            hi = axis[flip]
            crossing_dev = 0.0 if lo - 1e-9 <= boundary <= hi + 1e-9 else min(
                abs(lo - boundary), abs(hi - boundary)
            )
        worst = max(worst, crossing_dev)
    in_steps = worst / step
    return CriterionResult(
        id="fig4a_boundary",
        measured=in_steps,
        expected=0.0,
        tolerance=1.0,
        passed=in_steps <= 1.0,
        detail="max distance (in grid steps) of the sign crossing from theta1+theta2=pi",
    )


def check_patterns(ctx: AcceptanceContext) -> CriterionResult:
    """32 seeded pairs per parameter space: simulator and closed-form labels
    identical away from the boundary (>= 0.05), overall agreement >= 95%."""
    schedule = _regular(seed=ctx.seed)
    results = {}
    for space, seed in (("theta", ctx.seed), ("phi", ctx.seed + 1)):
        pairs = random_pairs(space, 32, seed)
        scan = pattern_scan(pairs, space=space, engine="simulate", schedule=schedule)
        ctx.validated_runs += len(scan.points)
        results[space] = (
            scan.agreement,
            scan.agreement_away_from_boundary(0.05),
        )
    overall = min(results["theta"][0], results["phi"][0])
    away = min(results["theta"][1], results["phi"][1])
    passed = away == 1.0 and overall >= 0.95
    return CriterionResult(
        id="classification_patterns",
        measured=overall,
        expected=1.0,
        tolerance=0.05,
        passed=passed,
        detail=(
            f"theta space agreement {results['theta'][0]:.3f}"
            f" (away from boundary {results['theta'][1]:.3f});"
            f" phi space agreement {results['phi'][0]:.3f}"
            f" (away {results['phi'][1]:.3f})"
        ),
    )


def check_qfi_consistency(ctx: AcceptanceContext) -> CriterionResult:
    rng = np.random.default_rng(ctx.seed)
    r, tau = 0.2, TAU

    # (a) quadruple sum equals 4 |C|^2 within 1e-12
    dev_a = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        specs = [
            ReservoirSpec(
                BlochParams(rng.uniform(0.1, PI - 0.1), rng.uniform(0.0, 2 * PI)),
                rng.uniform(0.005, 0.02),
            )
            for _ in range(n)
        ]
        analytic = qfi_phi_analytic(specs, r, tau).value
        coh = 4 * abs(steady_coherence(specs, r, tau)) ** 2
        dev_a = max(dev_a, abs(analytic - coh))

    # (b) determinant formula, analytic derivative vs finite differences
    dev_b = 0.0
    for _ in range(25):
        specs = [
            ReservoirSpec(
                BlochParams(rng.uniform(0.4, PI - 0.4), rng.uniform(0.0, 2 * PI)),
                rng.uniform(0.005, 0.02),
            )
            for _ in range(2)
        ]
        rho, _ = closed_form_steady_state(specs, r, tau)

        def rho_theta(h, specs=specs):
            shifted = [
                ReservoirSpec(BlochParams(s.params.theta + h, s.params.phi), s.coupling)
                for s in specs
            ]
            return closed_form_steady_state(shifted, r, tau)[0]

        def rho_phi(h, specs=specs):
            shifted = [
                ReservoirSpec(BlochParams(s.params.theta, s.params.phi + h), s.coupling)
                for s in specs
            ]
            return closed_form_steady_state(shifted, r, tau)[0]

        f_an_t = qfi_tls(rho, dtheta_rho(specs, r, tau)).value
        f_fd_t = qfi_tls(rho, finite_difference_drho(rho_theta, 0.0)).value
        dev_b = max(dev_b, abs(f_an_t - f_fd_t) / max(f_an_t, 1e-30))
        f_an_p = qfi_tls(rho, dphi_rho(specs, r, tau), parameter="phi").value
        f_fd_p = qfi_tls(rho, finite_difference_drho(rho_phi, 0.0), parameter="phi").value
        dev_b = max(dev_b, abs(f_an_p - f_fd_p) / max(f_an_p, 1e-30))

    # (c) single reservoir phi-QFI at theta = pi/4
    xi = tau * r * J_DEFAULT / 2
    value = qfi_phi_analytic([_spec(PI / 4)], r, tau).value
    expected_c = xi**2 * math.sin(2 * PI / 4) ** 2
    dev_c = abs(value - expected_c)

    measured = max(dev_a / 1e-12, dev_b / 1e-6, dev_c / 1e-12)
    return CriterionResult(
        id="qfi_consistency",
        measured=measured,
        expected=0.0,
        tolerance=1.0,
        passed=measured <= 1.0,
        detail=(
            f"quadruple sum vs 4|C|^2 dev {dev_a:.2e} (tol 1e-12);"
            f" analytic vs finite-difference relative dev {dev_b:.2e} (tol 1e-6);"
            f" single-reservoir value {value:.6e} vs xi^2 sin^2(2 theta)"
            f" = {expected_c:.6e}, dev {dev_c:.2e} (tol 1e-12);"
            " measured is the worst deviation normalized to its tolerance"
        ),
    )


def check_qfi_scan(ctx: AcceptanceContext) -> CriterionResult:
    r, tau, j = 0.2, TAU, J_DEFAULT
    grid = np.linspace(0.0, PI, 181)
    step = grid[1] - grid[0]

    mirror = qfi_scan_decide(
        lambda d: [_spec(d, j=j), _spec(PI - d, j=j)], grid, r, tau
    )
    fixed2 = qfi_scan_decide(
        lambda d: [_spec(d, j=j), _spec(11 * PI / 12, j=j)], grid, r, tau
    )
    fixed1 = qfi_scan_decide(
        lambda d: [_spec(PI / 12, j=j), _spec(d, j=j)], grid, r, tau
    )
    devs = [
        abs(mirror.argmax - PI / 2),
        abs(fixed2.argmax - 11 * PI / 12),
        abs(fixed1.argmax - PI / 12),
    ]
    labels_ok = fixed2.label == 0 and fixed1.label == 1
    comparison = qfi_theta_comparison(PI / 2, j, r, tau)
    xi = comparison["xi"]
    measured = max(devs) / step
    passed = measured <= 1.0 and labels_ok
    return CriterionResult(
        id="qfi_scan",
        measured=measured,
        expected=0.0,
        tolerance=1.0,
        passed=passed,
        detail=(
            f"argmaxes (rad): mirror {mirror.argmax:.4f} (target pi/2),"
            f" theta2-fixed {fixed2.argmax:.4f} -> label {fixed2.label},"
            f" theta1-fixed {fixed1.argmax:.4f} -> label {fixed1.label};"
            f" theta-QFI evaluator comparison at theta=pi/2, xi={xi:g}:"
            f" trigonometric closed form {comparison['analytic_theta_single']:.9f}"
            f" (= 1+3 xi^2), determinant formula"
            f" {comparison['determinant_formula']:.9f} (= 1+4 xi^2)"
        ),
    )


def check_training(ctx: AcceptanceContext) -> CriterionResult:
    config = TrainConfig(
        eta=2.6e-5, target=0.42, sz=(0.94, -0.10), j_init=(0.002, 0.05),
        max_iters=200000, cost_tol=1e-8,
    )
    trace = train(config)
    arr = trace.as_array()
    costs = arr[:, 4]
    initial_ok = abs(costs[0] - 0.13434) <= 1e-5
    monotone = bool(np.all(np.diff(costs) <= 1e-15))
    final_a_dev = abs(arr[-1, 3] - 0.42)
    ratio_dev = abs(abs(arr[-1, 1] / arr[-1, 2]) - 1.0)

    rng = np.random.default_rng(ctx.seed)
    grad_dev = 0.0
    for _ in range(100):
        j = (rng.uniform(0.005, 0.1), rng.uniform(0.005, 0.1))
        sz = (rng.uniform(-1, 1), rng.uniform(-1, 1))
        target = rng.uniform(-1, 1)
        g = gradient(j, sz, target)
        for axis in (0, 1):

            def f(x, axis=axis):
                jj = list(j)
                jj[axis] = x
                return cost(target, actual_magnetization(tuple(jj), sz))

            x0 = j[axis]
            # Richardson-extrapolated central difference: O(h^4) truncation
            # lets h stay large enough to avoid cancellation noise
            h = 1e-3 * max(abs(x0), 0.01)
            d1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
            d2 = (f(x0 + h / 2) - f(x0 - h / 2)) / h
            fd = (4 * d2 - d1) / 3
            scale = max(abs(g[axis]), 1e-6)
            grad_dev = max(grad_dev, abs(g[axis] - fd) / scale)

    passed = (
        initial_ok and monotone and final_a_dev < 1e-3 and ratio_dev < 0.01
        and grad_dev <= 1e-8
    )
    return CriterionResult(
        id="training",
        measured=final_a_dev,
        expected=0.0,
        tolerance=1e-3,
        passed=passed,
        detail=(
            f"initial cost {costs[0]:.5f} (target 0.13434), monotone={monotone},"
            f" final |A-0.42|={final_a_dev:.2e}, |J1/J2 - 1|={ratio_dev:.4f},"
            f" max gradient-vs-FD relative dev {grad_dev:.2e} (tol 1e-8),"
            f" iterations {int(arr[-1, 0])}"
        ),
    )


def check_statistics(ctx: AcceptanceContext) -> CriterionResult:
    cases = [(0.96, 16666), (0.5, 100000), (0.01, 1000000)]
    worst = 0.0
    details = []
    for i, (p, k) in enumerate(cases):
        schedule = CollisionSchedule(
            tau=TAU, slots=k, p=p, mode="stochastic", seed=ctx.seed + i
        )
        count = int(sample_schedule(schedule).sum())
        sigma = math.sqrt(k * p * (1 - p))
        dev = abs(count - p * k) / (3 * sigma)
        worst = max(worst, dev)
        details.append(f"(p={p}, K={k}): count {count}, mean {p*k:.0f}, dev {dev:.2f}x3sigma")

    derived = CollisionSchedule.from_mean_interactions(16000, 3.0, 5e4)
    p_exact = derived.p == 0.96
    passed = worst <= 1.0 and p_exact
    return CriterionResult(
        id="statistics",
        measured=worst,
        expected=0.0,
        tolerance=1.0,
        passed=passed,
        detail="; ".join(details) + f"; p relation <k> tau / T -> {derived.p} "
        f"({'exactly 0.96' if p_exact else 'NOT 0.96'})",
    )


def check_physicality(ctx: AcceptanceContext) -> CriterionResult:
    violations = len(ctx.physicality_violations)
    return CriterionResult(
        id="physicality",
        measured=violations,
        expected=0,
        tolerance=0,
        passed=violations == 0 and ctx.validated_runs > 0,
        detail=(
            f"{ctx.validated_runs} validated trajectories; every intermediate"
            " probe state checked at tolerances 1e-12 / 1e-9 / -1e-9"
        ),
    )


def check_determinism(ctx: AcceptanceContext) -> CriterionResult:
    def render(experiment: str) -> bytes:
        config = ExperimentConfig(
            experiment=experiment,
            params=dict(REGISTRY[experiment].defaults),
            seed=ctx.seed,
        )
        payloads = REGISTRY[experiment].runner(config)
        return b"".join(render_csv(config, payload) for payload in payloads)

    identical = all(render(e) == render(e) for e in ("fig2a", "fig4c"))
    return CriterionResult(
        id="determinism",
        measured="identical" if identical else "different",
        expected="identical",
        tolerance="byte-identical",
        passed=identical,
        detail="fig2a and fig4c payloads rendered twice with the same seed",
    )


CRITERIA = [
    check_homogenization,
    check_oracle_grid,
    check_fig3_value,
    check_fig4a_boundary,
    check_patterns,
    check_qfi_consistency,
    check_qfi_scan,
    check_training,
    check_statistics,
    check_physicality,
    check_determinism,
]


def run_all(seed: int = 12345) -> list[CriterionResult]:
    ctx = AcceptanceContext(seed=seed)
    results = []
    for criterion in CRITERIA:
        results.append(criterion(ctx))
    return results


def to_jsonl(results: list[CriterionResult]) -> str:
    return "\n".join(r.to_json() for r in results) + "\n"
