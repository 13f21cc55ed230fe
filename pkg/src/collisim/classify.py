"""Binary decision rules over steady-state Pauli observables and the
pattern-generation sweeps behind the classification figures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import CollisionSchedule, NoiseParams, ReservoirSpec, simulate
from .master import closed_form_steady_state
from .states import BlochParams, plus_state

CLASS1 = "class1"
CLASS2 = "class2"


@dataclass(frozen=True)
class Decision:
    label: str
    observable_value: float
    rule: str


def decide_theta(sz_ss: float) -> Decision:
    """class1 iff steady <sigma_z> >= 0 (ties go to class1)."""
    label = CLASS1 if sz_ss >= 0 else CLASS2
    return Decision(label=label, observable_value=float(sz_ss), rule="theta_rule")


def decide_phi(sy_ss: float, sz_ss: float) -> Decision:
    """Azimuth rule, conditioned on the hemisphere of the theta decision:
    for sz >= 0, class1 iff sy >= 0; for sz < 0 the assignment flips."""
    if sz_ss >= 0:
        label = CLASS1 if sy_ss >= 0 else CLASS2
    else:
        label = CLASS2 if sy_ss >= 0 else CLASS1
    return Decision(label=label, observable_value=float(sy_ss), rule="phi_rule")


@dataclass
class PatternPoint:
    p1: float
    p2: float
    observable: float
    label: str
    closed_form_label: str
    boundary_distance: float


@dataclass
class PatternResult:
    space: str
    engine: str
    points: list[PatternPoint] = field(default_factory=list)

    @property
    def agreement(self) -> float:
        """Fraction of points whose label matches the closed-form label."""
        if not self.points:
            return 1.0
        hits = sum(p.label == p.closed_form_label for p in self.points)
        return hits / len(self.points)

    def agreement_away_from_boundary(self, min_distance: float) -> float:
        pts = [p for p in self.points if p.boundary_distance >= min_distance]
        if not pts:
            return 1.0
        return sum(p.label == p.closed_form_label for p in pts) / len(pts)


def random_pairs(space: str, n: int, seed: int) -> np.ndarray:
    """Seeded parameter pairs: theta pairs in (0, pi)^2, or phi pairs with
    phi1 in (0, pi) and phi2 in (pi, 2 pi)."""
    rng = np.random.default_rng(seed)
    if space == "theta":
        return rng.uniform(0.0, math.pi, size=(n, 2))
    if space == "phi":
        p1 = rng.uniform(0.0, math.pi, size=n)
        p2 = rng.uniform(math.pi, 2 * math.pi, size=n)
        return np.column_stack([p1, p2])
    raise ValueError(f"unknown space {space!r}")


def grid_pairs(lo: float, hi: float, steps: int) -> np.ndarray:
    axis = np.linspace(lo, hi, steps)
    a, b = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def theta_boundary_distance(t1: float, t2: float) -> float:
    """Perpendicular distance to the equal-coupling boundary t1 + t2 = pi."""
    return abs(t1 + t2 - math.pi) / math.sqrt(2.0)


def phi_boundary_distance(p1: float, p2: float) -> float:
    """Local distance to the cos(p1) + cos(p2) = 0 curve (first-order estimate)."""
    grad = math.hypot(math.sin(p1), math.sin(p2))
    if grad < 1e-12:
        return abs(math.cos(p1) + math.cos(p2))
    return abs(math.cos(p1) + math.cos(p2)) / grad


def _specs_for(space: str, p1: float, p2: float, coupling: float,
               fixed_theta: float) -> list[ReservoirSpec]:
    if space == "theta":
        return [
            ReservoirSpec(BlochParams(p1, 0.0), coupling),
            ReservoirSpec(BlochParams(p2, 0.0), coupling),
        ]
    return [
        ReservoirSpec(BlochParams(fixed_theta, p1), coupling),
        ReservoirSpec(BlochParams(fixed_theta, p2), coupling),
    ]


def _decide(space: str, bloch: tuple[float, float, float], quadrature: str) -> Decision:
    x, y, z = bloch
    if space == "theta":
        return decide_theta(z)
    transverse = y if quadrature == "y" else x
    return decide_phi(transverse, z)


def pattern_scan(
    pairs: np.ndarray,
    space: str = "theta",
    engine: str = "closed_form",
    coupling: float = 0.01,
    fixed_theta: float = math.pi / 3,
    tau: float = 3.0,
    r: float | None = None,
    schedule: CollisionSchedule | None = None,
    quadrature: str = "y",
) -> PatternResult:
    """Label every parameter pair by the configured engine.

    engine="closed_form" evaluates the analytic steady state; "simulate" runs
    the collision engine (regular statistics, no noise by default) and reports
    agreement with the closed-form labels.  The monitored transverse
    quadrature for the phi rule defaults to <sigma_y>, with "x" available in
    case the opposite quadrature carries the azimuth signal.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.size == 0:
        raise ValueError("empty parameter range")
    if engine not in ("closed_form", "simulate"):
        raise ValueError(f"unknown engine {engine!r}")
    if schedule is None:
        schedule = CollisionSchedule(tau=tau, slots=18000, mode="regular")
    if r is None:
        r = 1.0 / schedule.slot_time

    result = PatternResult(space=space, engine=engine)
    for p1, p2 in pairs:
        specs = _specs_for(space, p1, p2, coupling, fixed_theta)
        _, closed_bloch = closed_form_steady_state(specs, r, schedule.tau)
        closed_label = _decide(space, closed_bloch, quadrature).label
        if engine == "closed_form":
            bloch = closed_bloch
        else:
            traj = simulate(plus_state(), specs, schedule, NoiseParams(),
                            validate_each_slot=True)
            bloch = traj.steady
        decision = _decide(space, bloch, quadrature)
        dist = (
            theta_boundary_distance(p1, p2)
            if space == "theta"
            else phi_boundary_distance(p1, p2)
        )
        result.points.append(
            PatternPoint(
                p1=float(p1),
                p2=float(p2),
                observable=decision.observable_value,
                label=decision.label,
                closed_form_label=closed_label,
                boundary_distance=float(dist),
            )
        )
    return result
