"""Micromaser-style master equation layer: coefficients, Bloch ODEs,
closed-form steady state and the numeric Liouvillian cross-check.

Collisions at Poisson rate r, each of duration tau, coarse-grain to

    d rho/dt = -i[H_eff, rho]
               + (r tau^2 / 2) sum_i J_i^2 ( <s+s->_i L[sigma+] + <s-s+>_i L[sigma-] )
               + 2 r tau^2 sum_{i<j} J_i J_j ( <s+>_i <s+>_j Ls[sigma-]
                                             + <s->_i <s->_j Ls[sigma+] )

with H_eff = r tau sum_i J_i (<s->_i sigma+ + <s+>_i sigma-),
L[o] rho = 2 o rho o^dag - o^dag o rho - rho o^dag o and
Ls[o] rho = 2 o rho o - o^2 rho - rho o^2 (reservoir-coherence "squeezing"
terms, N(N-1)/2 pair sums).

Sign conventions below were fixed against the collision engine's short-time
slopes: the z pump term reads +2(gamma3p - gamma4m), which drives the probe
toward the reservoir-population-weighted magnetization (homogenization), and
the drive feedback enters dz as -2i(gamma1m c* - gamma2p c).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainOfValidityError
from .linalg import check_density_matrix
from .states import SIGMA_M, SIGMA_P, pauli_expectations, reservoir_moments
from .engine import ReservoirSpec


@dataclass(frozen=True)
class MicromaserCoefficients:
    """Rates entering the coarse-grained Bloch equations.

    gamma1m = r tau sum_i J_i <sigma_i^->          (drive, complex)
    gamma2p = conj(gamma1m)
    gamma3p = (r tau^2 / 2) sum_i J_i^2 <s+ s->_i  (pump toward |e>)
    gamma4m = (r tau^2 / 2) sum_i J_i^2 <s- s+>_i  (pump toward |g>)
    gamma5m = 2 r tau^2 sum_{i<j} J_i J_j <s->_i <s->_j
    gamma6p = conj(gamma5m)
    """

    gamma1m: complex
    gamma2p: complex
    gamma3p: float
    gamma4m: float
    gamma5m: complex
    gamma6p: complex
    r: float
    tau: float


def coefficients(specs: list[ReservoirSpec], r: float, tau: float) -> MicromaserCoefficients:
    if r <= 0 or tau <= 0:
        raise ValueError("r and tau must be > 0")
    moments = [reservoir_moments(s.params) for s in specs]
    js = [s.coupling for s in specs]
    g1 = r * tau * sum(j * m.sm for j, m in zip(js, moments))
    g3 = (r * tau**2 / 2) * sum(j * j * m.spm for j, m in zip(js, moments))
    g4 = (r * tau**2 / 2) * sum(j * j * m.smp for j, m in zip(js, moments))
    g5 = 2 * r * tau**2 * sum(
        js[i] * js[j] * moments[i].sm * moments[j].sm
        for i in range(len(specs))
        for j in range(i + 1, len(specs))
    )
    return MicromaserCoefficients(
        gamma1m=complex(g1),
        gamma2p=complex(np.conj(g1)),
        gamma3p=float(g3),
        gamma4m=float(g4),
        gamma5m=complex(g5),
        gamma6p=complex(np.conj(g5)),
        r=r,
        tau=tau,
    )


def bloch_rhs(v: tuple[float, float, float], c: MicromaserCoefficients) -> tuple[float, float, float]:
    """Right-hand side of the Bloch equations, coherence c = (x - i y)/2.

    dx/dt = -(g3+g4) x + i(g1-g2) z + 2(g5 c* + g6 c)
    dy/dt = -(g3+g4) y - (g1+g2) z + 2i(g5 c* - g6 c)
    dz/dt = -2(g3+g4) z + 2(g3-g4) - 2i(g1 c* - g2 c)

    The squeezing terms carry the factor 2 that the generator above implies
    (Ls contributes 2 o rho o), keeping this ODE the exact Bloch form of
    micromaser_liouvillian.
    """
    x, y, z = v
    coh = (x - 1j * y) / 2.0
    damp = c.gamma3p + c.gamma4m
    dx = (
        -damp * x
        + (1j * (c.gamma1m - c.gamma2p) * z).real
        + (2 * (c.gamma5m * np.conj(coh) + c.gamma6p * coh)).real
    )
    dy = (
        -damp * y
        - ((c.gamma1m + c.gamma2p) * z).real
        + (2j * (c.gamma5m * np.conj(coh) - c.gamma6p * coh)).real
    )
    dz = (
        -2 * damp * z
        + 2 * (c.gamma3p - c.gamma4m)
        - (2j * (c.gamma1m * np.conj(coh) - c.gamma2p * coh)).real
    )
    return (dx, dy, dz)


def integrate_bloch(
    v0: tuple[float, float, float],
    c: MicromaserCoefficients,
    t_end: float,
    dt: float,
) -> np.ndarray:
    """Fixed-step RK4 integration; returns rows (t, x, y, z) including t=0.

    Enforces dt <= 0.1 / (2 (gamma3p + gamma4m)) as a stability margin.
    """
    rate_scale = 2.0 * (c.gamma3p + c.gamma4m)
    if rate_scale > 0 and dt > 0.1 / rate_scale:
        raise ValueError(
            f"dt={dt} too large for relaxation scale; need <= {0.1 / rate_scale}"
        )
    steps = int(np.ceil(t_end / dt))
    out = np.empty((steps + 1, 4))
    v = np.array(v0, dtype=float)
    out[0] = (0.0, *v)

    def f(vv):
        return np.array(bloch_rhs(tuple(vv), c))

    for n in range(steps):
        k1 = f(v)
        k2 = f(v + 0.5 * dt * k1)
        k3 = f(v + 0.5 * dt * k2)
        k4 = f(v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[n + 1] = ((n + 1) * dt, *v)
    return out


def steady_coherence(specs: list[ReservoirSpec], r: float, tau: float) -> complex:
    """Upper-right entry of the closed-form steady state:

    C = (i tau r / (2 Jsum)) sum_{i,j} J_i J_j^2 sin(theta_i) cos(theta_j) e^{-i phi_i}
    """
    jsum = sum(s.coupling**2 for s in specs)
    total = 0j
    for si in specs:
        for sj in specs:
            total += (
                si.coupling
                * sj.coupling**2
                * np.sin(si.params.theta)
                * np.cos(sj.params.theta)
                * np.exp(-1j * si.params.phi)
            )
    return 1j * tau * r / (2 * jsum) * total


def closed_form_steady_state(
    specs: list[ReservoirSpec], r: float, tau: float
) -> tuple[np.ndarray, tuple[float, float, float]]:
    """Perturbative steady state: populations (1 +- Z)/2 with
    Z = sum J_i^2 cos(theta_i) / sum J_i^2, coherence ``steady_coherence``.

    Omits the pair (squeezing) corrections, which are higher order.  Raises
    DomainOfValidityError when the coherence exceeds the population bound
    (the perturbative formula is outside its regime there).
    """
    jsum = sum(s.coupling**2 for s in specs)
    if jsum <= 0:
        raise ValueError("sum of squared couplings must be > 0")
    z = sum(s.coupling**2 * np.cos(s.params.theta) for s in specs) / jsum
    coh = steady_coherence(specs, r, tau)
    pe = (1 + z) / 2
    pg = (1 - z) / 2
    if pe * pg < abs(coh) ** 2 - 1e-15:
        raise DomainOfValidityError(
            f"|C|={abs(coh):.3g} exceeds population bound sqrt(pe*pg)="
            f"{np.sqrt(max(pe * pg, 0)):.3g}; r*tau*J too large for the"
            " perturbative closed form"
        )
    rho = np.array([[pe, coh], [np.conj(coh), pg]], dtype=complex)
    check_density_matrix(rho, context="closed-form steady state")
    return rho, pauli_expectations(rho)


def _left(m: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), m)


def _right(m: np.ndarray) -> np.ndarray:
    return np.kron(m.T, np.eye(2))


def _lindblad_super(op: np.ndarray) -> np.ndarray:
    """L[o] rho = 2 o rho o^dag - o^dag o rho - rho o^dag o, vectorized."""
    od_o = op.conj().T @ op
    return 2 * np.kron(op.conj(), op) - _left(od_o) - _right(od_o)


def _squeeze_super(op: np.ndarray) -> np.ndarray:
    """Ls[o] rho = 2 o rho o - o^2 rho - rho o^2, vectorized."""
    o2 = op @ op
    return 2 * np.kron(op.T, op) - _left(o2) - _right(o2)


def micromaser_liouvillian(specs: list[ReservoirSpec], r: float, tau: float) -> np.ndarray:
    """Full coarse-grained generator as a 4x4 superoperator (column-stacking),
    including the effective drive and the pair squeezing terms."""
    c = coefficients(specs, r, tau)
    h_eff = c.gamma1m * SIGMA_P + c.gamma2p * SIGMA_M
    liou = -1j * (_left(h_eff) - _right(h_eff))
    liou = liou + c.gamma3p * _lindblad_super(SIGMA_P)
    liou = liou + c.gamma4m * _lindblad_super(SIGMA_M)
    liou = liou + c.gamma5m * _squeeze_super(SIGMA_P)
    liou = liou + c.gamma6p * _squeeze_super(SIGMA_M)
    return liou
