"""Bloch-parametrized qubit states, Pauli operators and reservoir moments.

Basis: (|e>, |g>).  sigma^- = |g><e|, so <sigma^-> of a reservoir unit is the
upper-right entry of its density matrix, e^{-i phi} sin(theta)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_P = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
SIGMA_M = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
IDENTITY = np.eye(2, dtype=complex)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BlochParams:
    """Polar angle theta in [0, pi], azimuth phi normalized to [0, 2*pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if theta < -1e-12 or theta > math.pi + 1e-12:
            raise ValueError(f"theta={theta} outside [0, pi]")
        theta = min(max(theta, 0.0), math.pi)
        phi = float(self.phi) % _TWO_PI
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class ReservoirMoments:
    """First and second moments of a reservoir unit's ladder operators."""

    sp: complex  # <sigma^+>
    sm: complex  # <sigma^->
    spm: float   # <sigma^+ sigma^-> (excited population)
    smp: float   # <sigma^- sigma^+> (ground population)
    sz: float    # <sigma_z>


def pure_state(p: BlochParams) -> np.ndarray:
    """Density matrix of |Psi(theta, phi)> = cos(t/2)|e> + e^{i phi} sin(t/2)|g>.

    [[ (1+cos t)/2,  e^{-i phi} sin(t)/2 ],
     [ e^{+i phi} sin(t)/2,  (1-cos t)/2 ]]
    """
    ct = math.cos(p.theta)
    half_sin = math.sin(p.theta) / 2.0
    off = np.exp(-1j * p.phi) * half_sin
    return np.array(
        [[(1 + ct) / 2, off], [np.conj(off), (1 - ct) / 2]], dtype=complex
    )


def pauli_expectations(rho: np.ndarray) -> tuple[float, float, float]:
    """Bloch vector (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z)."""
    rho = np.asarray(rho, dtype=complex)
    x = (rho[0, 1] + rho[1, 0]).real
    y = (1j * (rho[0, 1] - rho[1, 0])).real
    z = (rho[0, 0] - rho[1, 1]).real
    return (x, y, z)


def bloch_to_state(x: float, y: float, z: float) -> np.ndarray:
    """Inverse of pauli_expectations; coherence rho_eg = (x - i y)/2."""
    c = (x - 1j * y) / 2.0
    return np.array([[(1 + z) / 2, c], [np.conj(c), (1 - z) / 2]], dtype=complex)


def reservoir_moments(p: BlochParams) -> ReservoirMoments:
    sm = np.exp(-1j * p.phi) * math.sin(p.theta) / 2.0
    ct = math.cos(p.theta)
    return ReservoirMoments(
        sp=np.conj(sm),
        sm=sm,
        spm=(1 + ct) / 2.0,
        smp=(1 - ct) / 2.0,
        sz=ct,
    )


def plus_state() -> np.ndarray:
    """|+> = (|e> + |g>)/sqrt(2) as a density matrix."""
    return pure_state(BlochParams(math.pi / 2, 0.0))
