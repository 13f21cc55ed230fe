"""Quantum Fisher information of the steady-state family rho_ss(theta, phi).

The reference evaluator is the two-level determinant formula

    F = Tr[(d rho)^2] + Tr[(rho d rho)^2] / det(rho),

valid for mixed states.  Analytic single-reservoir expressions and the
closed-form parameter derivatives are provided alongside and validated
against it; where the published trigonometric theta expression disagrees
with the determinant formula at second order in xi, both values are
reported rather than adjudicated (see qfi_theta_comparison).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import ReservoirSpec
from .errors import PureStateError, SingularPointError
from .master import closed_form_steady_state, steady_coherence
from .states import BlochParams

DET_FLOOR = 1e-12

# evaluator tags
DETERMINANT = "determinant_formula"
ANALYTIC_THETA_SINGLE = "analytic_theta_single"
ANALYTIC_PHI = "analytic_phi"
FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True)
class QfiResult:
    value: float
    parameter: str
    method: str

    def __post_init__(self):
        if self.value < -1e-12:
            raise ValueError(f"QFI must be nonnegative, got {self.value}")


def qfi_tls(rho: np.ndarray, drho: np.ndarray, parameter: str = "theta",
            method: str = DETERMINANT) -> QfiResult:
    """Two-level determinant formula; needs det(rho) > 1e-12 (mixed state)."""
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    det = np.linalg.det(rho).real
    if det <= DET_FLOOR:
        raise PureStateError(
            f"det(rho)={det:.3g} too small; use the pure-state expression"
        )
    term1 = np.trace(drho @ drho).real
    rd = rho @ drho
    term2 = np.trace(rd @ rd).real / det
    value = term1 + term2
    return QfiResult(value=max(value, 0.0), parameter=parameter, method=method)


def dphi_rho(specs: list[ReservoirSpec], r: float, tau: float) -> np.ndarray:
    """Azimuth derivative of the closed-form steady state: zero diagonal,
    upper-right i*C, lower-left -i*C*."""
    c = steady_coherence(specs, r, tau)
    return np.array([[0.0, 1j * c], [-1j * np.conj(c), 0.0]], dtype=complex)


def dtheta_rho(specs: list[ReservoirSpec], r: float, tau: float) -> np.ndarray:
    """Polar-angle derivative of the closed-form steady state (all theta_i
    shifted together): diagonal -+ (1/2 Jsum) sum J_i^2 sin(theta_i),
    off-diagonal (i tau r / 2 Jsum) sum J_i J_j^2 cos(theta_i + theta_j) e^{-i phi_i}.
    """
    jsum = sum(s.coupling**2 for s in specs)
    diag = sum(s.coupling**2 * math.sin(s.params.theta) for s in specs) / (2 * jsum)
    off = 0j
    for si in specs:
        for sj in specs:
            off += (
                si.coupling
                * sj.coupling**2
                * math.cos(si.params.theta + sj.params.theta)
                * np.exp(-1j * si.params.phi)
            )
    off *= 1j * tau * r / (2 * jsum)
    return np.array([[-diag, off], [np.conj(off), diag]], dtype=complex)


def qfi_phi_analytic(specs: list[ReservoirSpec], r: float, tau: float) -> QfiResult:
    """Azimuth QFI as the explicit quadruple sum; equals 4 |C|^2.

    F_phi = (tau r / Jsum)^2 sum_{i,j,k,l} J_i J_j^2 J_k J_l^2
            sin(t_i) cos(t_j) sin(t_k) cos(t_l) e^{i (phi_i - phi_k)}
    """
    jsum = sum(s.coupling**2 for s in specs)
    total = 0j
    for si in specs:
        for sj in specs:
            for sk in specs:
                for sl in specs:
                    total += (
                        si.coupling * sj.coupling**2
                        * sk.coupling * sl.coupling**2
                        * math.sin(si.params.theta) * math.cos(sj.params.theta)
                        * math.sin(sk.params.theta) * math.cos(sl.params.theta)
                        * np.exp(1j * (si.params.phi - sk.params.phi))
                    )
    total *= (tau * r / jsum) ** 2
    if abs(total.imag) > 1e-14:
        raise AssertionError(f"symmetric sum has imaginary part {total.imag}")
    return QfiResult(value=max(total.real, 0.0), parameter="phi", method=ANALYTIC_PHI)


def qfi_theta_analytic_single(theta: float, xi: float) -> QfiResult:
    """Published trigonometric theta-QFI for a single reservoir, xi = tau r J / 2.

    Singular at the poles and wherever sin^2(theta) - xi^2 sin^2(2 theta)
    vanishes.  Note this expression gives 1 + 3 xi^2 at theta = pi/2 while the
    determinant formula gives 1 + 4 xi^2; both are reported side by side by
    qfi_theta_comparison.
    """
    s2 = math.sin(theta) ** 2
    s2t = math.sin(2 * theta)
    c2t = math.cos(2 * theta)
    denom = s2 - xi**2 * s2t**2
    if denom <= 1e-12:
        raise SingularPointError(f"denominator {denom:.3g} at theta={theta}")
    bracket = (
        s2 / 2
        + s2t**2 / 8
        + xi**2
        * (
            -1.5 * s2t * math.sin(4 * theta)
            + c2t**2
            + math.cos(theta) ** 2 * c2t**2
            - s2 * s2t**2
            + (xi**2 / 2) * math.sin(4 * theta) ** 2
        )
    )
    value = s2 / 2 + 2 * xi**2 * c2t**2 + bracket / denom
    return QfiResult(value=value, parameter="theta", method=ANALYTIC_THETA_SINGLE)


def qfi_theta_comparison(theta: float, j: float, r: float, tau: float) -> dict:
    """Evaluate the single-reservoir theta-QFI both ways at one point.

    Returns the trigonometric closed form and the determinant-formula value
    (with the analytic derivative), plus xi.  The two disagree at O(xi^2);
    the package reports both rather than silently adjusting either.
    """
    xi = tau * r * j / 2
    specs = [ReservoirSpec(BlochParams(theta, 0.0), j)]
    rho, _ = closed_form_steady_state(specs, r, tau)
    det_val = qfi_tls(rho, dtheta_rho(specs, r, tau), parameter="theta").value
    trig_val = qfi_theta_analytic_single(theta, xi).value
    return {
        "theta": theta,
        "xi": xi,
        "analytic_theta_single": trig_val,
        "determinant_formula": det_val,
    }


def finite_difference_drho(build_rho, param: float, step: float = 1e-6) -> np.ndarray:
    """Central finite difference of a density-matrix family."""
    hi = build_rho(param + step)
    lo = build_rho(param - step)
    return (hi - lo) / (2 * step)


@dataclass
class ScanResult:
    grid: np.ndarray
    values: np.ndarray
    argmax: float
    label: int | None


def qfi_scan_decide(
    specs_builder,
    grid: np.ndarray,
    r: float,
    tau: float,
    parameter: str = "theta",
    fd_step: float = 1e-6,
) -> ScanResult:
    """QFI across a trial grid, with the scan decision rule.

    ``specs_builder(delta)`` returns the reservoir list at trial value delta.
    At each grid point the QFI is evaluated with the determinant formula on
    the closed-form steady state, using a central finite difference of a
    global shift of the scanned parameter.  Points where the state is too
    pure for the determinant formula are skipped.  The label (theta scans
    only) is 0 when the argmax lies at or beyond pi/2, else 1; ties break
    toward the smaller trial value.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty trial grid")
    values = np.full(grid.shape, np.nan)

    for idx, delta in enumerate(grid):
        specs = specs_builder(float(delta))

        def rho_at(shift: float):
            shifted = [
                ReservoirSpec(
                    _shift_params(s.params, parameter, shift), s.coupling
                )
                for s in specs
            ]
            return closed_form_steady_state(shifted, r, tau)[0]

        try:
            rho = rho_at(0.0)
            drho = finite_difference_drho(rho_at, 0.0, fd_step)
            values[idx] = qfi_tls(rho, drho, parameter=parameter,
                                  method=FINITE_DIFFERENCE).value
        except (PureStateError, ValueError):
            continue

    if np.all(np.isnan(values)):
        raise SingularPointError("QFI undefined on the whole trial grid")
    best = int(np.nanargmax(values))
    argmax = float(grid[best])
    label = None
    if parameter == "theta":
        label = 0 if argmax >= math.pi / 2 else 1
    return ScanResult(grid=grid, values=values, argmax=argmax, label=label)


def _shift_params(params, parameter: str, shift: float):
    if parameter == "theta":
        theta = min(max(params.theta + shift, 0.0), math.pi)
        return BlochParams(theta, params.phi)
    return BlochParams(params.theta, params.phi + shift)
