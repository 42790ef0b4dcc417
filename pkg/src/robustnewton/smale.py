"""Classic Newton steps, the alpha certification test, and the hybrid
solver: globally monotone damped iteration until the alpha test certifies
membership in the quadratic convergence region, then pure Newton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ._backend import kernels
from .errors import CriticalPointError, NonFiniteError
from .poly import DerivativeTable, Polynomial, amplitude, normalized_derivatives
from .rnm import (
    ZERO_REL_TOL,
    Orbit,
    Termination,
    _abs2,
    _build_info,
    _check_decrement,
    _validate_criteria,
)

#: Certification threshold (13 - 3*sqrt(17)) / 4 ~= 0.15767.
ALPHA0 = (13.0 - 3.0 * math.sqrt(17.0)) / 4.0

#: Hard cap on the pure-Newton tail before falling back to the damped loop.
NEWTON_PHASE_CAP = 200


@dataclass(frozen=True)
class AlphaReport:
    """Result of the quadratic-region certification test at one point."""

    beta: float
    gamma_s: float
    alpha: float
    certified: bool


@dataclass(frozen=True)
class HybridResult:
    root: complex
    orbit: Orbit
    switched_at: Optional[int]

    def __iter__(self):
        return iter((self.root, self.orbit, self.switched_at))


def newton_step(p: Polynomial, z: complex, rel_tol: float = ZERO_REL_TOL) -> complex:
    """z - p(z)/p'(z).  Raises CriticalPointError when the derivative is
    negligible relative to the amplitude at z."""
    d = normalized_derivatives(p, z)
    return _newton_from_table(d, rel_tol)


def _newton_from_table(d: DerivativeTable, rel_tol: float) -> complex:
    amp = amplitude(d)
    dp = d.values[1]
    if kernels.cabs(dp) <= rel_tol * amp:
        raise CriticalPointError(
            "Newton step undefined: |p'(z)| is zero within tolerance"
        )
    return d.point - d.values[0] / dp


def alpha_test(d: DerivativeTable, rel_tol: float = ZERO_REL_TOL) -> AlphaReport:
    """Certification quantities at the table's point.

    beta = |p/p'|, gamma_s = max over j >= 2 of |p^(j) / (j! p')|^(1/(j-1)),
    alpha = beta * gamma_s.  alpha <= ALPHA0 certifies that classic Newton
    converges quadratically from this point.
    """
    amp = amplitude(d)
    dp = d.values[1]
    absdp = kernels.cabs(dp)
    if absdp <= rel_tol * amp:
        raise CriticalPointError("alpha test undefined at a critical point")
    beta = kernels.cabs(d.values[0]) / absdp
    gamma_s = 0.0
    for j in range(2, d.degree + 1):
        r = kernels.cabs(d.values[j]) / absdp
        if r > 0.0:
            g = r ** (1.0 / (j - 1))
            if g > gamma_s:
                gamma_s = g
    alpha = beta * gamma_s
    return AlphaReport(beta=beta, gamma_s=gamma_s, alpha=alpha, certified=alpha <= ALPHA0)


def _greedy_pick(coeffs_monic, z_rnm: complex, z_newton: Optional[complex]) -> complex:
    if z_newton is None:
        return z_rnm
    fr = _abs2(kernels.horner(coeffs_monic, z_rnm))
    fn = _abs2(kernels.horner(coeffs_monic, z_newton))
    return z_newton if fn < fr else z_rnm


def hybrid_solve(
    p: Polynomial,
    seed: complex,
    eps: float,
    max_iters: int = 10**6,
    rel_tol: float = ZERO_REL_TOL,
    greedy_compare: bool = False,
) -> HybridResult:
    """Damped iteration until the alpha test certifies, then pure Newton.

    The damped phase runs the near-critical-bypassing loop on the monic
    normalization; the alpha test is evaluated at every iterate whose
    derivative is non-negligible.  After certification, Newton steps run
    until |p(z)| <= eps on the original polynomial (capped; on cap
    exhaustion the damped loop resumes).  With greedy_compare the damped
    phase also evaluates the classic Newton iterate and keeps whichever has
    the smaller residual.

    The returned orbit's F values refer to the original polynomial; steps
    entries are None for Newton transitions.  MaxIters is reported through
    the orbit's termination, never as an exception.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    _validate_criteria(eps, max_iters)
    if p.degree < 2:
        raise ValueError(f"hybrid solve requires degree >= 2, got {p.degree}")
    pm = p.monic()
    coeffs = p.coeffs
    coeffs_m = pm.coeffs
    scale = abs(p.leading)
    z = complex(seed)
    points = [z]
    fvals = [_abs2(kernels.horner(coeffs, z))]
    steps: list = []
    switched_at: Optional[int] = None
    newton_budget = 0
    term = Termination.MAX_ITERS
    while len(steps) < max_iters:
        d = normalized_derivatives(pm, z)
        amp = amplitude(d)
        absp = kernels.cabs(d.values[0])
        if not math.isfinite(absp):
            raise NonFiniteError("polynomial modulus overflowed during iteration")
        absdp = kernels.cabs(d.values[1])
        in_newton = switched_at is not None and newton_budget > 0
        if not in_newton and absdp > rel_tol * amp:
            report = alpha_test(d, rel_tol)
            if report.certified and switched_at is None:
                switched_at = len(steps)
                newton_budget = NEWTON_PHASE_CAP
                in_newton = True
        if absp * scale <= eps or absp <= rel_tol * amp:
            term = Termination.ROOT_TOLERANCE
            break
        if in_newton:
            z1 = _newton_from_table(d, rel_tol)
            newton_budget -= 1
            if not (math.isfinite(z1.real) and math.isfinite(z1.imag)):
                newton_budget = 0  # revert to the damped loop
                continue
            steps.append(None)
        else:
            F0 = _abs2(d.values[0])
            absdp_raw = absdp  # monic table, raw p' equals entry 1
            accepted = False
            if absdp_raw <= eps:
                kbar = kernels.pick_kbar(d.values, eps)
                if kbar > 0:
                    u, info = _build_info(d.values, kbar, amp, "near_critical_accepted")
                    zbar = kernels.apply_step(z, kbar, u, info.theta, info.C_k)
                    Fbar = _abs2(kernels.horner(coeffs_m, zbar))
                    if math.isfinite(Fbar) and Fbar - F0 <= 0.5 * info.delta_bound:
                        z1 = zbar
                        accepted = True
            if not accepted:
                branch = "near_critical_rejected" if absdp_raw <= eps else "plain"
                k = kernels.pick_k(d.values, amp, rel_tol)
                if k == 0:
                    term = Termination.ROOT_TOLERANCE
                    break
                u, info = _build_info(d.values, k, amp, branch)
                z1 = kernels.apply_step(z, k, u, info.theta, info.C_k)
                F1m = _abs2(kernels.horner(coeffs_m, z1))
                _check_decrement(F0, F1m, info)
            if greedy_compare:
                try:
                    zn = _newton_from_table(d, rel_tol)
                except CriticalPointError:
                    zn = None
                picked = _greedy_pick(coeffs_m, z1, zn)
                if picked is not z1:
                    z1 = picked
                    info = None  # classic Newton transition won the compare
            steps.append(info)
        z = z1
        points.append(z)
        fvals.append(_abs2(kernels.horner(coeffs, z)))
    else:
        term = Termination.MAX_ITERS
    orbit = Orbit(points=points, fvals=fvals, steps=steps, termination=term)
    return HybridResult(root=z, orbit=orbit, switched_at=switched_at)


def run_newton(
    p: Polynomial,
    seed: complex,
    eps: float = 1e-10,
    max_iters: int = 10**6,
    rel_tol: float = ZERO_REL_TOL,
) -> Orbit:
    """Recorded classic Newton orbit; raises CriticalPointError at a
    vanishing derivative."""
    _validate_criteria(eps, max_iters)
    z = complex(seed)
    points = [z]
    fvals = [_abs2(kernels.horner(p.coeffs, z))]
    steps: list = []
    while True:
        d = normalized_derivatives(p, z)
        absp = kernels.cabs(d.values[0])
        if not math.isfinite(absp):
            raise NonFiniteError("polynomial modulus overflowed during iteration")
        if absp <= eps:
            term = Termination.ROOT_TOLERANCE
            break
        if len(steps) >= max_iters:
            term = Termination.MAX_ITERS
            break
        z = _newton_from_table(d, rel_tol)
        points.append(z)
        fvals.append(_abs2(kernels.horner(p.coeffs, z)))
        steps.append(None)
    return Orbit(points=points, fvals=fvals, steps=steps, termination=term)
