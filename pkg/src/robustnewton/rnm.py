"""The damped, modulus-decreasing Newton iteration and its near-critical
bypass variant, with per-step diagnostics and a runtime decrement oracle.

Every step moves by (Ck/3) * (u_k/|u_k|) * e^(i theta) where k is the first
non-negligible derivative order, u_k = p(z) * conj(p^(k)(z)/k!), and the
angle is chosen so the squared modulus F = |p|^2 drops by a computable
amount.  For k = 1 this is a damped Newton step and the iterate always lies
on the segment between z and the classic Newton iterate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from ._backend import kernels
from .errors import AtRootError, ModulusReductionError, NonFiniteError
from .poly import DerivativeTable, Polynomial, amplitude, normalized_derivatives

#: Relative zero-classification tolerance: a normalized derivative value is
#: treated as zero when its modulus is at most this times the amplitude.
ZERO_REL_TOL = 1e-12

_BRANCH_NAMES = {
    kernels.BR_PLAIN: "plain",
    kernels.BR_NEAR_ACCEPTED: "near_critical_accepted",
    kernels.BR_NEAR_REJECTED: "near_critical_rejected",
}


class Termination(enum.Enum):
    ROOT_TOLERANCE = "RootTolerance"
    PRODUCT_TOLERANCE = "ProductTolerance"
    MAX_ITERS = "MaxIters"


@dataclass(frozen=True)
class StepInfo:
    """All quantities of one step.

    delta_bound is the named a-priori decrement bound
    -|u_k|^(k+1) / (2 * 18^k * A^(2k)); first_bound is the tighter
    -9 A^2 (Ck/3)^(k+1).  Both are negative and first_bound <= delta_bound.
    """

    k: int
    u_k: complex
    gamma: float
    delta: float
    c_k: float
    theta: float
    C_k: float
    amplitude: float
    step_size: float
    direction: complex
    first_bound: float
    delta_bound: float
    branch: str = "plain"


@dataclass
class Orbit:
    """Iterate sequence with per-transition diagnostics.

    steps[t] describes the transition from points[t] to points[t+1]; a None
    entry is a classic Newton transition (hybrid tail).  fvals holds the
    squared modulus at each point; for the near-critical variant these refer
    to the monic-normalized polynomial.
    """

    points: list
    fvals: list
    steps: list
    termination: Termination

    @property
    def final(self) -> complex:
        return self.points[-1]

    @property
    def iterations(self) -> int:
        return len(self.points) - 1


def _validate_criteria(eps: float, max_iters: int) -> None:
    if not (0.0 <= eps < 1.0):
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")


def _require_iterable_degree(p: Polynomial) -> None:
    if p.degree < 2:
        raise ValueError(
            f"iteration requires degree >= 2, got degree {p.degree}"
        )


def k_index(d: DerivativeTable, rel_tol: float = ZERO_REL_TOL) -> int:
    """Smallest j >= 1 whose normalized derivative modulus exceeds
    rel_tol * amplitude.  The point must not be a root within tolerance."""
    amp = amplitude(d)
    k = kernels.pick_k(d.values, amp, rel_tol)
    if k == 0:
        raise AtRootError(
            "k-index undefined: |p(z)| is zero within tolerance; the caller "
            "should have stopped at this point"
        )
    return k


def modified_k_index(d: DerivativeTable, eps: float) -> int:
    """Smallest j >= 1 with raw derivative modulus |p^(j)(z)| > eps.

    Intended for monic-normalized polynomials, for which the raw n-th
    derivative is n! and the index always exists.
    """
    kbar = kernels.pick_kbar(d.values, eps)
    if kbar == 0:
        raise ValueError(
            "no derivative exceeds eps; is the polynomial monic-normalized?"
        )
    return kbar


def _build_info(d_values, k: int, amp: float, branch: str) -> tuple[complex, StepInfo]:
    u, gamma, delta, ck, theta, Ck = kernels.descent(d_values, k, amp)
    au = kernels.cabs(u)
    step_size = Ck / 3.0
    if k == 1:
        direction = -(u / au)
    elif theta == 0.0:
        direction = u / au
    else:
        direction = (u / au) * complex(math.cos(theta), math.sin(theta))
    first, second = kernels.bounds(k, au, amp, Ck)
    info = StepInfo(
        k=k,
        u_k=u,
        gamma=gamma,
        delta=delta,
        c_k=ck,
        theta=theta,
        C_k=Ck,
        amplitude=amp,
        step_size=step_size,
        direction=direction,
        first_bound=first,
        delta_bound=second,
        branch=branch,
    )
    return u, info


def descent_data(d: DerivativeTable, k: int) -> StepInfo:
    """Descent quantities (u_k, gamma, delta, c_k, theta, Ck, bounds) at the
    table's point for the given derivative index."""
    amp = amplitude(d)
    _, info = _build_info(d.values, k, amp, "plain")
    return info


def robust_step(
    p: Polynomial, z: complex, rel_tol: float = ZERO_REL_TOL
) -> tuple[complex, StepInfo]:
    """One damped step from z.  Raises AtRootError when z is already a root
    within tolerance."""
    d = normalized_derivatives(p, z)
    amp = amplitude(d)
    k = kernels.pick_k(d.values, amp, rel_tol)
    if k == 0:
        raise AtRootError("robust step undefined at a root within tolerance")
    u, info = _build_info(d.values, k, amp, "plain")
    z1 = kernels.apply_step(z, k, u, info.theta, info.C_k)
    return z1, info


def decrement_bound(info: StepInfo) -> tuple[float, float]:
    """The two a-priori decrement bounds (first, second) for the step.

    F(z1) - F(z0) <= first <= second < 0; second is the named per-step
    decrement (delta_bound).
    """
    return info.first_bound, info.delta_bound


_ORACLE_SLACK = 1e-9


def _check_decrement(F0: float, F1: float, info: StepInfo) -> None:
    if not math.isfinite(F1):
        raise NonFiniteError("polynomial modulus overflowed during iteration")
    if F1 - F0 > info.first_bound + _ORACLE_SLACK * (1.0 + F0):
        raise ModulusReductionError(
            f"step decreased F by {F0 - F1:.3e}, guaranteed at least "
            f"{-info.first_bound:.3e}"
        )


def _abs2(z: complex) -> float:
    return z.real * z.real + z.imag * z.imag


def run_rnm(
    p: Polynomial,
    seed: complex,
    eps: float = 1e-10,
    max_iters: int = 10**6,
    rel_tol: float = ZERO_REL_TOL,
) -> Orbit:
    """Iterate damped steps from the seed until |p| <= eps (RootTolerance),
    |p p'| <= eps (ProductTolerance), or max_iters transitions.

    Records every iterate with full step diagnostics and checks the
    guaranteed decrement each transition.
    """
    _require_iterable_degree(p)
    _validate_criteria(eps, max_iters)
    z = complex(seed)
    d = normalized_derivatives(p, z)
    points = [z]
    fvals = [_abs2(d.values[0])]
    steps: list = []
    while True:
        amp = amplitude(d)
        absp = kernels.cabs(d.values[0])
        if not math.isfinite(absp):
            raise NonFiniteError("polynomial modulus overflowed during iteration")
        absdp = kernels.cabs(d.values[1])
        if absp <= eps or absp <= rel_tol * amp:
            term = Termination.ROOT_TOLERANCE
            break
        if absp * absdp <= eps:
            term = Termination.PRODUCT_TOLERANCE
            break
        if len(steps) >= max_iters:
            term = Termination.MAX_ITERS
            break
        k = kernels.pick_k(d.values, amp, rel_tol)
        u, info = _build_info(d.values, k, amp, "plain")
        z1 = kernels.apply_step(z, k, u, info.theta, info.C_k)
        d = normalized_derivatives(p, z1)
        F1 = _abs2(d.values[0])
        _check_decrement(fvals[-1], F1, info)
        z = z1
        points.append(z)
        fvals.append(F1)
        steps.append(info)
    return Orbit(points=points, fvals=fvals, steps=steps, termination=term)


def run_modified_rnm(
    p: Polynomial,
    seed: complex,
    eps: float = 1e-10,
    max_iters: int = 10**6,
    rel_tol: float = ZERO_REL_TOL,
) -> Orbit:
    """Near-critical-bypassing iteration (internally monic-normalized).

    Plain steps while |p'| > eps.  Otherwise a trial iterate built from the
    first raw derivative above eps is accepted when its decrement beats half
    the named bound, else the plain step is taken.  Runs until |p| <= eps or
    max_iters; F values and the eps test refer to the monic polynomial.
    """
    _require_iterable_degree(p)
    _validate_criteria(eps, max_iters)
    pm = p.monic()
    coeffs = pm.coeffs
    z = complex(seed)
    d = normalized_derivatives(pm, z)
    points = [z]
    fvals = [_abs2(d.values[0])]
    steps: list = []
    while True:
        amp = amplitude(d)
        absp = kernels.cabs(d.values[0])
        if not math.isfinite(absp):
            raise NonFiniteError("polynomial modulus overflowed during iteration")
        if absp <= eps or absp <= rel_tol * amp:
            term = Termination.ROOT_TOLERANCE
            break
        if len(steps) >= max_iters:
            term = Termination.MAX_ITERS
            break
        F0 = fvals[-1]
        absdp = kernels.cabs(d.values[1])
        accepted = False
        if absdp <= eps:
            kbar = kernels.pick_kbar(d.values, eps)
            if kbar > 0:
                u, info = _build_info(d.values, kbar, amp, "near_critical_accepted")
                zbar = kernels.apply_step(z, kbar, u, info.theta, info.C_k)
                pbar = kernels.horner(coeffs, zbar)
                Fbar = _abs2(pbar)
                if math.isfinite(Fbar) and Fbar - F0 <= 0.5 * info.delta_bound:
                    z1, F1 = zbar, Fbar
                    accepted = True
        if not accepted:
            branch = "near_critical_rejected" if absdp <= eps else "plain"
            k = kernels.pick_k(d.values, amp, rel_tol)
            u, info = _build_info(d.values, k, amp, branch)
            z1 = kernels.apply_step(z, k, u, info.theta, info.C_k)
            F1 = _abs2(kernels.horner(coeffs, z1))
            _check_decrement(F0, F1, info)
        d = normalized_derivatives(pm, z1)
        z = z1
        points.append(z)
        fvals.append(_abs2(d.values[0]))
        steps.append(info)
    return Orbit(points=points, fvals=fvals, steps=steps, termination=term)


# ---------------------------------------------------------------------------
# Orbit trace serialization
# ---------------------------------------------------------------------------

TRACE_HEADER = "t,re,im,F,k,theta,C_k,step_size,delta_bound,branch"


def _g17(x: float) -> str:
    return format(x, ".17g")


def orbit_to_csv(orbit: Orbit) -> str:
    """CSV trace, one row per iterate; the step columns describe the
    outgoing transition and are empty on the terminal row."""
    lines = [TRACE_HEADER]
    for t, z in enumerate(orbit.points):
        row = [str(t), _g17(z.real), _g17(z.imag), _g17(orbit.fvals[t])]
        if t < len(orbit.steps):
            s = orbit.steps[t]
            if s is None:
                row += ["", "", "", "", "", "newton"]
            else:
                row += [
                    str(s.k),
                    _g17(s.theta),
                    _g17(s.C_k),
                    _g17(s.step_size),
                    _g17(s.delta_bound),
                    s.branch,
                ]
        else:
            row += ["", "", "", "", "", ""]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
