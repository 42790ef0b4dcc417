"""End-to-end root solvers: closed-form quadratics, critical-point-seeded
cubics, and general all-roots solving by deflation with a final polish pass
on the original polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ConvergenceFailure
from .poly import Polynomial, deflate, evaluate, normalized_derivatives, root_radius
from .rnm import Termination, run_modified_rnm
from .smale import hybrid_solve

#: Iteration budget for each internal single-root solve.
DEFAULT_MAX_ITERS = 500_000

#: Roots are polished at least this hard (when eps is looser) so deflation
#: error does not leak into reported values.
_POLISH_FLOOR = 1e-10


@dataclass(frozen=True)
class RootSet:
    """Approximated roots with residuals on the original polynomial and a
    per-root method tag (closed_form, rnm, hybrid, or polished)."""

    roots: tuple
    residuals: tuple
    method: tuple

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _rootset(p: Polynomial, roots, methods) -> RootSet:
    res = tuple(abs(evaluate(p, r)) for r in roots)
    return RootSet(roots=tuple(roots), residuals=res, method=tuple(methods))


def solve_quadratic(p: Polynomial) -> RootSet:
    """Both roots of a degree-2 polynomial by the numerically stable
    formula (large-magnitude root first, the other as a0/(a2 r1))."""
    if p.degree != 2:
        raise ValueError(f"solve_quadratic requires degree 2, got {p.degree}")
    a0, a1, a2 = p.coeffs
    if a1 == 0j:
        r = cmath.sqrt(-a0 / a2)
        return _rootset(p, [r, -r], ["closed_form"] * 2)
    s = cmath.sqrt(a1 * a1 - 4.0 * a2 * a0)
    # pick the sign that avoids cancellation in a1 +/- s
    if (a1.conjugate() * s).real >= 0.0:
        q = -0.5 * (a1 + s)
    else:
        q = -0.5 * (a1 - s)
    if q == 0j:  # a0 == 0 with a1 != 0
        return _rootset(p, [0j, -a1 / a2], ["closed_form"] * 2)
    return _rootset(p, [q / a2, a0 / q], ["closed_form"] * 2)


def critical_points(p: Polynomial, max_iters: int = DEFAULT_MAX_ITERS) -> tuple:
    """Roots of p', ordered as returned by the derivative solve."""
    if p.degree < 2:
        raise ValueError("critical points require degree >= 2")
    return tuple(solve_all(p.derivative(), eps=1e-12, max_iters=max_iters).roots)


def critical_threshold(p: Polynomial, eps: float, max_iters: int = DEFAULT_MAX_ITERS) -> float:
    """Minimum of |p(w)| over critical points w that are not roots
    (|p(w)| > eps); +inf when every critical point is a root.

    Orbits seeded strictly below this value terminate at a root, never at a
    critical point.
    """
    if p.degree < 2:
        raise ValueError("critical threshold requires degree >= 2")
    best = math.inf
    for w in critical_points(p, max_iters=max_iters):
        m = abs(evaluate(p, w))
        if m > eps and m < best:
            best = m
    return best


def _polish(p: Polynomial, root: complex, eps: float, max_iters: int):
    """Re-solve on the original polynomial from an approximate root.

    Polishes toward min(eps, _POLISH_FLOOR) but accepts any result meeting
    eps.  Returns (root, residual) or None when even eps is unreachable.
    The budget is kept small: from a near-root seed the certified tail
    needs a handful of steps, and an unreachable target (near-multiple
    roots, float noise floor) must not stall the solve.
    """
    target = min(eps, _POLISH_FLOOR)
    res = hybrid_solve(p, root, target, max_iters=min(max_iters, 2000))
    cand = res.root
    r = abs(evaluate(p, cand))
    if r <= eps:
        return cand, r
    r0 = abs(evaluate(p, root))
    if r0 <= eps:
        return root, r0
    return None


def solve_cubic(p: Polynomial, eps: float, max_iters: int = DEFAULT_MAX_ITERS) -> RootSet:
    """All three roots of a cubic, seeded at the critical point of smaller
    polynomial modulus.

    The critical points come from the closed-form quadratic p' = 0.  If the
    chosen one is a root it is taken directly; otherwise the bypassing
    iteration started there descends to a first root.  The remaining
    quadratic is solved in closed form and every root is polished on the
    original cubic.
    """
    if p.degree != 3:
        raise ValueError(f"solve_cubic requires degree 3, got {p.degree}")
    crits = solve_quadratic(p.derivative()).roots
    c = min(crits, key=lambda w: abs(evaluate(p, w)))
    if abs(evaluate(p, c)) <= eps:
        first = c
    else:
        orbit = run_modified_rnm(p, c, eps=eps, max_iters=max_iters)
        if orbit.termination is not Termination.ROOT_TOLERANCE:
            raise ConvergenceFailure(
                "cubic solve exhausted its iteration budget",
                partial=_rootset(p, [], []),
            )
        first = orbit.final
    q, _ = deflate(p, first)
    rest = solve_quadratic(q).roots
    roots = []
    methods = []
    for r in (first, *rest):
        polished = _polish(p, r, eps, max_iters)
        if polished is None:
            raise ConvergenceFailure(
                "cubic polish exhausted its iteration budget",
                partial=_rootset(p, roots, methods),
            )
        roots.append(polished[0])
        methods.append("polished")
    return _rootset(p, roots, methods)


def _first_seed(p: Polynomial, rel_tol: float = 1e-9) -> complex:
    """Deterministic seed: the origin unless p'(0) is negligible there,
    else a point at half the root-radius bound at angle one radian."""
    d = normalized_derivatives(p, 0j)
    amp = max(abs(v) for v in d.values)
    if abs(d.values[1]) > rel_tol * amp:
        return 0j
    r = 0.5 * root_radius(p)
    return complex(r * math.cos(1.0), r * math.sin(1.0))


def solve_all(p: Polynomial, eps: float, max_iters: int = DEFAULT_MAX_ITERS) -> RootSet:
    """Every root of p, by degree dispatch.

    Degree 1 is closed form, degree 2 the stable quadratic, degree 3 the
    critical-point-seeded cubic.  Higher degrees find one root with the
    certified-switch solver, deflate, and recurse on the quotient seeding
    from the previous root; all deflation-chain roots are then polished on
    the original polynomial before residuals are reported.

    Raises ConvergenceFailure (carrying the partial RootSet) if any stage
    exhausts max_iters.
    """
    if p.degree < 1:
        raise ValueError("solve_all requires degree >= 1")
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if p.degree == 1:
        a0, a1 = p.coeffs
        return _rootset(p, [-a0 / a1], ["closed_form"])
    if p.degree == 2:
        return solve_quadratic(p)
    if p.degree == 3:
        return solve_cubic(p, eps, max_iters=max_iters)

    approx = []
    q = p
    seed = _first_seed(p)
    while q.degree > 3:
        res = hybrid_solve(q, seed, eps, max_iters=max_iters)
        if res.orbit.termination is not Termination.ROOT_TOLERANCE:
            raise ConvergenceFailure(
                f"no root found at degree {q.degree} within {max_iters} iterations",
                partial=_rootset(p, approx, ["hybrid"] * len(approx)),
            )
        approx.append(res.root)
        q, _ = deflate(q, res.root)
        seed = res.root  # iterates drift from it toward a fresh root
    try:
        tail = solve_all(q, eps, max_iters=max_iters)
    except ConvergenceFailure as exc:
        raise ConvergenceFailure(
            str(exc), partial=_rootset(p, approx, ["hybrid"] * len(approx))
        ) from exc
    approx.extend(tail.roots)

    roots = []
    methods = []
    for r in approx:
        polished = _polish(p, r, eps, max_iters)
        if polished is None:
            raise ConvergenceFailure(
                "polish exhausted its iteration budget",
                partial=_rootset(p, roots, methods),
            )
        roots.append(polished[0])
        methods.append("polished")
    return _rootset(p, roots, methods)
