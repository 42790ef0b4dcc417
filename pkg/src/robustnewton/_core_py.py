"""Pure-Python kernels for the robust Newton iteration.

This module is the fallback twin of the compiled extension ``_core``.  Both
expose the same functions with the same semantics; the compiled one is
selected at import time when available.  Keep the arithmetic here in exact
lockstep with ``_core.pyx`` (same operations in the same order), so the two
backends agree bit for bit on the golden cases and to rounding elsewhere.

Conventions: coefficients are ascending (index j holds the coefficient of
z^j), derivative tables hold p^(j)(z)/j! for j = 0..n, and squared modulus
F(z) = |p(z)|^2 is the descent objective.
"""

import math

# Termination codes for orbit runners.
TERM_ROOT = 0
TERM_PRODUCT = 1
TERM_MAXITERS = 2
TERM_ORACLE = 3
TERM_NONFINITE = 4
TERM_STUCK = 5

# Branch codes for the near-critical loop.
BR_PLAIN = 0
BR_NEAR_ACCEPTED = 1
BR_NEAR_REJECTED = 2

# Method codes for the grid renderer.
METHOD_RNM = 0
METHOD_MODIFIED = 1
METHOD_NEWTON = 2

_ORACLE_SLACK = 1e-9


def cabs(z):
    """Complex modulus as sqrt(re^2 + im^2).

    sqrt is correctly rounded, so this is bit-identical across the two
    kernel backends (math.hypot and libm hypot are not)."""
    return math.sqrt(z.real * z.real + z.imag * z.imag)


def horner(coeffs, z):
    """Evaluate the polynomial at z by Horner's rule."""
    n = len(coeffs) - 1
    acc = complex(coeffs[n])
    for j in range(n - 1, -1, -1):
        acc = acc * z + coeffs[j]
    return acc


def horner2(coeffs, z):
    """Evaluate p(z) and p'(z) in one Horner pass; returns (p, dp)."""
    n = len(coeffs) - 1
    acc = complex(coeffs[n])
    dacc = 0j
    for j in range(n - 1, -1, -1):
        dacc = dacc * z + acc
        acc = acc * z + coeffs[j]
    return acc, dacc


def taylor_table(coeffs, z):
    """Normalized derivatives p^(j)(z)/j! by repeated synthetic division.

    Equivalently the ascending coefficients of w -> p(z + w).  O(n^2).
    """
    n = len(coeffs) - 1
    b = [complex(c) for c in coeffs]
    for j in range(n):
        for i in range(n - 1, j - 1, -1):
            b[i] = b[i] + z * b[i + 1]
    return b


def table_amplitude(table):
    """Max modulus over the normalized-derivative table."""
    a = 0.0
    for v in table:
        m = cabs(v)
        if m > a:
            a = m
    return a


def pick_k(table, amp, rel_tol):
    """Smallest j >= 1 whose normalized derivative exceeds rel_tol * amp.

    Returns 0 when the point is a root to within tolerance (entry 0 at or
    below the threshold); callers treat that as an error or a stop.
    """
    thresh = rel_tol * amp
    if cabs(table[0]) <= thresh:
        return 0
    n = len(table) - 1
    for j in range(1, n + 1):
        if cabs(table[j]) > thresh:
            return j
    return n  # unreachable: entry n is the nonzero leading coefficient


def pick_kbar(table, eps):
    """Smallest j >= 1 with raw derivative modulus |p^(j)(z)| > eps.

    Uses |table[j]| * j! (raw, not normalized).  Returns 0 if no index
    qualifies, which cannot happen for a monic polynomial since the raw
    n-th derivative is n!.
    """
    n = len(table) - 1
    fact = 1.0
    for j in range(1, n + 1):
        fact *= j
        if cabs(table[j]) * fact > eps:
            return j
    return 0


def descent(table, k, amp):
    """Descent data at the table's point for derivative index k.

    Returns (u, gamma, delta, ck, theta, Ck).  The angle and step factor are
    derived from the unit-normalized u^(k-1) so extreme magnitudes of u
    cannot overflow; gamma/delta/ck are also reported unnormalized for
    diagnostics.  Requires u != 0.
    """
    u = table[0] * table[k].conjugate()
    au = cabs(u)
    if au == 0.0:
        raise ValueError("descent data undefined: p(z) * conj(p^(k)(z)) == 0")
    if k == 1:
        gamma = 2.0
        delta = 0.0
        ck = 2.0
        theta = math.pi
        chat = 2.0
    else:
        uhat = u / au
        w = complex(1.0, 0.0)
        for _ in range(k - 1):
            w = w * uhat
        ghat = 2.0 * w.real
        dhat = -2.0 * w.imag
        # Unnormalized values for reporting; the branch choice below uses
        # the normalized ones, which carry the same signs and ordering.
        scale = au ** (k - 1)
        gamma = ghat * scale
        delta = dhat * scale
        if abs(ghat) >= abs(dhat):
            chat = abs(ghat)
            theta = 0.0 if ghat < 0.0 else math.pi / k
        else:
            chat = abs(dhat)
            theta = math.pi / (2 * k) if dhat < 0.0 else 3.0 * math.pi / (2 * k)
        ck = chat * scale
    # Ck = ck * |u|^(2-k) / (6 A^2) == chat * |u| / (6 A^2), overflow-safe.
    Ck = chat * au / (6.0 * amp * amp)
    return u, gamma, delta, ck, theta, Ck


def apply_step(z, k, u, theta, Ck):
    """One damped step: z + (Ck/3) * (u/|u|) * e^(i theta).

    The k = 1 case (theta = pi) is taken trig-free so it is exactly the
    scaled Newton form z - p(z) conj(p'(z)) / (9 A^2) up to rounding and
    keeps conjugate seeds on exactly conjugate orbits.
    """
    au = cabs(u)
    s = Ck / 3.0
    if k == 1:
        d = -(u / au)
    elif theta == 0.0:
        d = u / au
    else:
        d = (u / au) * complex(math.cos(theta), math.sin(theta))
    return z + s * d


def bounds(k, au, amp, Ck):
    """A-priori decrement bounds (first, second), both negative.

    first  = -9 A^2 (Ck/3)^(k+1)     (the tighter guarantee)
    second = -|u|^(k+1) / (2 * 18^k * A^(2k))
    The second form is computed from the ratio |u|/A^2 <= 1 so large
    amplitudes cannot overflow.
    """
    a2 = amp * amp
    first = -9.0 * a2 * (Ck / 3.0) ** (k + 1)
    second = -0.5 * (au / a2) ** (k + 1) * a2 / 18.0 ** k
    return first, second


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def plain_orbit(coeffs, z0, eps, max_iters, rel_tol, amp_every=1):
    """Unrecorded damped-Newton orbit (the plain while-loop).

    Stops when |p| <= eps (TERM_ROOT), |p p'| <= eps (TERM_PRODUCT), the
    point is a root at float resolution (TERM_ROOT), or after max_iters
    transitions (TERM_MAXITERS).  Every transition is checked against the
    first decrement bound with slack; a violation stops with TERM_ORACLE.

    With amp_every = m > 1 the full derivative table (hence the amplitude)
    is refreshed every m steps; between refreshes the stale amplitude is
    doubled as a safety factor and only p, p' are evaluated.

    Returns (z, code, iters, F).
    """
    z = complex(z0)
    table = taylor_table(coeffs, z)
    amp = table_amplitude(table)
    amp_used = amp
    fresh = True
    since = 0
    p = table[0]
    dp = table[1]
    t = 0
    while True:
        absp = cabs(p)
        F = absp * absp
        if not math.isfinite(F):
            return z, TERM_NONFINITE, t, F
        absdp = cabs(dp)
        if absp <= eps:
            return z, TERM_ROOT, t, F
        if absp * absdp <= eps:
            return z, TERM_PRODUCT, t, F
        if absp <= rel_tol * amp_used:
            return z, TERM_ROOT, t, F  # below float resolution
        if t >= max_iters:
            return z, TERM_MAXITERS, t, F
        if not fresh and absdp <= rel_tol * amp_used:
            # stale-amplitude fast path cannot classify k; refresh now
            table = taylor_table(coeffs, z)
            amp = table_amplitude(table)
            amp_used = amp
            fresh = True
            since = 0
        if fresh:
            k = pick_k(table, amp_used, rel_tol)
            try:
                u, _, _, _, theta, Ck = descent(table, k, amp_used)
            except ValueError:
                return z, TERM_ROOT, t, F  # u underflowed: at float resolution
        else:
            k = 1
            u = p * dp.conjugate()
            au = cabs(u)
            theta = math.pi
            Ck = 2.0 * au / (6.0 * amp_used * amp_used)
        z1 = apply_step(z, k, u, theta, Ck)
        au = cabs(u)
        first, _ = bounds(k, au, amp_used, Ck)
        since += 1
        if since >= amp_every:
            table = taylor_table(coeffs, z1)
            amp = table_amplitude(table)
            amp_used = amp
            fresh = True
            since = 0
            p = table[0]
            dp = table[1]
        else:
            if fresh:
                amp_used = 2.0 * amp
            fresh = False
            p, dp = horner2(coeffs, z1)
        F1 = _abs2(p)
        if not math.isfinite(F1):
            return z1, TERM_NONFINITE, t + 1, F1
        if F1 - F > first + _ORACLE_SLACK * (1.0 + F):
            return z1, TERM_ORACLE, t + 1, F1
        z = z1
        t += 1


def modified_orbit(coeffs, z0, eps, max_iters, rel_tol):
    """Unrecorded near-critical-bypassing orbit on a monic polynomial.

    Plain steps while |p'| > eps; otherwise the trial iterate built from the
    first raw derivative above eps is accepted when it beats half the
    second decrement bound, else the plain step is taken.  Stops on
    |p| <= eps or max_iters.  Returns (z, code, iters, F).
    """
    z = complex(z0)
    table = taylor_table(coeffs, z)
    t = 0
    while True:
        amp = table_amplitude(table)
        p = table[0]
        absp = cabs(p)
        F = absp * absp
        if not math.isfinite(F):
            return z, TERM_NONFINITE, t, F
        if absp <= eps:
            return z, TERM_ROOT, t, F
        if absp <= rel_tol * amp:
            return z, TERM_ROOT, t, F
        if t >= max_iters:
            return z, TERM_MAXITERS, t, F
        absdp = cabs(table[1])
        accepted = False
        if absdp <= eps:
            kbar = pick_kbar(table, eps)
            if kbar > 0:
                try:
                    u, _, _, _, theta, Ck = descent(table, kbar, amp)
                except ValueError:
                    u = None  # u underflowed; fall through to the plain step
                if u is not None:
                    zbar = apply_step(z, kbar, u, theta, Ck)
                    au = cabs(u)
                    _, second = bounds(kbar, au, amp, Ck)
                    pbar = horner(coeffs, zbar)
                    Fbar = _abs2(pbar)
                    if math.isfinite(Fbar) and Fbar - F <= 0.5 * second:
                        z1 = zbar
                        F1 = Fbar
                        accepted = True
        if not accepted:
            k = pick_k(table, amp, rel_tol)
            try:
                u, _, _, _, theta, Ck = descent(table, k, amp)
            except ValueError:
                return z, TERM_ROOT, t, F  # u underflowed: at float resolution
            z1 = apply_step(z, k, u, theta, Ck)
            au = cabs(u)
            first, _ = bounds(k, au, amp, Ck)
            table = taylor_table(coeffs, z1)
            F1 = _abs2(table[0])
            if not math.isfinite(F1):
                return z1, TERM_NONFINITE, t + 1, F1
            if F1 - F > first + _ORACLE_SLACK * (1.0 + F):
                return z1, TERM_ORACLE, t + 1, F1
        else:
            table = taylor_table(coeffs, z1)
        z = z1
        t += 1


def newton_orbit(coeffs, z0, eps, max_iters, rel_tol):
    """Classic Newton orbit; stops on |p| <= eps, max_iters, or a vanishing
    derivative / non-finite iterate (TERM_STUCK).  Returns (z, code, iters).
    """
    z = complex(z0)
    t = 0
    while True:
        p, dp = horner2(coeffs, z)
        absp = cabs(p)
        if not math.isfinite(absp):
            return z, TERM_NONFINITE, t
        if absp <= eps:
            return z, TERM_ROOT, t
        if t >= max_iters:
            return z, TERM_MAXITERS, t
        if dp == 0j:
            return z, TERM_STUCK, t
        z1 = z - p / dp
        if not (math.isfinite(z1.real) and math.isfinite(z1.imag)):
            return z, TERM_STUCK, t
        z = z1
        t += 1


def render_grid(coeffs, cx, cy, width, height, pw, ph, method, eps, max_iters,
                rel_tol, roots, match_radius):
    """Classify every pixel seed of the window by the root its orbit reaches.

    Pixel (i, j) seeds at center + ((i+0.5)/pw - 0.5)*width
    + 1j*((j+0.5)/ph - 0.5)*height.  A pixel gets the index of the nearest
    root within match_radius when its orbit ends at root tolerance, else -1.
    Returns two row-major lists (root_index, iters) of length pw*ph.
    """
    nroots = len(roots)
    idx_out = [0] * (pw * ph)
    it_out = [0] * (pw * ph)
    for j in range(ph):
        im_off = ((j + 0.5) / ph - 0.5) * height
        for i in range(pw):
            re_off = ((i + 0.5) / pw - 0.5) * width
            z0 = complex(cx + re_off, cy + im_off)
            if method == METHOD_NEWTON:
                zf, code, iters = newton_orbit(coeffs, z0, eps, max_iters, rel_tol)
            elif method == METHOD_MODIFIED:
                zf, code, iters, _ = modified_orbit(coeffs, z0, eps, max_iters, rel_tol)
            else:
                zf, code, iters, _ = plain_orbit(coeffs, z0, eps, max_iters, rel_tol, 1)
            if code == TERM_ORACLE:
                return None, None  # caller raises
            label = -1
            if code == TERM_ROOT:
                best = -1
                bestd = match_radius
                for m in range(nroots):
                    d = abs(zf - roots[m])
                    if d <= bestd:
                        bestd = d
                        best = m
                label = best
            pos = j * pw + i
            idx_out[pos] = label
            it_out[pos] = iters
    return idx_out, it_out
