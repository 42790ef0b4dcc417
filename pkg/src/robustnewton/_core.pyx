# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the robust Newton iteration.

Twin of ``_core_py``: same functions, same semantics, same arithmetic
order, so both backends agree bit for bit on the golden cases.  Keep any
change here mirrored there.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc
from libc.math cimport M_PI, cos, isfinite, pow, sin, sqrt

TERM_ROOT = 0
TERM_PRODUCT = 1
TERM_MAXITERS = 2
TERM_ORACLE = 3
TERM_NONFINITE = 4
TERM_STUCK = 5

BR_PLAIN = 0
BR_NEAR_ACCEPTED = 1
BR_NEAR_REJECTED = 2

METHOD_RNM = 0
METHOD_MODIFIED = 1
METHOD_NEWTON = 2

cdef double _ORACLE_SLACK = 1e-9

cdef enum:
    C_ROOT = 0
    C_PRODUCT = 1
    C_MAXITERS = 2
    C_ORACLE = 3
    C_NONFINITE = 4
    C_STUCK = 5

cdef enum:
    M_RNM = 0
    M_MODIFIED = 1
    M_NEWTON = 2


cdef inline double _cabs(double complex z) noexcept nogil:
    # sqrt is correctly rounded; bit-identical to the pure-Python twin
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef double complex* _to_buf(object coeffs, Py_ssize_t* n_out) except NULL:
    cdef Py_ssize_t m = len(coeffs)
    cdef double complex* buf = <double complex*> PyMem_Malloc(m * sizeof(double complex))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef double complex c
    try:
        for i in range(m):
            c = complex(coeffs[i])
            buf[i] = c
    except Exception:
        PyMem_Free(buf)
        raise
    n_out[0] = m - 1
    return buf


cdef inline double complex _horner(double complex* c, Py_ssize_t n, double complex z) noexcept nogil:
    cdef double complex acc = c[n]
    cdef Py_ssize_t j
    for j in range(n - 1, -1, -1):
        acc = acc * z + c[j]
    return acc


cdef inline void _horner2(double complex* c, Py_ssize_t n, double complex z,
                          double complex* p, double complex* dp) noexcept nogil:
    cdef double complex acc = c[n]
    cdef double complex dacc = 0
    cdef Py_ssize_t j
    for j in range(n - 1, -1, -1):
        dacc = dacc * z + acc
        acc = acc * z + c[j]
    p[0] = acc
    dp[0] = dacc


cdef inline void _taylor(double complex* c, Py_ssize_t n, double complex z,
                         double complex* b) noexcept nogil:
    cdef Py_ssize_t i, j
    for i in range(n + 1):
        b[i] = c[i]
    for j in range(n):
        for i in range(n - 1, j - 1, -1):
            b[i] = b[i] + z * b[i + 1]


cdef inline double _amp(double complex* b, Py_ssize_t n) noexcept nogil:
    cdef double a = 0.0
    cdef double m
    cdef Py_ssize_t j
    for j in range(n + 1):
        m = _cabs(b[j])
        if m > a:
            a = m
    return a


cdef inline Py_ssize_t _pick_k(double complex* b, Py_ssize_t n, double amp,
                               double rel_tol) noexcept nogil:
    cdef double thresh = rel_tol * amp
    if _cabs(b[0]) <= thresh:
        return 0
    cdef Py_ssize_t j
    for j in range(1, n + 1):
        if _cabs(b[j]) > thresh:
            return j
    return n


cdef inline Py_ssize_t _pick_kbar(double complex* b, Py_ssize_t n, double eps) noexcept nogil:
    cdef double fact = 1.0
    cdef Py_ssize_t j
    for j in range(1, n + 1):
        fact *= j
        if _cabs(b[j]) * fact > eps:
            return j
    return 0


cdef inline int _descent(double complex* b, Py_ssize_t k, double amp,
                         double complex* u_out, double* gamma_out,
                         double* delta_out, double* ck_out, double* theta_out,
                         double* Ck_out) noexcept nogil:
    """Fills descent data; returns 0 on success, -1 when u == 0."""
    cdef double complex u = b[0] * b[k].conjugate()
    cdef double au = _cabs(u)
    if au == 0.0:
        return -1
    cdef double gamma, delta, ck, theta, chat, ghat, dhat, scale
    cdef double complex uhat, w
    cdef Py_ssize_t i
    if k == 1:
        gamma = 2.0
        delta = 0.0
        ck = 2.0
        theta = M_PI
        chat = 2.0
    else:
        uhat = u / au
        w = 1.0
        for i in range(k - 1):
            w = w * uhat
        ghat = 2.0 * w.real
        dhat = -2.0 * w.imag
        scale = pow(au, k - 1)
        gamma = ghat * scale
        delta = dhat * scale
        if (ghat if ghat >= 0 else -ghat) >= (dhat if dhat >= 0 else -dhat):
            chat = ghat if ghat >= 0 else -ghat
            theta = 0.0 if ghat < 0.0 else M_PI / k
        else:
            chat = dhat if dhat >= 0 else -dhat
            theta = M_PI / (2 * k) if dhat < 0.0 else 3.0 * M_PI / (2 * k)
        ck = chat * scale
    u_out[0] = u
    gamma_out[0] = gamma
    delta_out[0] = delta
    ck_out[0] = ck
    theta_out[0] = theta
    Ck_out[0] = chat * au / (6.0 * amp * amp)
    return 0


cdef inline double complex _apply(double complex z, Py_ssize_t k,
                                  double complex u, double theta, double Ck) noexcept nogil:
    cdef double au = _cabs(u)
    cdef double s = Ck / 3.0
    cdef double complex d
    if k == 1:
        d = -(u / au)
    elif theta == 0.0:
        d = u / au
    else:
        d = (u / au) * (cos(theta) + 1j * sin(theta))
    return z + s * d


cdef inline void _bounds(Py_ssize_t k, double au, double amp, double Ck,
                         double* first, double* second) noexcept nogil:
    cdef double a2 = amp * amp
    first[0] = -9.0 * a2 * pow(Ck / 3.0, k + 1)
    second[0] = -0.5 * pow(au / a2, k + 1) * a2 / pow(18.0, k)


# ---------------------------------------------------------------------------
# Python-visible single operations
# ---------------------------------------------------------------------------

def cabs(z):
    """Complex modulus as sqrt(re^2 + im^2), matching the pure twin."""
    return _cabs(complex(z))


def horner(coeffs, z):
    """Evaluate the polynomial at z by Horner's rule."""
    cdef Py_ssize_t n
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef double complex zz = complex(z)
    cdef double complex out
    try:
        out = _horner(buf, n, zz)
    finally:
        PyMem_Free(buf)
    return complex(out)


def horner2(coeffs, z):
    """Evaluate p(z) and p'(z) in one Horner pass; returns (p, dp)."""
    cdef Py_ssize_t n
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef double complex zz = complex(z)
    cdef double complex p, dp
    try:
        _horner2(buf, n, zz, &p, &dp)
    finally:
        PyMem_Free(buf)
    return complex(p), complex(dp)


def taylor_table(coeffs, z):
    """Normalized derivatives p^(j)(z)/j! by repeated synthetic division."""
    cdef Py_ssize_t n, j
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef double complex* b = <double complex*> PyMem_Malloc((n + 1) * sizeof(double complex))
    if b == NULL:
        PyMem_Free(buf)
        raise MemoryError()
    cdef double complex zz = complex(z)
    try:
        _taylor(buf, n, zz, b)
        return [complex(b[j]) for j in range(n + 1)]
    finally:
        PyMem_Free(buf)
        PyMem_Free(b)


def table_amplitude(table):
    """Max modulus over the normalized-derivative table."""
    cdef double a = 0.0
    cdef double m
    cdef double complex c
    for v in table:
        c = complex(v)
        m = _cabs(c)
        if m > a:
            a = m
    return a


def pick_k(table, amp, rel_tol):
    """Smallest j >= 1 above the relative threshold; 0 marks a near-root."""
    cdef Py_ssize_t n
    cdef double complex* b = _to_buf(table, &n)
    try:
        return _pick_k(b, n, amp, rel_tol)
    finally:
        PyMem_Free(b)


def pick_kbar(table, eps):
    """Smallest j >= 1 with raw derivative modulus above eps; 0 if none."""
    cdef Py_ssize_t n
    cdef double complex* b = _to_buf(table, &n)
    try:
        return _pick_kbar(b, n, eps)
    finally:
        PyMem_Free(b)


def descent(table, k, amp):
    """Descent data (u, gamma, delta, ck, theta, Ck) for index k."""
    cdef Py_ssize_t n
    cdef double complex* b = _to_buf(table, &n)
    cdef double complex u
    cdef double gamma, delta, ck, theta, Ck
    cdef int rc
    try:
        rc = _descent(b, <Py_ssize_t> k, amp, &u, &gamma, &delta, &ck, &theta, &Ck)
    finally:
        PyMem_Free(b)
    if rc != 0:
        raise ValueError("descent data undefined: p(z) * conj(p^(k)(z)) == 0")
    return complex(u), gamma, delta, ck, theta, Ck


def apply_step(z, k, u, theta, Ck):
    """One damped step: z + (Ck/3) * (u/|u|) * e^(i theta)."""
    return complex(_apply(complex(z), <Py_ssize_t> k, complex(u), theta, Ck))


def bounds(k, au, amp, Ck):
    """A-priori decrement bounds (first, second), both negative."""
    cdef double first, second
    _bounds(<Py_ssize_t> k, au, amp, Ck, &first, &second)
    return first, second


# ---------------------------------------------------------------------------
# Orbit runners
# ---------------------------------------------------------------------------

cdef int _plain_orbit_c(double complex* coeffs, Py_ssize_t n, double complex z0,
                        double eps, long max_iters, double rel_tol,
                        long amp_every, double complex* table,
                        double complex* z_out, long* t_out, double* F_out) noexcept nogil:
    cdef double complex z = z0
    cdef double complex z1, p, dp, u
    cdef double amp, amp_used, absp, absdp, F, F1, au, theta, Ck, first, second
    cdef double gamma, delta, ck
    cdef Py_ssize_t k
    cdef long t = 0
    cdef long since = 0
    cdef bint fresh = True
    _taylor(coeffs, n, z, table)
    amp = _amp(table, n)
    amp_used = amp
    p = table[0]
    dp = table[1]
    while True:
        absp = _cabs(p)
        F = absp * absp
        if not isfinite(F):
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_NONFINITE
        absdp = _cabs(dp)
        if absp <= eps:
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_ROOT
        if absp * absdp <= eps:
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_PRODUCT
        if absp <= rel_tol * amp_used:
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_ROOT
        if t >= max_iters:
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_MAXITERS
        if (not fresh) and absdp <= rel_tol * amp_used:
            _taylor(coeffs, n, z, table)
            amp = _amp(table, n)
            amp_used = amp
            fresh = True
            since = 0
        if fresh:
            k = _pick_k(table, n, amp_used, rel_tol)
            if _descent(table, k, amp_used, &u, &gamma, &delta, &ck, &theta, &Ck) != 0:
                z_out[0] = z; t_out[0] = t; F_out[0] = F
                return C_ROOT
        else:
            k = 1
            u = p * dp.conjugate()
            au = _cabs(u)
            theta = M_PI
            Ck = 2.0 * au / (6.0 * amp_used * amp_used)
        z1 = _apply(z, k, u, theta, Ck)
        au = _cabs(u)
        _bounds(k, au, amp_used, Ck, &first, &second)
        since += 1
        if since >= amp_every:
            _taylor(coeffs, n, z1, table)
            amp = _amp(table, n)
            amp_used = amp
            fresh = True
            since = 0
            p = table[0]
            dp = table[1]
        else:
            if fresh:
                amp_used = 2.0 * amp
            fresh = False
            _horner2(coeffs, n, z1, &p, &dp)
        F1 = _abs2(p)
        if not isfinite(F1):
            z_out[0] = z1; t_out[0] = t + 1; F_out[0] = F1
            return C_NONFINITE
        if F1 - F > first + _ORACLE_SLACK * (1.0 + F):
            z_out[0] = z1; t_out[0] = t + 1; F_out[0] = F1
            return C_ORACLE
        z = z1
        t += 1


cdef int _modified_orbit_c(double complex* coeffs, Py_ssize_t n, double complex z0,
                           double eps, long max_iters, double rel_tol,
                           double complex* table,
                           double complex* z_out, long* t_out, double* F_out) noexcept nogil:
    cdef double complex z = z0
    cdef double complex z1, zbar, pbar, u
    cdef double amp, absp, absdp, F, F1, Fbar, au, theta, Ck, first, second
    cdef double gamma, delta, ck
    cdef Py_ssize_t k, kbar
    cdef long t = 0
    cdef bint accepted
    _taylor(coeffs, n, z, table)
    while True:
        amp = _amp(table, n)
        absp = _cabs(table[0])
        F = absp * absp
        if not isfinite(F):
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_NONFINITE
        if absp <= eps or absp <= rel_tol * amp:
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_ROOT
        if t >= max_iters:
            z_out[0] = z; t_out[0] = t; F_out[0] = F
            return C_MAXITERS
        absdp = _cabs(table[1])
        accepted = False
        if absdp <= eps:
            kbar = _pick_kbar(table, n, eps)
            if kbar > 0:
                if _descent(table, kbar, amp, &u, &gamma, &delta, &ck, &theta, &Ck) == 0:
                    zbar = _apply(z, kbar, u, theta, Ck)
                    au = _cabs(u)
                    _bounds(kbar, au, amp, Ck, &first, &second)
                    pbar = _horner(coeffs, n, zbar)
                    Fbar = _abs2(pbar)
                    if isfinite(Fbar) and Fbar - F <= 0.5 * second:
                        z1 = zbar
                        F1 = Fbar
                        accepted = True
        if not accepted:
            k = _pick_k(table, n, amp, rel_tol)
            if _descent(table, k, amp, &u, &gamma, &delta, &ck, &theta, &Ck) != 0:
                z_out[0] = z; t_out[0] = t; F_out[0] = F
                return C_ROOT
            z1 = _apply(z, k, u, theta, Ck)
            au = _cabs(u)
            _bounds(k, au, amp, Ck, &first, &second)
            _taylor(coeffs, n, z1, table)
            F1 = _abs2(table[0])
            if not isfinite(F1):
                z_out[0] = z1; t_out[0] = t + 1; F_out[0] = F1
                return C_NONFINITE
            if F1 - F > first + _ORACLE_SLACK * (1.0 + F):
                z_out[0] = z1; t_out[0] = t + 1; F_out[0] = F1
                return C_ORACLE
        else:
            _taylor(coeffs, n, z1, table)
        z = z1
        t += 1


cdef int _newton_orbit_c(double complex* coeffs, Py_ssize_t n, double complex z0,
                         double eps, long max_iters,
                         double complex* z_out, long* t_out) noexcept nogil:
    cdef double complex z = z0
    cdef double complex z1, p, dp
    cdef double absp
    cdef long t = 0
    while True:
        _horner2(coeffs, n, z, &p, &dp)
        absp = _cabs(p)
        if not isfinite(absp):
            z_out[0] = z; t_out[0] = t
            return C_NONFINITE
        if absp <= eps:
            z_out[0] = z; t_out[0] = t
            return C_ROOT
        if t >= max_iters:
            z_out[0] = z; t_out[0] = t
            return C_MAXITERS
        if dp == 0:
            z_out[0] = z; t_out[0] = t
            return C_STUCK
        z1 = z - p / dp
        if not (isfinite(z1.real) and isfinite(z1.imag)):
            z_out[0] = z; t_out[0] = t
            return C_STUCK
        z = z1
        t += 1


def plain_orbit(coeffs, z0, eps, max_iters, rel_tol, amp_every=1):
    """Unrecorded damped-Newton orbit; returns (z, code, iters, F)."""
    cdef Py_ssize_t n
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef double complex* table = <double complex*> PyMem_Malloc((n + 1) * sizeof(double complex))
    if table == NULL:
        PyMem_Free(buf)
        raise MemoryError()
    cdef double complex z
    cdef long t
    cdef double F
    cdef int code
    try:
        code = _plain_orbit_c(buf, n, complex(z0), eps, max_iters, rel_tol,
                              amp_every, table, &z, &t, &F)
    finally:
        PyMem_Free(buf)
        PyMem_Free(table)
    return complex(z), code, t, F


def modified_orbit(coeffs, z0, eps, max_iters, rel_tol):
    """Unrecorded near-critical-bypassing orbit; returns (z, code, iters, F)."""
    cdef Py_ssize_t n
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef double complex* table = <double complex*> PyMem_Malloc((n + 1) * sizeof(double complex))
    if table == NULL:
        PyMem_Free(buf)
        raise MemoryError()
    cdef double complex z
    cdef long t
    cdef double F
    cdef int code
    try:
        code = _modified_orbit_c(buf, n, complex(z0), eps, max_iters, rel_tol,
                                 table, &z, &t, &F)
    finally:
        PyMem_Free(buf)
        PyMem_Free(table)
    return complex(z), code, t, F


def newton_orbit(coeffs, z0, eps, max_iters, rel_tol):
    """Classic Newton orbit; returns (z, code, iters)."""
    cdef Py_ssize_t n
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef double complex z
    cdef long t
    cdef int code
    try:
        code = _newton_orbit_c(buf, n, complex(z0), eps, max_iters, &z, &t)
    finally:
        PyMem_Free(buf)
    return complex(z), code, t


def render_grid(coeffs, cx, cy, width, height, pw, ph, method, eps, max_iters,
                rel_tol, roots, match_radius):
    """Per-pixel orbit classification over the window raster.

    Returns two row-major lists (root_index, iters); (None, None) if any
    pixel orbit violated the decrement bound.
    """
    cdef Py_ssize_t n
    cdef double complex* buf = _to_buf(coeffs, &n)
    cdef Py_ssize_t nroots = len(roots)
    cdef double complex* rbuf = NULL
    cdef double complex* table = NULL
    cdef int* idx_buf = NULL
    cdef long* it_buf = NULL
    cdef Py_ssize_t i, j, m, pos
    cdef double im_off, re_off, bestd, dist
    cdef double complex z0, zf
    cdef double F
    cdef long iters
    cdef int code, best, method_c = method
    cdef long pw_c = pw, ph_c = ph, max_it = max_iters
    cdef double cx_c = cx, cy_c = cy, w_c = width, h_c = height
    cdef double eps_c = eps, rt_c = rel_tol, rad = match_radius
    cdef bint oracle_violation = False
    try:
        rbuf = <double complex*> PyMem_Malloc(max(nroots, 1) * sizeof(double complex))
        table = <double complex*> PyMem_Malloc((n + 1) * sizeof(double complex))
        idx_buf = <int*> PyMem_Malloc(pw_c * ph_c * sizeof(int))
        it_buf = <long*> PyMem_Malloc(pw_c * ph_c * sizeof(long))
        if rbuf == NULL or table == NULL or idx_buf == NULL or it_buf == NULL:
            raise MemoryError()
        for m in range(nroots):
            rbuf[m] = complex(roots[m])
        with nogil:
            for j in range(ph_c):
                im_off = ((j + 0.5) / ph_c - 0.5) * h_c
                for i in range(pw_c):
                    re_off = ((i + 0.5) / pw_c - 0.5) * w_c
                    z0 = (cx_c + re_off) + 1j * (cy_c + im_off)
                    if method_c == M_NEWTON:
                        code = _newton_orbit_c(buf, n, z0, eps_c, max_it, &zf, &iters)
                    elif method_c == M_MODIFIED:
                        code = _modified_orbit_c(buf, n, z0, eps_c, max_it, rt_c,
                                                 table, &zf, &iters, &F)
                    else:
                        code = _plain_orbit_c(buf, n, z0, eps_c, max_it, rt_c,
                                              1, table, &zf, &iters, &F)
                    if code == C_ORACLE:
                        oracle_violation = True
                        break
                    best = -1
                    if code == C_ROOT:
                        bestd = rad
                        for m in range(nroots):
                            dist = _cabs(zf - rbuf[m])
                            if dist <= bestd:
                                bestd = dist
                                best = m
                    pos = j * pw_c + i
                    idx_buf[pos] = best
                    it_buf[pos] = iters
                if oracle_violation:
                    break
        if oracle_violation:
            return None, None
        idx_out = [idx_buf[pos] for pos in range(pw_c * ph_c)]
        it_out = [it_buf[pos] for pos in range(pw_c * ph_c)]
        return idx_out, it_out
    finally:
        PyMem_Free(buf)
        if rbuf != NULL:
            PyMem_Free(rbuf)
        if table != NULL:
            PyMem_Free(table)
        if idx_buf != NULL:
            PyMem_Free(idx_buf)
        if it_buf != NULL:
            PyMem_Free(it_buf)
