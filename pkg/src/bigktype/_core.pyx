# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Each function mirrors one in _pykernels exactly."""
from libc.math cimport sqrt, log, exp, cos, sin, floor, ceil, fabs
from libc.stdlib cimport malloc, realloc, free


cdef inline double complex cpow_int(double complex z, int m) nogil:
    cdef double complex out = 1
    while m > 0:
        if m & 1:
            out = out * z
        z = z * z
        m >>= 1
    return out


cdef double* jacobi_0b_coefs(int n, int b):
    # recurrence P_k = (u_k + v_k x) P_{k-1} - w_k P_{k-2}, divisions done once
    cdef double* cf = <double*> malloc(3 * (n + 1) * sizeof(double))
    cdef int k
    cdef double c, a1
    if cf == NULL:
        raise MemoryError()
    for k in range(2, n + 1):
        c = 2 * k + b
        a1 = 2.0 * k * (k + b) * (c - 2)
        cf[3 * k] = -(c - 1) * b * <double>b / a1
        cf[3 * k + 1] = (c - 1) * c * (c - 2) / a1
        cf[3 * k + 2] = 2.0 * (k - 1) * (k + b - 1) * c / a1
    return cf


cdef inline double jacobi_0b(int n, int b, double x, const double* cf) nogil:
    cdef double p0 = 1.0, p1, p2
    cdef int k
    if n == 0:
        return 1.0
    p1 = 1 + (b + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        p2 = (cf[3 * k] + cf[3 * k + 1] * x) * p1 - cf[3 * k + 2] * p0
        p0 = p1
        p1 = p2
    return p1


def trace_sum(g, int l2, int p2, double complex nu, const double complex[:] alpha,
              const double complex[:] beta, const double[:] weights):
    cdef double complex ga = g[0], gb = g[1], gc = g[2], gd = g[3]
    cdef Py_ssize_t i, n = weights.shape[0]
    cdef int m = p2 if p2 >= 0 else -p2
    cdef int deg = (l2 - m) // 2
    cdef double complex al, be, mbc, a1, c1, ak, core, fac, tot = 0
    cdef double t2, t, x, lg, mag, nr = nu.real - 1, ni = nu.imag
    cdef double* cf = jacobi_0b_coefs(deg, m)
    with nogil:
        for i in range(n):
            al = alpha[i]
            be = beta[i]
            mbc = -be.conjugate()
            a1 = ga * al + gb * mbc
            c1 = gc * al + gd * mbc
            t2 = a1.real * a1.real + a1.imag * a1.imag + c1.real * c1.real + c1.imag * c1.imag
            t = sqrt(t2)
            ak = (al.conjugate() * a1 - be * c1) * (1.0 / t)
            if p2 >= 0:
                core = cpow_int(ak.conjugate(), m)
            else:
                core = cpow_int(ak, m)
            if deg > 0:
                x = 2 * (ak.real * ak.real + ak.imag * ak.imag) - 1
                if x > 1:
                    x = 1
                core = core * jacobi_0b(deg, m, x, cf)
            lg = log(t2)
            mag = exp(nr * lg)
            fac = mag * cos(ni * lg) + 1j * mag * sin(ni * lg)
            tot = tot + weights[i] * core * fac
    free(cf)
    return complex((l2 + 1) * tot)


def dirichlet_line(const double[:] logs, const double[:] coefs, double sigma, double t0,
                   double dt, Py_ssize_t n):
    import numpy as np
    out_arr = np.zeros(n, dtype=complex)
    cdef double complex[:] out = out_arr
    cdef Py_ssize_t k, j, nk = logs.shape[0]
    cdef double L, amp, ph
    cdef double complex z, step
    with nogil:
        for k in range(nk):
            L = logs[k]
            amp = coefs[k] * exp(-sigma * L)
            step = cos(dt * L) - 1j * sin(dt * L)
            for j in range(n):
                if j % 64 == 0:
                    # re-anchor so the recurrence error stays at ~64 ulp
                    ph = (t0 + j * dt) * L
                    z = amp * (cos(ph) - 1j * sin(ph))
                else:
                    z = z * step
                out[j] = out[j] + z
    return out_arr


cdef inline long long isqrt_ll(long long v) nogil:
    cdef long long s
    if v < 0:
        return -1
    s = <long long>sqrt(<double>v)
    while s * s > v:
        s -= 1
    while (s + 1) * (s + 1) <= v:
        s += 1
    return s


cdef inline int gauss_sqrt(long long dr, long long di, long long *p, long long *q) nogil:
    # t = p + iq with t^2 = dr + i di, p >= 0; returns 0 when dr + i di is not a square
    cdef long long nn = dr * dr + di * di
    cdef long long s = isqrt_ll(nn)
    cdef long long pp, qq
    if s * s != nn or (s + dr) & 1:
        return 0
    pp = isqrt_ll((s + dr) // 2)
    qq = isqrt_ll((s - dr) // 2)
    if di < 0:
        qq = -qq
    if pp * pp - qq * qq != dr or 2 * pp * qq != di:
        return 0
    p[0] = pp
    q[0] = qq
    return 1


cdef class _Buf:
    cdef long long *data
    cdef Py_ssize_t size, cap, width

    def __cinit__(self, Py_ssize_t width):
        self.width = width
        self.cap = 1024
        self.size = 0
        self.data = <long long *>malloc(self.cap * width * sizeof(long long))

    def __dealloc__(self):
        free(self.data)

    cdef int push(self, long long *row) nogil:
        cdef Py_ssize_t k
        cdef long long *grown
        if self.size == self.cap:
            grown = <long long *>realloc(self.data, 2 * self.cap * self.width * sizeof(long long))
            if grown == NULL:
                return -1
            self.data = grown
            self.cap *= 2
        for k in range(self.width):
            self.data[self.size * self.width + k] = row[k]
        self.size += 1
        return 0

    def to_array(self):
        import numpy as np
        out = np.empty((self.size, self.width), dtype=np.int64)
        cdef long long[:, :] view = out
        cdef Py_ssize_t i, k
        for i in range(self.size):
            for k in range(self.width):
                view[i, k] = self.data[i * self.width + k]
        return out


cdef long long _walk(const double[:] qdiag, const double[:, :] mu, double bound, long long max_nodes,
                     int mode, long long nr, long long ni, _Buf buf):
    # Fincke-Pohst walk over x in Z^6 with sum_i qdiag[i] (x_i + sum_{j>i} mu[i,j] x_j)^2 <= bound.
    # mode 0 stores every point; mode 1 stores (a, b, c, d) for e^2 + 4bc + 4n = t^2.
    cdef long long x[6]
    cdef long long hi[6]
    cdef double centre[6]
    cdef double part[7]
    cdef long long row[8]
    cdef long long nodes = 0, p, q, er, ei, br, bi, cr, ci, dr, di, sgn
    cdef double r, rem
    cdef int i = 5, j
    part[6] = 0.0
    with nogil:
        # open level 5
        centre[5] = 0.0
        r = sqrt(bound / qdiag[5])
        x[5] = <long long>ceil(-r)
        hi[5] = <long long>floor(r)
        while True:
            if x[i] > hi[i]:
                i += 1
                if i == 6:
                    break
                x[i] += 1
                continue
            part[i] = part[i + 1] + qdiag[i] * (x[i] - centre[i]) * (x[i] - centre[i])
            if i > 0:
                i -= 1
                centre[i] = 0.0
                for j in range(i + 1, 6):
                    centre[i] -= mu[i, j] * x[j]
                rem = bound - part[i + 1]
                if rem < 0:
                    rem = 0
                r = sqrt(rem / qdiag[i])
                x[i] = <long long>ceil(centre[i] - r)
                hi[i] = <long long>floor(centre[i] + r)
                continue
            nodes += 1
            if max_nodes > 0 and nodes > max_nodes:
                return -nodes
            if mode == 0:
                for j in range(6):
                    row[j] = x[j]
                if buf.push(row) < 0:
                    return -nodes
            else:
                er = x[0]; ei = x[1]; br = x[2]; bi = x[3]; cr = x[4]; ci = x[5]
                dr = er * er - ei * ei + 4 * (br * cr - bi * ci) + 4 * nr
                di = 2 * er * ei + 4 * (br * ci + bi * cr) + 4 * ni
                if gauss_sqrt(dr, di, &p, &q) and not ((p + er) & 1) and not ((q + ei) & 1):
                    for sgn in range(-1, 2, 2):
                        if sgn == 1 and p == 0 and q == 0:
                            break
                        row[0] = (sgn * p + er) // 2
                        row[1] = (sgn * q + ei) // 2
                        row[2] = br
                        row[3] = bi
                        row[4] = cr
                        row[5] = ci
                        row[6] = (sgn * p - er) // 2
                        row[7] = (sgn * q - ei) // 2
                        if buf.push(row) < 0:
                            return -nodes
            x[0] += 1
    return nodes


def ellipsoid_points(const double[:] qdiag, const double[:, :] mu, double bound, long long max_nodes=0):
    """All x in Z^6 inside the ellipsoid; returns (points, nodes), nodes < 0 when the guard tripped."""
    buf = _Buf(6)
    nodes = _walk(qdiag, mu, bound, max_nodes, 0, 0, 0, buf)
    return buf.to_array(), nodes


def det_points(const double[:] qdiag, const double[:, :] mu, double bound, long long nr, long long ni,
               long long max_nodes=0):
    """Matrices of determinant n whose (a - d, b, c) lies in the ellipsoid.

    Rows are (Re a, Im a, Re b, Im b, Re c, Im c, Re d, Im d).
    """
    buf = _Buf(8)
    nodes = _walk(qdiag, mu, bound, max_nodes, 1, nr, ni, buf)
    return buf.to_array(), nodes
