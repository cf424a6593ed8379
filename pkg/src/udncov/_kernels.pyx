# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: complex log-gamma and per-trial reductions."""
import numpy as np
cimport numpy as cnp

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double complex conj(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef double LG = 607.0 / 128.0
cdef double HALF_LOG_2PI = 0.91893853320467274178
cdef double LOG_PI = 1.14472988584940017414
cdef double PI = 3.14159265358979323846
cdef double[15] COEF = [
    0.99999999999999709182, 57.156235665862923517, -59.597960355475491248,
    14.136097974741747174, -0.49191381609762019978, 0.33994649984811888699e-4,
    0.46523628927048575665e-4, -0.98374475304879564677e-4,
    0.15808870322491248884e-3, -0.21026444172410488319e-3,
    0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4, -0.26190838401581408670e-4,
    0.36899182659531622704e-5]


cdef inline double complex _lanczos(double complex z) nogil:
    cdef double complex w = z - 1.0
    cdef double complex x = COEF[0]
    cdef int k
    for k in range(1, 15):
        x = x + COEF[k] / (w + k)
    cdef double complex t = w + (LG + 0.5)
    return HALF_LOG_2PI + (w + 0.5) * clog(t) - t + clog(x)


cdef inline double complex _log_sin_pi(double complex z) nogil:
    cdef bint flip = cimag(z) < 0
    if flip:
        z = conj(z)
    cdef double complex e = cexp(2j * PI * z)
    cdef double complex out = -0.69314718055994530942 + 0.5j * PI - 1j * PI * z + clog(1.0 - e)
    if flip:
        out = conj(out)
    return out


cdef inline double complex _lg(double complex z) nogil:
    if creal(z) >= 0.5:
        return _lanczos(z)
    return LOG_PI - _log_sin_pi(z) - _lanczos(1.0 - z)


def loggamma(z):
    """Complex log-gamma, correct modulo 2*pi*i in the imaginary part."""
    arr = np.ascontiguousarray(np.asarray(z, dtype=np.complex128))
    shape = arr.shape
    cdef double complex[::1] zin = arr.ravel()
    out = np.empty(zin.shape[0], dtype=np.complex128)
    cdef double complex[::1] zo = out
    cdef Py_ssize_t i, n = zin.shape[0]
    with nogil:
        for i in range(n):
            zo[i] = _lg(zin[i])
    return out.reshape(shape)


def trial_reduce(counts, avg, inst):
    """Per-trial sum of instantaneous power and argmax of average/instantaneous power."""
    cdef cnp.int64_t[::1] cnt = np.ascontiguousarray(counts, dtype=np.int64)
    cdef double[::1] a = np.ascontiguousarray(avg, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(inst, dtype=np.float64)
    cdef Py_ssize_t n = cnt.shape[0]
    total_arr = np.zeros(n)
    ia_arr = np.full(n, -1, dtype=np.int64)
    ii_arr = np.full(n, -1, dtype=np.int64)
    cdef double[::1] total = total_arr
    cdef cnp.int64_t[::1] ia = ia_arr
    cdef cnp.int64_t[::1] ii = ii_arr
    cdef Py_ssize_t t, k, pos = 0, end
    cdef double best_a, best_p, s
    with nogil:
        for t in range(n):
            end = pos + cnt[t]
            s = 0.0
            best_a = -1.0
            best_p = -1.0
            for k in range(pos, end):
                s += p[k]
                if a[k] > best_a:
                    best_a = a[k]
                    ia[t] = k
                if p[k] > best_p:
                    best_p = p[k]
                    ii[t] = k
            total[t] = s
            pos = end
    return total_arr, ia_arr, ii_arr
