"""Pure NumPy implementations of the hot kernels.

These mirror the compiled versions in ``_kernels.pyx`` and are used when the
extension is not built.
"""
import numpy as np

# Lanczos coefficients, g = 607/128, 15 terms (Godfrey).
LANCZOS_G = 607.0 / 128.0
LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.91893853320467274178
_LOG_PI = 1.14472988584940017414


def _lanczos(z):
    # log Gamma(z) for Re z >= 0.5
    w = z - 1.0
    x = np.full(z.shape, LANCZOS_COEF[0], dtype=complex)
    for k in range(1, LANCZOS_COEF.size):
        x += LANCZOS_COEF[k] / (w + k)
    t = w + (LANCZOS_G + 0.5)
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z):
    # log sin(pi z), stable for large |Im z|
    flip = z.imag < 0
    zz = np.where(flip, np.conj(z), z)
    with np.errstate(divide="ignore"):
        out = (np.log(0.5) + 0.5j * np.pi - 1j * np.pi * zz
               + np.log1p(-np.exp(2j * np.pi * zz)))
    return np.where(flip, np.conj(out), out)


def loggamma(z):
    """Complex log-gamma, correct modulo 2*pi*i in the imaginary part.

    Parameters
    ----------
    z : array_like
        Complex arguments.

    Returns
    -------
    ndarray
        ``log Gamma(z)``; poles map to ``+inf`` real part.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    out = np.empty_like(z)
    refl = z.real < 0.5
    if np.any(~refl):
        out[~refl] = _lanczos(z[~refl])
    if np.any(refl):
        zr = z[refl]
        with np.errstate(divide="ignore", invalid="ignore"):
            out[refl] = _LOG_PI - _log_sin_pi(zr) - _lanczos(1.0 - zr)
    return out.reshape(shape)


def trial_reduce(counts, avg, inst):
    """Per-trial reductions over a ragged batch of received powers.

    Parameters
    ----------
    counts : ndarray of int
        Number of points in each trial; points are stored contiguously.
    avg, inst : ndarray
        Average and instantaneous received power of every point.

    Returns
    -------
    total : ndarray
        Sum of instantaneous power per trial.
    i_avg : ndarray of int
        Global index of the point with the largest average power, -1 if empty.
    i_inst : ndarray of int
        Global index of the point with the largest instantaneous power.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    total = np.zeros(n)
    i_avg = np.full(n, -1, dtype=np.int64)
    i_inst = np.full(n, -1, dtype=np.int64)
    if avg.size == 0:
        return total, i_avg, i_inst
    seg = np.repeat(np.arange(n), counts)
    total += np.bincount(seg, weights=inst, minlength=n)
    start = np.concatenate(([0], np.cumsum(counts)[:-1]))
    nz = counts > 0
    order = np.lexsort((-avg, seg))
    i_avg[nz] = order[start[nz]]
    order = np.lexsort((-inst, seg))
    i_inst[nz] = order[start[nz]]
    return total, i_avg, i_inst
