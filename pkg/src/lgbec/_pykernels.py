"""Pure-Python/NumPy versions of the compiled inner loops in _kernels.pyx."""

import numpy as np


def bose_head(s, z, m):
    acc = 0.0
    zi = 1.0
    for i in range(1, m + 1):
        zi *= z
        acc += zi / float(i) ** s
    return acc


def bose_direct(s, z, rtol, max_terms):
    acc = 0.0
    zi = 1.0
    for i in range(1, max_terms + 1):
        zi *= z
        term = zi / float(i) ** s
        acc += term
        if term <= rtol * acc:
            return acc, i
    return acc, max_terms


def bose_direct_array(s, z, rtol, max_terms):
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    zi = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, max_terms + 1):
        zi[active] *= z[active]
        term = zi[active] / float(i) ** s
        out[active] += term
        done = term <= rtol * out[active]
        if done.all():
            break
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return out


def growth_series(log_term, phi, x, rtol, max_terms):
    bracket = log_term
    phiq = 1.0
    xp = 1.0
    acc = log_term * log_term
    for p in range(1, max_terms + 1):
        phiq *= phi
        bracket += phiq / p
        xp *= x
        term = bracket * bracket * xp
        acc += term
        if term <= rtol * acc:
            return acc, p
    return acc, max_terms


def growth_series_fixed(log_term, phi, x, n):
    bracket = log_term
    phiq = 1.0
    xp = 1.0
    acc = log_term * log_term
    for p in range(1, n + 1):
        phiq *= phi
        bracket += phiq / p
        xp *= x
        acc += bracket * bracket * xp
    return acc


def apply_hamiltonian(psi, w, kr, kz, out):
    nr, nz = psi.shape
    out[...] = w * psi
    for k in range(7):
        s = k - 3
        if s >= 0:
            out[: nr - s] += kr[: nr - s, k, None] * psi[s:]
            out[:, : nz - s] += kz[None, : nz - s, k] * psi[:, s:]
        else:
            out[-s:] += kr[-s:, k, None] * psi[: nr + s]
            out[:, -s:] += kz[None, -s:, k] * psi[:, : nz + s]
    return out
