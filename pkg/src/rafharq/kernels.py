"""Belief-propagation inner loops.

Two interchangeable implementations of the q-ary sum-product sweep: a numba
@njit kernel and a vectorized pure-numpy fallback. Selection is made once at
import time: set RAFHARQ_NUMBA=0 to force the numpy path (the fallback is
also used automatically when numba is unavailable).

Check-node convolutions over the additive group of GF(2^m) are done with the
fast Walsh-Hadamard transform after permuting each message by its edge
coefficient, which keeps a full decode at q=256 in the microsecond range.
"""

import os

import numpy as np

_WANT_NUMBA = os.environ.get("RAFHARQ_NUMBA", "1") != "0"

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = _WANT_NUMBA and HAVE_NUMBA

_FLOOR = 1e-30


def _wht_rows(x):
    """In-place fast Walsh-Hadamard transform along the last axis (len 2^m)."""
    n, q = x.shape
    h = 1
    while h < q:
        x = x.reshape(n, q // (2 * h), 2, h)
        a = x[:, :, 0, :].copy()
        x[:, :, 0, :] = a + x[:, :, 1, :]
        x[:, :, 1, :] = a - x[:, :, 1, :]
        x = x.reshape(n, q)
        h *= 2
    return x


def _syndrome_ok_np(hard, edge_var, perm_cv, check_ptr):
    for c in range(len(check_ptr) - 1):
        acc = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            acc ^= perm_cv[e, hard[edge_var[e]]]
        if acc != 0:
            return False
    return True


def bp_core_np(intr, edge_var, check_ptr, var_ptr, var_edges, perm_vc, perm_cv, max_iter):
    """Pure-numpy sum-product decode. Returns (posterior, hard, valid, iters)."""
    l0, q = intr.shape
    n_edges = edge_var.shape[0]
    n_checks = len(check_ptr) - 1
    rows = np.arange(n_edges)[:, None]

    posterior = intr.copy()
    hard = posterior.argmax(axis=1).astype(np.int64)
    if _syndrome_ok_np(hard, edge_var, perm_cv, check_ptr):
        return posterior, hard, True, 0

    vmsg = intr[edge_var].copy()
    for it in range(1, max_iter + 1):
        # check node update in the transform domain
        fq = _wht_rows(vmsg[rows, perm_vc].copy())
        prod_except = np.empty_like(fq)
        for c in range(n_checks):
            s, e = check_ptr[c], check_ptr[c + 1]
            deg = e - s
            pre = np.ones((deg + 1, q))
            for k in range(deg):
                pre[k + 1] = pre[k] * fq[s + k]
            suf = np.ones(q)
            for k in range(deg - 1, -1, -1):
                prod_except[s + k] = pre[k] * suf
                suf = suf * fq[s + k]
        r = _wht_rows(prod_except) / q
        cmsg = np.maximum(r[rows, perm_cv], _FLOOR)
        cmsg /= cmsg.sum(axis=1, keepdims=True)

        # variable node update and posterior
        for v in range(l0):
            edges = var_edges[var_ptr[v]:var_ptr[v + 1]]
            deg = len(edges)
            pre = np.ones((deg + 1, q))
            for k in range(deg):
                pre[k + 1] = pre[k] * cmsg[edges[k]]
            suf = np.ones(q)
            for k in range(deg - 1, -1, -1):
                row = np.maximum(intr[v] * pre[k] * suf, _FLOOR)
                vmsg[edges[k]] = row / row.sum()
                suf = suf * cmsg[edges[k]]
            post = np.maximum(intr[v] * pre[deg], _FLOOR)
            posterior[v] = post / post.sum()

        hard = posterior.argmax(axis=1).astype(np.int64)
        if _syndrome_ok_np(hard, edge_var, perm_cv, check_ptr):
            return posterior, hard, True, it
    return posterior, hard, False, max_iter


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _wht_inplace(x):
        q = x.shape[0]
        h = 1
        while h < q:
            i = 0
            while i < q:
                for j in range(i, i + h):
                    a = x[j]
                    b = x[j + h]
                    x[j] = a + b
                    x[j + h] = a - b
                i += 2 * h
            h *= 2

    @numba.njit(cache=True)
    def _syndrome_ok_nb(hard, edge_var, perm_cv, check_ptr):
        for c in range(len(check_ptr) - 1):
            acc = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                acc ^= perm_cv[e, hard[edge_var[e]]]
            if acc != 0:
                return False
        return True

    @numba.njit(cache=True)
    def bp_core_nb(intr, edge_var, check_ptr, var_ptr, var_edges, perm_vc, perm_cv, max_iter):
        l0, q = intr.shape
        n_edges = edge_var.shape[0]
        n_checks = len(check_ptr) - 1

        posterior = intr.copy()
        hard = np.empty(l0, dtype=np.int64)
        for v in range(l0):
            hard[v] = np.argmax(posterior[v])
        if _syndrome_ok_nb(hard, edge_var, perm_cv, check_ptr):
            return posterior, hard, True, 0

        vmsg = np.empty((n_edges, q))
        for e in range(n_edges):
            vmsg[e] = intr[edge_var[e]]
        fq = np.empty((n_edges, q))
        cmsg = np.empty((n_edges, q))
        pre = np.empty((16, q))
        work = np.empty(q)

        for it in range(1, max_iter + 1):
            for e in range(n_edges):
                for u in range(q):
                    fq[e, u] = vmsg[e, perm_vc[e, u]]
                _wht_inplace(fq[e])
            for c in range(n_checks):
                s, epp = check_ptr[c], check_ptr[c + 1]
                deg = epp - s
                for u in range(q):
                    pre[0, u] = 1.0
                for k in range(deg):
                    for u in range(q):
                        pre[k + 1, u] = pre[k, u] * fq[s + k, u]
                for u in range(q):
                    work[u] = 1.0
                for k in range(deg - 1, -1, -1):
                    e = s + k
                    for u in range(q):
                        tmp = fq[e, u]
                        fq[e, u] = pre[k, u] * work[u]
                        work[u] *= tmp
            for e in range(n_edges):
                _wht_inplace(fq[e])
                total = 0.0
                for s_ in range(q):
                    val = fq[e, perm_cv[e, s_]] / q
                    if val < _FLOOR:
                        val = _FLOOR
                    cmsg[e, s_] = val
                    total += val
                for s_ in range(q):
                    cmsg[e, s_] /= total

            for v in range(l0):
                s, epp = var_ptr[v], var_ptr[v + 1]
                deg = epp - s
                for u in range(q):
                    pre[0, u] = 1.0
                for k in range(deg):
                    e = var_edges[s + k]
                    for u in range(q):
                        pre[k + 1, u] = pre[k, u] * cmsg[e, u]
                suf = np.ones(q)
                for k in range(deg - 1, -1, -1):
                    e = var_edges[s + k]
                    total = 0.0
                    for u in range(q):
                        val = intr[v, u] * pre[k, u] * suf[u]
                        if val < _FLOOR:
                            val = _FLOOR
                        vmsg[e, u] = val
                        total += val
                    for u in range(q):
                        vmsg[e, u] /= total
                    for u in range(q):
                        suf[u] *= cmsg[e, u]
                total = 0.0
                for u in range(q):
                    val = intr[v, u] * pre[deg, u]
                    if val < _FLOOR:
                        val = _FLOOR
                    posterior[v, u] = val
                    total += val
                for u in range(q):
                    posterior[v, u] /= total
                hard[v] = np.argmax(posterior[v])

            if _syndrome_ok_nb(hard, edge_var, perm_cv, check_ptr):
                return posterior, hard, True, it
        return posterior, hard, False, max_iter
else:  # pragma: no cover
    bp_core_nb = None


def bp_core(intr, edge_var, check_ptr, var_ptr, var_edges, perm_vc, perm_cv, max_iter):
    if USE_NUMBA:
        return bp_core_nb(intr, edge_var, check_ptr, var_ptr, var_edges,
                          perm_vc, perm_cv, max_iter)
    return bp_core_np(intr, edge_var, check_ptr, var_ptr, var_edges,
                      perm_vc, perm_cv, max_iter)
