"""q-ary belief propagation over the mother code and accumulation of
retransmission evidence across HARQ rounds."""

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass
class DecodeResult:
    hard: np.ndarray        # hard-decision symbols, length l0
    valid: bool             # syndrome is all-zero
    posterior: np.ndarray   # (l0, q) row-stochastic
    entropy: np.ndarray     # per-symbol Shannon entropy, bits
    iterations: int


class TannerGraph:
    """Flattened edge arrays for the kernels, built once per code.

    perm_vc[e, u] = h_e^{-1} * u maps a variable-domain message to the check
    domain (where the parity constraint is a plain XOR convolution); perm_cv
    is the inverse map and doubles as the coefficient product for syndromes.
    """

    def __init__(self, code):
        self.code = code
        gf = code.field
        edge_var = []
        edge_coef = []
        check_ptr = [0]
        for r in range(code.n_checks):
            cols = np.flatnonzero(code.h[r])
            for c in cols:
                edge_var.append(c)
                edge_coef.append(code.h[r, c])
            check_ptr.append(len(edge_var))
        self.edge_var = np.array(edge_var, dtype=np.int64)
        self.edge_coef = np.array(edge_coef, dtype=np.int64)
        self.check_ptr = np.array(check_ptr, dtype=np.int64)

        order = np.argsort(self.edge_var, kind="stable")
        self.var_edges = order.astype(np.int64)
        counts = np.bincount(self.edge_var, minlength=code.l0)
        if counts.max() >= 15 or np.diff(self.check_ptr).max() >= 15:
            raise ValueError("node degree too large for the decode kernels")
        self.var_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

        vals = np.arange(gf.order)
        inv_coef = gf.inv_table[self.edge_coef]
        self.perm_vc = gf.mul_table[inv_coef[:, None], vals[None, :]].astype(np.int64)
        self.perm_cv = gf.mul_table[self.edge_coef[:, None], vals[None, :]].astype(np.int64)


def uniform_intrinsics(l0, q):
    return np.full((l0, q), 1.0 / q)


def set_rows(state, rows, indices):
    """Overwrite intrinsic rows (fresh observations of specific symbols)."""
    out = state.copy()
    out[indices] = rows
    return out


def combine_retransmission(state, mr_like, multipliers, pattern, gf):
    """Fold multiplicative-repetition observations into the intrinsic state.

    An observed extension symbol s' = z * s carries likelihood row
    mr_like(s'); the implied likelihood of the mother symbol is the row
    permuted by the multiplier: state_i(x) *= mr_like(z * x).
    """
    pattern = np.asarray(pattern).astype(bool)
    idx = np.flatnonzero(pattern)
    if mr_like.shape[0] != idx.size:
        raise ValueError("one likelihood row required per retransmitted symbol")
    out = state.copy()
    vals = np.arange(gf.order)
    for row, i in enumerate(idx):
        perm = gf.mul_table[multipliers[i], vals]
        new = out[i] * mr_like[row, perm]
        new = np.maximum(new, kernels._FLOOR)
        out[i] = new / new.sum()
    return out


def entropy_bits(posterior):
    """Elementwise Shannon entropy of row-stochastic posteriors, in bits."""
    p = np.asarray(posterior)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(p), 0.0)
    return np.maximum(-terms.sum(axis=-1), 0.0)


def bp_decode(graph, intrinsics, max_iters):
    """Flooding-schedule sum-product with syndrome-based early stopping."""
    intr = np.ascontiguousarray(intrinsics, dtype=np.float64)
    posterior, hard, valid, iters = kernels.bp_core(
        intr, graph.edge_var, graph.check_ptr, graph.var_ptr, graph.var_edges,
        graph.perm_vc, graph.perm_cv, int(max_iters))
    return DecodeResult(hard=hard, valid=bool(valid), posterior=posterior,
                        entropy=entropy_bits(posterior), iterations=int(iters))
