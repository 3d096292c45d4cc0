"""Modulation, channel, and soft demodulation into per-code-symbol likelihoods.

Supports QPSK (M=4) and Gray-labeled square 256-QAM. A GF(q) code symbol is
split big-endian into log2(q)/log2(M) channel uses; with q = M = 256 each
code symbol is exactly one constellation point.
"""

import numpy as np

LIKELIHOOD_FLOOR = 1e-30


def _gray_to_binary(g):
    g = np.asarray(g).copy()
    shift = g >> 1
    while np.any(shift):
        g ^= shift
        shift >>= 1
    return g


def snr_to_sigma2(snr_db):
    """Noise variance for unit-power symbols and unit mean channel gain."""
    return 10.0 ** (-snr_db / 10.0)


class Modulation:
    """Mapping between GF(q) code symbols and unit-average-power constellation
    points, plus the exact Gaussian soft demodulator."""

    def __init__(self, m_order, gf_order):
        if m_order not in (4, 256):
            raise ValueError(f"unsupported constellation order {m_order}")
        self.m_order = m_order
        self.gf_order = gf_order
        bits_per_point = int(np.log2(m_order))
        bits_per_symbol = int(np.log2(gf_order))
        if bits_per_symbol % bits_per_point != 0:
            raise ValueError("code symbol bits must divide into whole channel uses")
        self.uses_per_symbol = bits_per_symbol // bits_per_point

        if m_order == 4:
            # Gray QPSK: each bit selects the sign of one axis
            labels = np.arange(4)
            i = 1 - 2 * ((labels >> 1) & 1)
            q = 1 - 2 * (labels & 1)
            self.points = (i + 1j * q) / np.sqrt(2.0)
        else:
            # 16x16 square QAM, independent 4-bit Gray code per axis.
            # Per-axis levels {+-1,...,+-15}: mean of a^2 is 85, so the
            # two-dimensional normalizer is sqrt(170).
            labels = np.arange(256)
            pam = 2 * _gray_to_binary(np.arange(16)) - 15
            i = pam[(labels >> 4) & 0xF]
            q = pam[labels & 0xF]
            self.points = (i + 1j * q) / np.sqrt(170.0)

        # symbol value -> per-use point label, big-endian chunks
        vals = np.arange(gf_order)
        chunks = []
        for k in range(self.uses_per_symbol - 1, -1, -1):
            chunks.append((vals >> (k * bits_per_point)) & (m_order - 1))
        self.symbol_labels = np.stack(chunks, axis=1)  # (q, uses)

    def map_symbols(self, symbols):
        symbols = np.asarray(symbols)
        return self.points[self.symbol_labels[symbols]].reshape(-1)

    def demodulate(self, y, beta, sigma2):
        """Per-code-symbol likelihood rows, row-stochastic with a small floor.

        y holds uses_per_symbol channel uses per code symbol; beta is the
        (perfectly known) block channel gain.
        """
        y = np.asarray(y)
        n_sym = y.size // self.uses_per_symbol
        ll = -np.abs(y[:, None] - beta * self.points[None, :]) ** 2 / sigma2
        ll = ll.reshape(n_sym, self.uses_per_symbol, self.m_order)
        rows_log = np.zeros((n_sym, self.gf_order))
        for k in range(self.uses_per_symbol):
            rows_log += ll[:, k, self.symbol_labels[:, k]]
        rows_log -= rows_log.max(axis=1, keepdims=True)
        rows = np.exp(rows_log)
        rows = np.maximum(rows, LIKELIHOOD_FLOOR)
        rows /= rows.sum(axis=1, keepdims=True)
        return rows


def apply_channel(x, kind, sigma2, rng):
    """One transmission round: y = beta * x + w, one gain per round."""
    x = np.asarray(x)
    if kind == "awgn":
        beta = 1.0 + 0.0j
    elif kind == "rayleigh":
        beta = complex(rng.normal(scale=np.sqrt(0.5)), rng.normal(scale=np.sqrt(0.5)))
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    w = (rng.normal(scale=np.sqrt(sigma2 / 2), size=x.size)
         + 1j * rng.normal(scale=np.sqrt(sigma2 / 2), size=x.size))
    return x * beta + w, beta
