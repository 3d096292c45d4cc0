"""Feedback policies: the four baselines, the naive normalization policy,
and the learned-agent policy wrapper.

Each policy maps the decoder entropy vector (and the round index) to a
retransmission count and a puncturing pattern over the l0 mother symbols.
Feedback frame sizes in code symbols: plain count-based policies fit in one
symbol, full-pattern policies need ceil(l0 / log2 q) symbols.
"""

import numpy as np


def taper_schedule(l_static, t):
    """Per-round symbol count for the static baselines, tapered after the
    first retransmission."""
    if t < 1:
        raise ValueError("retransmissions start at round 1")
    if t == 1 or l_static <= 2:
        return l_static
    return 2 if l_static <= 10 else 4


def select_random(count, l0, rng):
    """Uniformly random count-subset of symbol indices."""
    if not 1 <= count <= l0:
        raise ValueError(f"count {count} out of range [1, {l0}]")
    pattern = np.zeros(l0, dtype=bool)
    pattern[rng.choice(l0, size=count, replace=False)] = True
    return pattern


def select_max_entropy(h, count):
    """The count highest-entropy symbols; rank by strict comparison with
    lowest-index tie-break (equivalent to a stable descending sort)."""
    h = np.asarray(h)
    l0 = h.size
    if not 1 <= count <= l0:
        raise ValueError(f"count {count} out of range [1, {l0}]")
    order = np.argsort(-h, kind="stable")
    pattern = np.zeros(l0, dtype=bool)
    pattern[order[:count]] = True
    return pattern


def dharq_count(h, h_th):
    """Number of symbols above the entropy threshold, clamped to at least 1
    so a failed round always requests new information."""
    return max(1, int(np.count_nonzero(np.asarray(h) > h_th)))


def ta_pattern(h, h_th):
    """All symbols above the threshold; falls back to the single
    highest-entropy symbol when nothing exceeds it."""
    h = np.asarray(h)
    pattern = h > h_th
    if not pattern.any():
        return select_max_entropy(h, 1)
    return pattern


class Policy:
    """Interface: count(h, t, rng) then pattern(h, count, rng)."""

    kind = "base"
    feedback_symbols = 1

    def count(self, h, t, rng):
        raise NotImplementedError

    def pattern(self, h, count, rng):
        raise NotImplementedError

    def describe(self):
        return self.kind


class HarqPolicy(Policy):
    kind = "harq"
    feedback_symbols = 1

    def __init__(self, l_static):
        self.l_static = int(l_static)

    def count(self, h, t, rng):
        return taper_schedule(self.l_static, t)

    def pattern(self, h, count, rng):
        return select_random(count, len(h), rng)

    def describe(self):
        return f"harq(L={self.l_static})"


class DharqPolicy(Policy):
    kind = "dharq"
    feedback_symbols = 1

    def __init__(self, h_th):
        self.h_th = float(h_th)

    def count(self, h, t, rng):
        return min(dharq_count(h, self.h_th), len(h))

    def pattern(self, h, count, rng):
        return select_random(count, len(h), rng)

    def describe(self):
        return f"dharq(Hth={self.h_th:g})"


class StPolicy(Policy):
    kind = "st"

    def __init__(self, l_static, l0, bits_per_symbol):
        self.l_static = int(l_static)
        self.feedback_symbols = -(-l0 // bits_per_symbol)

    def count(self, h, t, rng):
        return taper_schedule(self.l_static, t)

    def pattern(self, h, count, rng):
        return select_max_entropy(h, count)

    def describe(self):
        return f"st(L={self.l_static})"


class TaPolicy(Policy):
    kind = "ta"

    def __init__(self, h_th, l0, bits_per_symbol):
        self.h_th = float(h_th)
        self.feedback_symbols = -(-l0 // bits_per_symbol)

    def count(self, h, t, rng):
        return int(ta_pattern(h, self.h_th).sum())

    def pattern(self, h, count, rng):
        return ta_pattern(h, self.h_th)

    def describe(self):
        return f"ta(Hth={self.h_th:g})"


class NaiveF0Policy(Policy):
    """One max-entropy symbol per round; used only to normalize rewards."""

    kind = "naive-f0"

    def __init__(self, l0, bits_per_symbol):
        self.feedback_symbols = -(-l0 // bits_per_symbol)

    def count(self, h, t, rng):
        return 1

    def pattern(self, h, count, rng):
        return select_max_entropy(h, count)


class AgentPolicy(Policy):
    """Greedy (or epsilon-greedy) wrapper around a Q-network agent."""

    kind = "raf"

    def __init__(self, agent, l0, bits_per_symbol, epsilon=0.0):
        self.agent = agent
        self.epsilon = float(epsilon)
        self.feedback_symbols = -(-l0 // bits_per_symbol)

    def count(self, h, t, rng):
        l0 = len(h)
        if self.epsilon > 0.0 and rng.random() < self.epsilon:
            return int(rng.integers(1, l0 + 1))
        q_values = self.agent.q_values(np.asarray(h, dtype=np.float64))
        return int(np.argmax(q_values)) + 1

    def pattern(self, h, count, rng):
        return select_max_entropy(h, count)

    def describe(self):
        return "raf"
