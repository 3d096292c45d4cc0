"""Non-binary LDPC mother code, multiplicative-repetition extension, puncturing.

The mother code is an ultra-sparse (column weight 2) code over GF(q) built
with a progressive-edge-growth style greedy construction. Rate adaptation
uses multiplicative repetition: each retransmission round re-sends selected
codeword symbols scaled by fresh random nonzero field multipliers known to
both endpoints through a shared seed.
"""

from dataclasses import dataclass

import numpy as np

from .galois import GaloisField


@dataclass
class MotherCode:
    field: GaloisField
    l0: int                 # codeword length in symbols
    n_info: int             # number of information symbols
    h: np.ndarray           # (l0 - n_info, l0) parity-check coefficients
    g: np.ndarray           # (n_info, l0) dense generator
    info_positions: np.ndarray  # columns of the codeword carrying message symbols
    seed: int

    @property
    def n_checks(self):
        return self.h.shape[0]

    @property
    def k_bits(self):
        return self.n_info * self.field.bits_per_symbol


def _gf_rank_and_rref(h, gf):
    """Reduced row echelon form over GF(q), preferring pivots in the last columns.

    Returns (rank, rref matrix, pivot columns in processing order). Scanning
    columns right-to-left keeps the leading columns as information positions,
    so codes whose trailing columns form an identity encode systematically.
    """
    r = h.astype(np.int32).copy()
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols - 1, -1, -1):
        if row >= rows:
            break
        sel = None
        for i in range(row, rows):
            if r[i, col] != 0:
                sel = i
                break
        if sel is None:
            continue
        r[[row, sel]] = r[[sel, row]]
        r[row] = gf.mul(gf.inv_table[r[row, col]], r[row])
        for i in range(rows):
            if i != row and r[i, col] != 0:
                r[i] = np.bitwise_xor(r[i], gf.mul(r[i, col], r[row]))
        pivots.append(col)
        row += 1
    return row, r, pivots


def _peg_graph(l0, n_checks, col_weight, rng):
    """Greedy girth-maximizing edge placement: for each new edge of a variable,
    pick the check farthest from it in the current graph (unreached checks
    first), breaking ties by lowest degree."""
    max_row_weight = -(-col_weight * l0 // n_checks)
    var_checks = [[] for _ in range(l0)]
    check_vars = [[] for _ in range(n_checks)]
    check_deg = np.zeros(n_checks, dtype=int)

    for v in range(l0):
        for _ in range(col_weight):
            # BFS from v over the bipartite graph to find check distances
            dist = np.full(n_checks, np.inf)
            frontier_vars = {v}
            seen_vars = {v}
            d = 1
            while frontier_vars:
                next_checks = set()
                for fv in frontier_vars:
                    for c in var_checks[fv]:
                        if np.isinf(dist[c]):
                            dist[c] = d
                            next_checks.add(c)
                frontier_vars = set()
                for c in next_checks:
                    for nv in check_vars[c]:
                        if nv not in seen_vars:
                            seen_vars.add(nv)
                            frontier_vars.add(nv)
                d += 2
            dist[var_checks[v]] = 0  # never reuse a check at this variable
            candidates = np.flatnonzero(check_deg < max_row_weight)
            if len(candidates) == 0:
                candidates = np.flatnonzero(check_deg < max_row_weight + 1)
            best_dist = dist[candidates].max()
            candidates = candidates[dist[candidates] == best_dist]
            min_deg = check_deg[candidates].min()
            candidates = candidates[check_deg[candidates] == min_deg]
            c = int(rng.choice(candidates))
            var_checks[v].append(c)
            check_vars[c].append(v)
            check_deg[c] += 1
    return var_checks


def construct_mother_code(seed, l0, n_info, gf):
    """Build a deterministic full-rank mother code. Retries with an
    incremented sub-seed on a rank-deficient draw."""
    if not (l0 > n_info > 0):
        raise ValueError("need l0 > n_info > 0")
    n_checks = l0 - n_info
    for attempt in range(100):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(attempt,)))
        var_checks = _peg_graph(l0, n_checks, 2, rng)
        h = np.zeros((n_checks, l0), dtype=np.int32)
        for v, checks in enumerate(var_checks):
            for c in checks:
                h[c, v] = rng.integers(1, gf.order)
        rank, rref, pivots = _gf_rank_and_rref(h, gf)
        if rank == n_checks:
            g, info_positions = _generator_from_rref(rref, pivots, gf)
            return MotherCode(field=gf, l0=l0, n_info=n_info, h=h, g=g,
                              info_positions=info_positions, seed=seed)
    raise RuntimeError(f"no full-rank parity-check matrix found in 100 draws (seed={seed})")


def _generator_from_rref(rref, pivots, gf):
    rows, cols = rref.shape
    pivot_set = set(pivots)
    info_positions = np.array([c for c in range(cols) if c not in pivot_set], dtype=np.int64)
    g = np.zeros((len(info_positions), cols), dtype=np.int32)
    for k, j in enumerate(info_positions):
        g[k, j] = 1
        # char 2: c[pivot_r] = sum_j rref[r, j] * c[j]
        for r, pcol in enumerate(pivots):
            g[k, pcol] = rref[r, j]
    return g, info_positions


def pack_bits(bits, gf):
    """Pack a bit sequence big-endian into GF symbols."""
    m = gf.bits_per_symbol
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % m != 0:
        raise ValueError(f"bit count {bits.size} not a multiple of {m}")
    weights = 1 << np.arange(m - 1, -1, -1)
    return (bits.reshape(-1, m) * weights).sum(axis=1).astype(np.int32)


def encode(code, message_bits):
    """Encode K message bits into l0 codeword symbols."""
    message_bits = np.asarray(message_bits)
    if message_bits.size != code.k_bits:
        raise ValueError(f"expected {code.k_bits} message bits, got {message_bits.size}")
    u = pack_bits(message_bits, code.field)
    prods = code.field.mul(u[:, None], code.g)
    return np.bitwise_xor.reduce(prods, axis=0)


def syndrome(code, word):
    word = np.asarray(word)
    prods = code.field.mul(code.h, word[None, :])
    return np.bitwise_xor.reduce(prods, axis=1)


def is_codeword(code, word):
    return not np.any(syndrome(code, word))


def mr_multipliers(episode_seed, round_t, l0, gf):
    """Per-round multiplicative-repetition multipliers, uniform on the nonzero
    elements. Deterministic in (episode_seed, round_t) so transmitter and
    receiver agree without extra signalling."""
    if round_t < 1:
        raise ValueError("multiplicative repetition starts at round 1")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=episode_seed, spawn_key=(0x6D72, round_t)))
    return rng.integers(1, gf.order, size=l0, dtype=np.int64).astype(np.int32)


def mr_symbols(codeword, multipliers, gf):
    codeword = np.asarray(codeword)
    if codeword.shape != np.shape(multipliers):
        raise ValueError("codeword / multiplier length mismatch")
    return gf.mul(multipliers, codeword)


def puncture(symbols, pattern):
    """Keep positions with pattern bit 1 in order. Returns (kept symbols,
    0-based original indices)."""
    symbols = np.asarray(symbols)
    pattern = np.asarray(pattern).astype(bool)
    if symbols.shape[0] != pattern.shape[0]:
        raise ValueError("pattern length mismatch")
    idx = np.flatnonzero(pattern)
    return symbols[idx], idx


def serialize_code(code):
    """Text form: header (q, l0, n_info, seed, poly) then one line per row of
    (column, coefficient-hex) pairs."""
    lines = [f"q={code.field.order} l0={code.l0} n_info={code.n_info} "
             f"seed={code.seed} poly={code.field.primitive_poly:#x}"]
    for row in code.h:
        cols = np.flatnonzero(row)
        lines.append(" ".join(f"{c}:{row[c]:02x}" for c in cols))
    return "\n".join(lines) + "\n"


def deserialize_code(text):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    header = dict(kv.split("=") for kv in lines[0].split())
    gf = GaloisField(int(header["q"]), primitive_poly=int(header["poly"], 16))
    l0, n_info = int(header["l0"]), int(header["n_info"])
    h = np.zeros((l0 - n_info, l0), dtype=np.int32)
    for r, ln in enumerate(lines[1:]):
        for pair in ln.split():
            c, coef = pair.split(":")
            h[r, int(c)] = int(coef, 16)
    rank, rref, pivots = _gf_rank_and_rref(h, gf)
    if rank != l0 - n_info:
        raise ValueError("deserialized parity-check matrix is rank deficient")
    g, info_positions = _generator_from_rref(rref, pivots, gf)
    return MotherCode(field=gf, l0=l0, n_info=n_info, h=h, g=g,
                      info_positions=info_positions, seed=int(header["seed"]))


# Fixed binary demonstration code: 5 message bits, 5 parity bits, the last
# two parity bits punctured in the initial transmission.
BINARY_EXAMPLE_H = np.array(
    [
        [0, 1, 1, 1, 0, 1, 0, 0, 0, 0],
        [1, 0, 1, 0, 0, 0, 1, 0, 0, 0],
        [1, 0, 1, 0, 1, 0, 0, 1, 0, 0],
        [0, 0, 1, 1, 1, 0, 0, 0, 1, 0],
        [1, 1, 0, 0, 1, 0, 0, 0, 0, 1],
    ],
    dtype=np.int32,
)


def binary_example_code():
    gf = GaloisField(2)
    h = BINARY_EXAMPLE_H.copy()
    rank, rref, pivots = _gf_rank_and_rref(h, gf)
    assert rank == 5
    g, info_positions = _generator_from_rref(rref, pivots, gf)
    return MotherCode(field=gf, l0=10, n_info=5, h=h, g=g,
                      info_positions=info_positions, seed=0)
