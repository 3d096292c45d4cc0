"""Batch evaluation, grid search, Pareto tooling, and the binary-code demo."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import bpdec, deeprl, ldpc, policies
from .galois import GaloisField
from .protocol import LinkSimulator


def build_simulator(cfg, code=None, channel=None, snr_db=None, alpha=None, lp=None):
    if code is None:
        gf = GaloisField(cfg.gf_order)
        n_info = cfg.k_bits // gf.bits_per_symbol
        code = ldpc.construct_mother_code(cfg.code_seed, cfg.l0, n_info, gf)
    return LinkSimulator(
        code=code,
        mod_order=cfg.mod_order,
        snr_db=cfg.snr_db if snr_db is None else snr_db,
        channel_kind=cfg.channel if channel is None else channel,
        bp_iters=cfg.bp_iters,
        t_max=cfg.t_max,
        alpha=cfg.alpha if alpha is None else alpha,
        lp_hat=cfg.lp if lp is None else lp,
        e_first_mj=cfg.e_first_mj,
        tau_p_ms=cfg.tau_p_ms,
        naive_mean_rounds=cfg.naive_mean_rounds,
    )


def make_policy(cfg, agent=None):
    l0, bits = cfg.l0, int(np.log2(cfg.gf_order))
    kind = cfg.policy.lower()
    if kind == "harq":
        return policies.HarqPolicy(cfg.l_static)
    if kind == "dharq":
        return policies.DharqPolicy(cfg.h_th)
    if kind == "st":
        return policies.StPolicy(cfg.l_static, l0, bits)
    if kind == "ta":
        return policies.TaPolicy(cfg.h_th, l0, bits)
    if kind == "naive-f0":
        return policies.NaiveF0Policy(l0, bits)
    if kind == "raf":
        if agent is None:
            if not cfg.checkpoint:
                raise ValueError("raf policy needs a checkpoint")
            agent, _ = deeprl.load_checkpoint(cfg.checkpoint)
        return policies.AgentPolicy(agent, l0, bits)
    raise ValueError(f"unknown policy kind {cfg.policy!r}")


@dataclass
class ResultRow:
    policy: str
    params: str
    n_episodes: int
    seed: int
    mean_latency_ms: float
    se_latency: float
    mean_eb: float
    se_eb: float
    uder: float
    uder_lo: float
    uder_hi: float
    drop_rate: float
    objective: float
    se_objective: float


RESULT_FIELDS = [f for f in ResultRow.__dataclass_fields__]


def wilson_interval(k, n, z=1.96):
    """95% binomial confidence interval; robust for rare events."""
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return float(max(0.0, center - half)), float(min(1.0, center + half))


def discounted_objective(eb, t_retx, gamma):
    """Sample mean of E_b * gamma^T over episodes (T = retransmission count)."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    return float(np.mean(np.asarray(eb) * gamma ** np.asarray(t_retx)))


def evaluate(sim, policy, n_episodes, master_seed, gamma=0.92, trace_sink=None):
    """Monte Carlo evaluation over episodes seeded (master_seed, 0..n-1)."""
    if n_episodes <= 0:
        raise ValueError("empty evaluation rejected")
    eb = np.zeros(n_episodes)
    latency = np.zeros(n_episodes)
    t_retx = np.zeros(n_episodes)
    undetected = 0
    dropped = 0
    for i in range(n_episodes):
        trace, _ = sim.run_episode(policy, master_seed, i)
        eb[i] = trace.eb
        latency[i] = trace.latency_ms
        t_retx[i] = trace.t_rounds - 1
        undetected += trace.outcome == "undetected"
        dropped += trace.outcome == "dropped"
        if trace_sink is not None:
            trace_sink(i, trace)
    obj_samples = eb * gamma ** t_retx
    lo, hi = wilson_interval(undetected, n_episodes)
    row = ResultRow(
        policy=policy.kind,
        params=policy.describe(),
        n_episodes=n_episodes,
        seed=master_seed,
        mean_latency_ms=float(latency.mean()),
        se_latency=float(latency.std(ddof=1) / np.sqrt(n_episodes)),
        mean_eb=float(eb.mean()),
        se_eb=float(eb.std(ddof=1) / np.sqrt(n_episodes)),
        uder=undetected / n_episodes,
        uder_lo=lo,
        uder_hi=hi,
        drop_rate=dropped / n_episodes,
        objective=float(obj_samples.mean()),
        se_objective=float(obj_samples.std(ddof=1) / np.sqrt(n_episodes)),
    )
    return row


L_STATIC_GRID = tuple(range(1, 16))
H_TH_GRID = tuple(round(2.9 + 0.2 * i, 1) for i in range(22))


def grid_policies(kind, l0, bits_per_symbol):
    kind = kind.lower()
    if kind == "harq":
        return [policies.HarqPolicy(l) for l in L_STATIC_GRID]
    if kind == "st":
        return [policies.StPolicy(l, l0, bits_per_symbol) for l in L_STATIC_GRID]
    if kind == "dharq":
        return [policies.DharqPolicy(h) for h in H_TH_GRID]
    if kind == "ta":
        return [policies.TaPolicy(h, l0, bits_per_symbol) for h in H_TH_GRID]
    raise ValueError(f"no parameter grid for policy kind {kind!r}")


def grid_search(sim, kind, n_episodes, master_seed, gamma=0.92):
    """Evaluate every grid point with common episode seeds; best by the
    discounted objective."""
    bits = sim.code.field.bits_per_symbol
    rows = [evaluate(sim, p, n_episodes, master_seed, gamma)
            for p in grid_policies(kind, sim.code.l0, bits)]
    best = max(range(len(rows)), key=lambda i: rows[i].objective)
    return rows, best


def pareto_frontier(points):
    """Boolean frontier mask: keep (E, T) iff no other point has both
    strictly higher efficiency and strictly lower latency."""
    pts = np.asarray(points, dtype=float)
    keep = np.ones(len(pts), dtype=bool)
    for i, (e, t) in enumerate(pts):
        keep[i] = bool(np.all((pts[:, 0] <= e) | (pts[:, 1] >= t)))
    return keep


def lifetime_gain_months(baseline_years, efficiency_ratio):
    if efficiency_ratio <= 0:
        raise ValueError("efficiency ratio must be positive")
    return 12.0 * baseline_years * (efficiency_ratio - 1.0)


def calibrate_naive_rounds(sim, n_episodes, master_seed):
    """Mean retransmission-round count of the one-symbol-per-round policy,
    re-measured by simulation for the code actually in use."""
    policy = policies.NaiveF0Policy(sim.code.l0, sim.code.field.bits_per_symbol)
    rounds = [sim.run_episode(policy, master_seed, i)[0].t_rounds - 1
              for i in range(n_episodes)]
    return float(np.mean(rounds))


def result_rows_to_csv(rows, extra=()):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_FIELDS + [k for k, _ in extra])
    for row in rows:
        writer.writerow([repr(float(getattr(row, f))) if isinstance(getattr(row, f), float)
                         else getattr(row, f) for f in RESULT_FIELDS]
                        + [v for _, v in extra])
    return buf.getvalue()


def result_rows_from_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append(ResultRow(**{
            f: (int(rec[f]) if f in ("n_episodes", "seed")
                else rec[f] if f in ("policy", "params") else float(rec[f]))
            for f in RESULT_FIELDS}))
    return rows


TRACE_FIELDS = ["episode_id", "seed", "policy", "alpha", "lp", "outcome",
                "t_rounds", "e_tot_mj", "eb", "latency_ms", "reward"]


class TraceWriter:
    def __init__(self, fh, sim, policy, seed):
        self.writer = csv.writer(fh, lineterminator="\n")
        self.writer.writerow(TRACE_FIELDS)
        self.sim = sim
        self.policy = policy
        self.seed = seed

    def __call__(self, episode_id, trace):
        self.writer.writerow([
            episode_id, self.seed, self.policy.describe(),
            repr(float(self.sim.alpha)), repr(float(self.sim.lp_hat)), trace.outcome,
            trace.t_rounds, repr(trace.e_tot_mj), repr(trace.eb),
            repr(trace.latency_ms), repr(trace.reward)])


def appendix_demo(bp_iters=20, out=print):
    """End-to-end run of the fixed binary example: initial decode fails,
    a clean copy of the last parity bit rescues it, the second-to-last does
    not. Returns True when all checks agree."""
    code = ldpc.binary_example_code()
    graph = bpdec.TannerGraph(code)
    message = np.array([0, 0, 1, 0, 1])
    codeword = ldpc.encode(code, message)
    expected_c = np.array([0, 0, 1, 0, 1, 1, 1, 0, 0, 1])
    received = np.array([0, 1, 1, 0, 1, 1, 1, 0])
    p = 0.1

    intr = np.full((10, 2), 0.5)
    for i, bit in enumerate(received):
        intr[i, bit] = 1 - p
        intr[i, 1 - bit] = p

    checks = []

    def check(name, ok):
        checks.append(ok)
        out(f"  [{'PASS' if ok else 'FAIL'}] {name}")

    check("published message encodes to published codeword",
          np.array_equal(codeword, expected_c))
    check("published codeword has zero syndrome",
          not np.any(ldpc.syndrome(code, expected_c)))
    check("corrupted variant is detected as invalid",
          np.any(ldpc.syndrome(code, np.array([0, 1, 1, 0, 1, 1, 1, 0, 0, 0]))))

    base = bpdec.bp_decode(graph, intr, bp_iters)
    check("initial decode fails (error detected)", not base.valid)

    with_v10 = intr.copy()
    with_v10[9] = [1e-30, 1.0]
    res10 = bpdec.bp_decode(graph, with_v10, bp_iters)
    check("retransmitting the last parity bit decodes correctly",
          res10.valid and np.array_equal(res10.hard, expected_c))

    with_v9 = intr.copy()
    with_v9[8] = [1.0, 1e-30]
    res9 = bpdec.bp_decode(graph, with_v9, bp_iters)
    check("retransmitting the second-to-last parity bit still fails",
          not res9.valid)

    return all(checks)
