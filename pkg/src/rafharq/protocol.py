"""Round-based HARQ episode engine with energy, latency, and reward accounting."""

from dataclasses import dataclass, field

import numpy as np

from . import bpdec, ldpc, phy


@dataclass
class EnergyModel:
    ps: float           # energy per channel use, transmit (mJ)
    alpha: float        # relative feedback-reception cost
    lp_hat: float       # preamble channel uses per frame
    lf_hat: float       # feedback channel uses (policy dependent)
    tau_p_ms: float = 1.0


def derive_ps(e_first_mj, l0_hat):
    """Transmit cost per channel use from the first-round calibration
    constant, interpreted as the data-frame cost at zero preamble length."""
    return e_first_mj / l0_hat


def round_energy(l_hat_t, model):
    """E(t) = Ps (Lp + Lt) + alpha Ps (Lp + Lf); every round, including the
    terminal ACK round, pays the feedback-reception term."""
    return model.ps * (model.lp_hat + l_hat_t) + model.alpha * model.ps * (model.lp_hat + model.lf_hat)


def naive_normalizer(model, mean_f0_rounds, l0_hat, uses_per_symbol=1):
    """Closed-form mean total energy of the one-symbol-per-round policy,
    given its mean retransmission-round count."""
    per_round = model.ps * (model.lp_hat * (1 + model.alpha)
                            + model.alpha * model.lf_hat + uses_per_symbol)
    first = model.ps * (model.lp_hat * (1 + model.alpha)
                        + model.alpha * model.lf_hat + l0_hat)
    return mean_f0_rounds * per_round + first


def reward(success_exact, e_tot, normalizer):
    """Terminal reward: +-1 for exact delivery, minus normalized energy."""
    return (2.0 * float(success_exact) - 1.0) - e_tot / normalizer


def classify_outcome(decode_valid, hard, true_codeword):
    if decode_valid:
        return "success" if np.array_equal(hard, true_codeword) else "undetected"
    return "dropped"


@dataclass
class Experience:
    h: np.ndarray
    action: int
    reward: float
    h_next: np.ndarray
    terminal: bool


@dataclass
class EpisodeTrace:
    outcome: str
    t_rounds: int           # initial transmission plus retransmissions
    e_tot_mj: float
    eb: float               # successful bits per mJ (0 on failure)
    latency_ms: float
    reward: float
    actions: list = field(default_factory=list)
    round_energies: list = field(default_factory=list)


def _stream(master_seed, episode, *key):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(episode,) + key))


class LinkSimulator:
    """Precomputed code/modulation context for running HARQ episodes."""

    def __init__(self, code, mod_order, snr_db, channel_kind, bp_iters, t_max,
                 alpha, lp_hat, e_first_mj, tau_p_ms=1.0, naive_mean_rounds=7.7):
        self.code = code
        self.graph = bpdec.TannerGraph(code)
        self.mod = phy.Modulation(mod_order, code.field.order)
        self.snr_db = snr_db
        self.sigma2 = phy.snr_to_sigma2(snr_db)
        self.channel_kind = channel_kind
        self.bp_iters = bp_iters
        self.t_max = t_max
        self.alpha = alpha
        self.lp_hat = lp_hat
        self.e_first_mj = e_first_mj
        self.tau_p_ms = tau_p_ms
        self.l0_hat = self.mod.uses_per_symbol * code.l0
        self.ps = derive_ps(e_first_mj, self.l0_hat)
        self.naive_mean_rounds = naive_mean_rounds

    def energy_model(self, policy):
        lf_hat = self.mod.uses_per_symbol * policy.feedback_symbols
        return EnergyModel(ps=self.ps, alpha=self.alpha, lp_hat=self.lp_hat,
                           lf_hat=lf_hat, tau_p_ms=self.tau_p_ms)

    def normalizer(self, policy):
        return naive_normalizer(self.energy_model(policy), self.naive_mean_rounds,
                                self.l0_hat, self.mod.uses_per_symbol)

    def _transmit(self, symbols, master_seed, episode, round_t):
        rng = _stream(master_seed, episode, 1, round_t)
        x = self.mod.map_symbols(symbols)
        y, beta = phy.apply_channel(x, self.channel_kind, self.sigma2, rng)
        return self.mod.demodulate(y, beta, self.sigma2)

    def run_episode(self, policy, master_seed, episode, collect_experience=False,
                    forced_pattern=None):
        """One full HARQ transmission. Returns (EpisodeTrace, [Experience])."""
        gf = self.code.field
        msg_rng = _stream(master_seed, episode, 0)
        policy_rng = _stream(master_seed, episode, 2)
        message = msg_rng.integers(0, 2, size=self.code.k_bits)
        c = ldpc.encode(self.code, message)

        model = self.energy_model(policy)
        state = self._transmit(c, master_seed, episode, 0)
        result = bpdec.bp_decode(self.graph, state, self.bp_iters)
        energies = [round_energy(self.l0_hat, model)]
        actions = []
        experiences = []

        t = 1
        while not result.valid and t < self.t_max:
            h = result.entropy
            if forced_pattern is not None:
                pattern = np.asarray(forced_pattern, dtype=bool)
                count = int(pattern.sum())
            else:
                count = policy.count(h, t, policy_rng)
                pattern = policy.pattern(h, count, policy_rng)
            actions.append(count)

            multipliers = ldpc.mr_multipliers((master_seed, episode), t, self.code.l0, gf)
            selected, idx = ldpc.puncture(ldpc.mr_symbols(c, multipliers, gf), pattern)
            if idx.size:
                mr_like = self._transmit(selected, master_seed, episode, t)
                state = bpdec.combine_retransmission(state, mr_like, multipliers, pattern, gf)
            result = bpdec.bp_decode(self.graph, state, self.bp_iters)

            l_hat_t = self.mod.uses_per_symbol * int(pattern.sum())
            energies.append(round_energy(l_hat_t, model))
            if collect_experience:
                experiences.append(Experience(h=h.copy(), action=count, reward=0.0,
                                              h_next=result.entropy.copy(), terminal=False))
            t += 1

        outcome = classify_outcome(result.valid, result.hard, c)
        e_tot = float(sum(energies))
        eb = self.code.k_bits / e_tot if outcome == "success" else 0.0
        r = reward(outcome == "success", e_tot, self.normalizer(policy))
        if experiences:
            experiences[-1].reward = r
            experiences[-1].terminal = True
        trace = EpisodeTrace(outcome=outcome, t_rounds=t, e_tot_mj=e_tot, eb=eb,
                             latency_ms=t * self.tau_p_ms, reward=r,
                             actions=actions, round_energies=energies)
        return trace, experiences
