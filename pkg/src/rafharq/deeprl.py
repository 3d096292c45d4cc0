"""DQN agent for the retransmission-count policy: a small fully connected
Q-network trained by squared-error regression toward a frozen target network,
with uniform replay, ADAM, and global gradient-norm clipping.

The network is implemented directly in numpy: it is tiny (15-64-32-16-15) and
explicit weights keep checkpoints portable and gradients testable against
finite differences.
"""

from dataclasses import dataclass, field

import numpy as np

from .policies import AgentPolicy


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    gamma_dqn: float = 0.5
    batch_size: int = 64
    grad_clip: float = 5.0
    train_every: int = 100          # episodes between training sessions
    steps_per_session: int = 15
    target_sync_every: int = 10     # training sessions between target copies
    eps_start: float = 1.0
    eps_decay: float = 0.05
    eps_decay_every: int = 8000
    eps_min: float = 0.4
    buffer_size: int = 60000
    n_episodes: int = 270000
    hidden: tuple = (64, 32, 16)
    validate_every: int = 10000     # episodes between best-checkpoint checks
    n_validation: int = 2000


def epsilon_at(episode, cfg):
    return max(cfg.eps_min, cfg.eps_start - cfg.eps_decay * (episode // cfg.eps_decay_every))


class QNetwork:
    """ReLU MLP with a linear head; one output per action."""

    def __init__(self, n_in, hidden, n_out, rng=None):
        self.sizes = [n_in] + list(hidden) + [n_out]
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            if rng is None:
                w = np.zeros((fan_out, fan_in))
            else:
                bound = np.sqrt(6.0 / fan_in)
                w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))

    def forward(self, x):
        """x: (batch, n_in) or (n_in,). Returns Q-values of matching shape."""
        squeeze = x.ndim == 1
        a = np.atleast_2d(x)
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = np.maximum(a @ w.T + b, 0.0)
        q = a @ self.weights[-1].T + self.biases[-1]
        return q[0] if squeeze else q

    def forward_cached(self, x):
        acts = [np.atleast_2d(x)]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            acts.append(np.maximum(acts[-1] @ w.T + b, 0.0))
        return acts, acts[-1] @ self.weights[-1].T + self.biases[-1]

    def backward(self, acts, dq):
        """Gradients of a loss with dL/dQ = dq. Returns (dW list, db list)."""
        dws, dbs = [], []
        delta = dq
        for layer in range(len(self.weights) - 1, -1, -1):
            dws.append(delta.T @ acts[layer])
            dbs.append(delta.sum(axis=0))
            if layer > 0:
                delta = (delta @ self.weights[layer]) * (acts[layer] > 0)
        return dws[::-1], dbs[::-1]

    def parameters(self):
        return self.weights + self.biases

    def copy_from(self, other):
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]

    def clone(self):
        out = QNetwork(self.sizes[0], self.sizes[1:-1], self.sizes[-1])
        out.copy_from(self)
        return out


class Adam:
    def __init__(self, net, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in net.parameters()]
        self.v = [np.zeros_like(p) for p in net.parameters()]
        self.t = 0

    def step(self, net, grads):
        self.t += 1
        for p, g, m, v in zip(net.parameters(), grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            mhat = m / (1 - self.beta1 ** self.t)
            vhat = v / (1 - self.beta2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def clip_global_norm(grads, max_norm):
    norm = np.sqrt(sum(float((g * g).sum()) for g in grads))
    if norm > max_norm:
        scale = max_norm / norm
        grads = [g * scale for g in grads]
    return grads, norm


class ReplayBuffer:
    """FIFO ring buffer with preallocated storage and uniform sampling."""

    def __init__(self, capacity, state_dim):
        self.capacity = capacity
        self.h = np.zeros((capacity, state_dim))
        self.action = np.zeros(capacity, dtype=np.int64)
        self.reward = np.zeros(capacity)
        self.h_next = np.zeros((capacity, state_dim))
        self.terminal = np.zeros(capacity, dtype=bool)
        self.size = 0
        self._head = 0

    def push(self, exp):
        i = self._head
        self.h[i] = exp.h
        self.action[i] = exp.action
        self.reward[i] = exp.reward
        self.h_next[i] = exp.h_next
        self.terminal[i] = exp.terminal
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size, rng):
        idx = rng.integers(0, self.size, size=batch_size)
        return (self.h[idx], self.action[idx], self.reward[idx],
                self.h_next[idx], self.terminal[idx])


def td_targets(rewards, h_next, terminal, target_net, gamma_dqn):
    """r for terminal transitions, else r + gamma * max_a' Q_B(h', a')."""
    targets = rewards.copy()
    live = ~terminal
    if live.any():
        targets[live] += gamma_dqn * target_net.forward(h_next[live]).max(axis=1)
    return targets


def q_loss_and_grads(net, h, actions, targets):
    """MSE between Q(h, a) and the targets on the chosen actions only."""
    acts, q = net.forward_cached(h)
    batch = q.shape[0]
    picked = q[np.arange(batch), actions - 1]
    err = picked - targets
    loss = float((err ** 2).mean())
    dq = np.zeros_like(q)
    dq[np.arange(batch), actions - 1] = 2.0 * err / batch
    dws, dbs = net.backward(acts, dq)
    return loss, dws + dbs


def train_step(net, target_net, batch, adam, gamma_dqn, grad_clip):
    h, actions, rewards, h_next, terminal = batch
    targets = td_targets(rewards, h_next, terminal, target_net, gamma_dqn)
    loss, grads = q_loss_and_grads(net, h, actions, targets)
    grads, _ = clip_global_norm(grads, grad_clip)
    adam.step(net, grads)
    return loss


class Agent:
    def __init__(self, net, gamma_dqn):
        self.net = net
        self.gamma_dqn = gamma_dqn

    def q_values(self, h):
        return self.net.forward(h)


def save_checkpoint(path, agent, metadata=None):
    arrays = {}
    for i, (w, b) in enumerate(zip(agent.net.weights, agent.net.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    arrays["sizes"] = np.array(agent.net.sizes)
    arrays["gamma_dqn"] = np.array(agent.gamma_dqn)
    meta = metadata or {}
    arrays["meta_keys"] = np.array(sorted(meta), dtype="U64")
    arrays["meta_vals"] = np.array([str(meta[k]) for k in sorted(meta)], dtype="U64")
    np.savez(path, **arrays)


def load_checkpoint(path):
    data = np.load(path, allow_pickle=False)
    sizes = data["sizes"].tolist()
    net = QNetwork(sizes[0], sizes[1:-1], sizes[-1])
    net.weights = [data[f"w{i}"] for i in range(len(sizes) - 1)]
    net.biases = [data[f"b{i}"] for i in range(len(sizes) - 1)]
    meta = dict(zip(data["meta_keys"].tolist(), data["meta_vals"].tolist()))
    return Agent(net, float(data["gamma_dqn"])), meta


def train(sim, cfg, master_seed, objective_gamma=0.92, log_every=0, log=print):
    """Run the full training loop against the link simulator.

    Episode e uses the seed stream (master_seed, e); validation episodes use
    an offset stream so they never overlap training. Returns the
    best-validation agent and a history dict.
    """
    l0 = sim.code.l0
    rng = np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(0xD9,)))
    net = QNetwork(l0, cfg.hidden, l0, rng)
    target = net.clone()
    adam = Adam(net, lr=cfg.learning_rate)
    buffer = ReplayBuffer(cfg.buffer_size, l0)
    agent = Agent(net, cfg.gamma_dqn)
    bits = sim.code.field.bits_per_symbol
    policy = AgentPolicy(agent, l0, bits)

    history = {"episode": [], "loss": [], "epsilon": [], "val_objective": []}
    sessions = 0
    best_obj = -np.inf
    best_net = net.clone()

    for episode in range(cfg.n_episodes):
        policy.epsilon = epsilon_at(episode, cfg)
        _, experiences = sim.run_episode(policy, master_seed, episode,
                                         collect_experience=True)
        for exp in experiences:
            buffer.push(exp)

        if (episode + 1) % cfg.train_every == 0 and buffer.size >= cfg.batch_size:
            losses = []
            for _ in range(cfg.steps_per_session):
                batch = buffer.sample(cfg.batch_size, rng)
                losses.append(train_step(net, target, batch, adam,
                                         cfg.gamma_dqn, cfg.grad_clip))
            sessions += 1
            if sessions % cfg.target_sync_every == 0:
                target.copy_from(net)
            history["episode"].append(episode + 1)
            history["loss"].append(float(np.mean(losses)))
            history["epsilon"].append(policy.epsilon)
            if log_every and sessions % log_every == 0:
                log(f"episode {episode + 1}: loss={history['loss'][-1]:.4f} "
                    f"eps={policy.epsilon:.2f}")

        if cfg.n_validation and (episode + 1) % cfg.validate_every == 0:
            obj = _validation_objective(sim, Agent(net, cfg.gamma_dqn), cfg.n_validation,
                                        master_seed, objective_gamma)
            history["val_objective"].append((episode + 1, obj))
            if obj > best_obj:
                best_obj = obj
                best_net = net.clone()

    if cfg.n_validation:
        obj = _validation_objective(sim, Agent(net, cfg.gamma_dqn), cfg.n_validation,
                                    master_seed, objective_gamma)
        history["val_objective"].append((cfg.n_episodes, obj))
        if obj > best_obj:
            best_net = net.clone()
    else:
        best_net = net.clone()

    return Agent(best_net, cfg.gamma_dqn), history


def _validation_objective(sim, agent, n_episodes, master_seed, gamma):
    policy = AgentPolicy(agent, sim.code.l0, sim.code.field.bits_per_symbol)
    vals = []
    for i in range(n_episodes):
        trace, _ = sim.run_episode(policy, master_seed + 0x56414C, i)
        vals.append(trace.eb * gamma ** (trace.t_rounds - 1))
    return float(np.mean(vals))
