"""Flat key=value experiment configuration with Table-level defaults."""

from dataclasses import dataclass, fields


@dataclass
class ExperimentConfig:
    # scenario
    k_bits: int = 40
    l0: int = 15
    gf_order: int = 256
    mod_order: int = 256
    snr_db: float = 6.0
    channel: str = "awgn"
    bp_iters: int = 5
    t_max: int = 15
    tau_p_ms: float = 1.0
    e_first_mj: float = 0.6
    lp: int = 1
    alpha: float = 0.1
    code_seed: int = 1
    naive_mean_rounds: float = 7.7
    # policy
    policy: str = "harq"
    l_static: int = 8
    h_th: float = 5.39
    checkpoint: str = ""
    # training
    gamma_dqn: float = 0.5
    n_train: int = 270000
    learning_rate: float = 0.001
    batch_size: int = 64
    grad_clip: float = 5.0
    train_every: int = 100
    steps_per_session: int = 15
    target_sync_every: int = 10
    eps_start: float = 1.0
    eps_decay: float = 0.05
    eps_decay_every: int = 8000
    eps_min: float = 0.4
    buffer_size: int = 60000
    validate_every: int = 10000
    n_validation: int = 2000
    # evaluation
    n_test: int = 30000
    gamma: float = 0.92

    def to_text(self):
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"


_NAMED_CASTS = {"int": int, "float": float, "str": str}
_FIELD_CASTS = {
    f.name: _NAMED_CASTS[f.type] if isinstance(f.type, str) else f.type
    for f in fields(ExperimentConfig)
}


def parse_config(text):
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_CASTS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        setattr(cfg, key, _FIELD_CASTS[key](value))
    return cfg


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def save_config(cfg, path):
    with open(path, "w") as fh:
        fh.write(cfg.to_text())
