import numpy as np
import pytest

from rafharq import policies


def test_taper_schedule():
    assert policies.taper_schedule(8, 1) == 8
    assert policies.taper_schedule(8, 3) == 2
    assert policies.taper_schedule(12, 2) == 4
    assert policies.taper_schedule(1, 5) == 1
    assert policies.taper_schedule(2, 9) == 2
    assert policies.taper_schedule(10, 2) == 2
    assert policies.taper_schedule(11, 2) == 4
    with pytest.raises(ValueError):
        policies.taper_schedule(8, 0)


def test_select_random_basic():
    rng = np.random.default_rng(0)
    assert policies.select_random(15, 15, rng).all()
    for count in (1, 5, 14):
        assert policies.select_random(count, 15, rng).sum() == count
    with pytest.raises(ValueError):
        policies.select_random(0, 15, rng)
    with pytest.raises(ValueError):
        policies.select_random(16, 15, rng)


def test_select_random_reproducible():
    a = policies.select_random(5, 15, np.random.default_rng(3))
    b = policies.select_random(5, 15, np.random.default_rng(3))
    assert np.array_equal(a, b)


def test_select_random_uniform():
    rng = np.random.default_rng(1)
    hits = np.zeros(15)
    n = 100_000
    for _ in range(n):
        hits += policies.select_random(1, 15, rng)
    freq = hits / n
    assert np.all(np.abs(freq - 1 / 15) < 0.01)


def test_select_max_entropy_examples():
    assert np.array_equal(policies.select_max_entropy([0.5, 3.2, 1.1], 2), [0, 1, 1])
    assert policies.select_max_entropy(np.ones(15), 15).all()
    ties = policies.select_max_entropy(np.full(15, 2.0), 2)
    assert np.array_equal(ties, [1, 1] + [0] * 13)
    with pytest.raises(ValueError):
        policies.select_max_entropy(np.ones(15), 0)


def test_select_max_entropy_matches_rank_indicator():
    # strict-inequality rank formulation: select i iff the number of strictly
    # larger entries is below count (distinct entries)
    rng = np.random.default_rng(2)
    for _ in range(10_000):
        h = rng.permutation(15) + rng.random(15) * 0.5
        count = int(rng.integers(1, 16))
        indicator = np.array([(h > h[i]).sum() < count for i in range(15)])
        assert np.array_equal(policies.select_max_entropy(h, count), indicator)


def test_dharq_count():
    assert policies.dharq_count(np.full(15, 3.0), 8.0) == 1  # clamp
    assert policies.dharq_count(np.full(15, 3.0), 0.0) == 15
    assert policies.dharq_count([3.0, 5.5, 6.1], 5.39) == 2


def test_ta_pattern():
    h = np.array([3.0, 5.5, 6.1, 1.0])
    assert np.array_equal(policies.ta_pattern(h, 0.5), [1, 1, 1, 1])
    assert np.array_equal(policies.ta_pattern(h, 7.0), [0, 0, 1, 0])  # fallback
    assert np.array_equal(policies.ta_pattern(h, 5.39), h > 5.39)


def test_threshold_monotonicity():
    rng = np.random.default_rng(3)
    for _ in range(100):
        h = rng.random(15) * 8
        ths = np.sort(rng.random(5) * 8)
        counts = [policies.dharq_count(h, t) for t in ths]
        weights = [policies.ta_pattern(h, t).sum() for t in ths]
        assert all(a >= b for a, b in zip(counts, counts[1:]))
        assert all(a >= b for a, b in zip(weights, weights[1:]))


def _run_policy(policy, h, t, rng):
    count = policy.count(h, t, rng)
    pattern = policy.pattern(h, count, rng)
    return count, np.asarray(pattern)


@pytest.mark.parametrize("policy", [
    policies.HarqPolicy(8),
    policies.DharqPolicy(5.39),
    policies.StPolicy(7, 15, 8),
    policies.TaPolicy(5.39, 15, 8),
    policies.NaiveF0Policy(15, 8),
])
def test_policies_never_return_empty_pattern(policy):
    rng = np.random.default_rng(4)
    for t in range(1, 15):
        h = rng.random(15) * 8
        count, pattern = _run_policy(policy, h, t, rng)
        assert pattern.sum() >= 1
        if policy.kind != "ta":
            assert pattern.sum() == count


def test_naive_f0_always_one_max_entropy_symbol():
    policy = policies.NaiveF0Policy(15, 8)
    rng = np.random.default_rng(5)
    h = rng.random(15) * 8
    count, pattern = _run_policy(policy, h, 4, rng)
    assert count == 1
    assert np.array_equal(pattern, policies.select_max_entropy(h, 1))


class _StubAgent:
    def __init__(self, q):
        self.q = np.asarray(q, dtype=float)

    def q_values(self, h):
        return self.q


def test_agent_policy_greedy():
    rng = np.random.default_rng(6)
    h = rng.random(15)
    constant = policies.AgentPolicy(_StubAgent(np.zeros(15)), 15, 8)
    assert constant.count(h, 1, rng) == 1  # lowest-index argmax tie-break

    q = np.zeros(15)
    q[6] = 5.0
    peaked = policies.AgentPolicy(_StubAgent(q), 15, 8)
    assert peaked.count(h, 1, rng) == 7
    assert np.array_equal(peaked.pattern(h, 7, rng), policies.select_max_entropy(h, 7))


def test_agent_policy_exploration_uniform():
    rng = np.random.default_rng(7)
    policy = policies.AgentPolicy(_StubAgent(np.zeros(15)), 15, 8, epsilon=1.0)
    h = np.zeros(15)
    n = 100_000
    draws = np.array([policy.count(h, 1, rng) for _ in range(n)])
    counts = np.bincount(draws, minlength=16)[1:]
    assert counts.sum() == n
    expected = n / 15
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 36.1  # 14 dof, p ~ 0.001


def test_describe_strings():
    assert policies.HarqPolicy(8).describe() == "harq(L=8)"
    assert policies.DharqPolicy(5.39).describe() == "dharq(Hth=5.39)"
    assert policies.StPolicy(7, 15, 8).describe() == "st(L=7)"
    assert policies.TaPolicy(5.39, 15, 8).describe() == "ta(Hth=5.39)"
