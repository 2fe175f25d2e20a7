import numpy as np
import pytest

from sidrl.intrinsic import (
    DistillationPair,
    ForwardModel,
    Normalizer,
    RunningStats,
    build_intrinsic_model,
)


def test_welford_matches_batch_formulas():
    rng = np.random.default_rng(0)
    data = rng.normal(3.0, 2.5, size=1000)
    st = RunningStats()
    for x in data:
        st.push(float(x))
    assert st.count == 1000
    assert abs(st.mean - data.mean()) < 1e-9
    assert abs(st.variance - data.var()) < 1e-9  # population convention


def test_welford_permutation_stable():
    rng = np.random.default_rng(1)
    data = rng.normal(size=500)
    a, b = RunningStats(), RunningStats()
    for x in data:
        a.push(float(x))
    for x in data[::-1]:
        b.push(float(x))
    assert abs(a.mean - b.mean) < 1e-9
    assert abs(a.variance - b.variance) < 1e-9


def test_welford_degenerate():
    st = RunningStats()
    assert st.variance == 0.0
    st.push(4.0)
    assert st.mean == 4.0 and st.variance == 0.0


def test_icm_zero_net_reward_is_feature_norm():
    m = ForwardModel(feature_dim=4, n_actions=4, seed=0, init_scale=0.0)
    phi_next = np.array([0.0, 1.0, 0.0, 0.0])
    assert m.reward(np.zeros(4), 0, phi_next) == 1.0


def test_icm_reward_is_pure_function_of_inputs():
    m = ForwardModel(feature_dim=5, n_actions=4, seed=3)
    phi_s = np.eye(5)[2]
    phi_n = np.eye(5)[4]
    assert m.reward(phi_s, 1, phi_n) == m.reward(phi_s, 1, phi_n)


def test_icm_converges_on_repeated_transition():
    m = ForwardModel(feature_dim=6, n_actions=4, seed=0)
    phi_s, phi_n = np.eye(6)[0], np.eye(6)[1]
    for _ in range(500):
        m.train(phi_s, 2, phi_n)
    assert m.reward(phi_s, 2, phi_n) < 0.01


def test_icm_error_decays_monotonically_modulo_noise():
    m = ForwardModel(feature_dim=4, n_actions=4, seed=1)
    phi_s, phi_n = np.eye(4)[0], np.eye(4)[3]
    last = m.reward(phi_s, 0, phi_n)
    increases = 0
    for _ in range(200):
        m.train(phi_s, 0, phi_n)
        cur = m.reward(phi_s, 0, phi_n)
        increases += cur > last + 1e-12
        last = cur
    assert increases == 0


def test_rnd_zero_gap_when_predictor_equals_target():
    p = DistillationPair(feature_dim=5, seed=0)
    p.copy_target_to_predictor()
    for s in range(5):
        assert p.reward(np.eye(5)[s]) == 0.0


def test_rnd_novel_state_scores_above_trained_mean():
    p = DistillationPair(feature_dim=5, seed=0)
    phis = np.eye(5)
    rng = np.random.default_rng(7)
    for _ in range(2000):
        p.train(phis[int(rng.integers(4))])
    trained = np.mean([p.reward(phis[i]) for i in range(4)])
    assert p.reward(phis[4]) > trained


def test_rnd_target_frozen():
    p = DistillationPair(feature_dim=4, seed=2)
    before = p.target_bytes()
    out0 = p.target.forward(np.eye(4)[1]).copy()
    for _ in range(300):
        p.train(np.eye(4)[1])
    assert p.target_bytes() == before
    assert np.array_equal(p.target.forward(np.eye(4)[1]), out0)
    with pytest.raises(ValueError):
        p.target.w1[0, 0] = 5.0


def test_normalizer_first_sample_passes_through():
    n = Normalizer()
    assert n.normalize(0.7) == 0.7


def test_normalizer_std_matches_batch():
    n = Normalizer()
    raw = [float(x) for x in range(1, 101)]
    for x in raw:
        n.normalize(x)
    assert abs(n.std_stats.std - np.std(raw)) < 1e-6


def test_normalizer_constant_stream_hits_floor():
    n = Normalizer()
    vals = [n.normalize(0.5) for _ in range(10)]
    # sigma = 0 for a constant stream; the floor keeps outputs finite
    assert n.floor_hits > 0
    assert all(np.isfinite(v) for v in vals)
    assert vals[-1] == pytest.approx(0.5 / Normalizer.STD_FLOOR)


def test_normalizer_scale_equivariance():
    rng = np.random.default_rng(5)
    raw = np.abs(rng.normal(1.0, 0.4, size=10_000))
    a, b = Normalizer(), Normalizer()
    for x in raw:
        va = a.normalize(float(x))
        vb = b.normalize(float(37.0 * x))
    assert abs(vb / va - 1.0) < 0.01


def test_normalize_batch_bit_identical_to_scalar_loop():
    rng = np.random.default_rng(11)
    raw = np.abs(rng.normal(0.02, 0.01, size=400))
    # mix in a constant stretch so the floor branch is exercised
    raw[100:140] = 0.5
    a, b = Normalizer(), Normalizer()
    scalar = np.array([a.normalize(float(x)) for x in raw])
    chunks = [b.normalize_batch(raw[i : i + 128]) for i in range(0, len(raw), 128)]
    batched = np.concatenate(chunks)
    assert scalar.tobytes() == batched.tobytes()
    assert a.floor_hits == b.floor_hits
    assert (a.std_stats.count, a.std_stats.mean, a.std_stats.m2) == (
        b.std_stats.count,
        b.std_stats.mean,
        b.std_stats.m2,
    )
    assert a.normalized_mean == b.normalized_mean
    assert a.extrinsic_scale() == b.extrinsic_scale()


def test_extrinsic_scale_arithmetic():
    n = Normalizer(eta=3.0, gamma_i=0.99)
    # force the running normalized mean to 0.5 with a single sample
    n.normalize(0.5)
    assert n.normalized_mean == 0.5
    assert n.extrinsic_scale() == 150.0


def test_extrinsic_scale_zero_before_any_reward():
    n = Normalizer(eta=3.0, gamma_i=0.99)
    assert n.extrinsic_scale() == 0.0


def test_normalizer_defaults():
    n = Normalizer()
    assert n.eta == 3.0
    assert n.gamma_i == 0.99
    with pytest.raises(ValueError):
        Normalizer(gamma_i=1.0)


def test_build_intrinsic_model_dispatch():
    assert isinstance(build_intrinsic_model("icm", 5, 4), ForwardModel)
    assert isinstance(build_intrinsic_model("rnd", 5, 4), DistillationPair)
    with pytest.raises(ValueError):
        build_intrinsic_model("count", 5, 4)
