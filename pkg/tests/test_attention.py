"""Instance/point two-stage attention: composition, equivariance, isolation."""

import math

import numpy as np
import pytest

from mapvec.attention import (
    IiaConfig,
    IiaParams,
    compose_queries,
    iia_forward,
    init_iia_params,
    instance_self_attention,
    point_self_attention,
)
from mapvec.nn import (
    LinearParams,
    MhsaParams,
    ShapeError,
    init_linear,
    init_mhsa,
    linear_forward,
    mhsa_forward,
    mlp_forward,
)
from mapvec.rng import SeededRng


def _params(seed=0, **kwargs):
    cfg = IiaConfig(**kwargs)
    return cfg, init_iia_params(cfg, SeededRng(seed))


def _rand_h(cfg, seed=1):
    gen = np.random.default_rng(seed)
    return gen.normal(size=(cfg.n_instances * cfg.n_points, cfg.channels))


def _permute_instances(h, perm, n_points):
    blocks = h.reshape(len(perm), n_points, h.shape[1])
    return blocks[perm].reshape(h.shape)


# ---------------------------------------------------------------------------
# config / params


def test_config_defaults_and_hidden_width():
    cfg = IiaConfig()
    assert (cfg.n_instances, cfg.n_points, cfg.channels, cfg.num_heads) == (8, 20, 32, 4)
    assert cfg.mlp_hidden == 64
    assert IiaConfig(channels=16, mlp_hidden=5).mlp_hidden == 5


def test_config_rejects_indivisible_heads():
    with pytest.raises(ShapeError):
        IiaConfig(channels=30, num_heads=4)


def test_config_rejects_nonpositive_dims():
    with pytest.raises(ShapeError):
        IiaConfig(n_instances=0)
    with pytest.raises(ShapeError):
        IiaConfig(n_points=0)


def test_params_validate_merge_widths():
    cfg = IiaConfig(n_instances=2, n_points=3, channels=4, num_heads=2)
    rng = SeededRng(0)
    good = init_iia_params(cfg, rng)
    bad_first = (init_linear(SeededRng(1), 5, 4),)
    with pytest.raises(ShapeError):
        IiaParams(3, 4, bad_first, good.instance_attn, good.point_attn)
    bad_last = (init_linear(SeededRng(1), 12, 3),)
    with pytest.raises(ShapeError):
        IiaParams(3, 4, bad_last, good.instance_attn, good.point_attn)


def test_init_draw_order_is_merge_then_attention():
    cfg = IiaConfig(n_instances=2, n_points=3, channels=4, num_heads=2)
    params = init_iia_params(cfg, SeededRng(7))
    rng = SeededRng(7)
    merge = (
        init_linear(rng, cfg.channels * cfg.n_points, cfg.mlp_hidden),
        init_linear(rng, cfg.mlp_hidden, cfg.channels),
    )
    inst = init_mhsa(rng, cfg.channels, cfg.num_heads)
    point = init_mhsa(rng, cfg.channels, cfg.num_heads)
    assert np.array_equal(params.merge_mlp[0].weight, merge[0].weight)
    assert np.array_equal(params.merge_mlp[1].bias, merge[1].bias)
    assert np.array_equal(params.instance_attn.out.weight, inst.out.weight)
    assert np.array_equal(params.point_attn.out.weight, point.out.weight)


# ---------------------------------------------------------------------------
# compose_queries


def test_compose_zero_point_queries():
    q_ins = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = compose_queries(q_ins, np.zeros((3, 2)))
    assert out.shape == (6, 2)
    assert np.array_equal(out[:3], np.tile(q_ins[0], (3, 1)))
    assert np.array_equal(out[3:], np.tile(q_ins[1], (3, 1)))


def test_compose_zero_instance_queries():
    q_pos = np.array([[0.5, -0.5], [1.5, 2.5]])
    out = compose_queries(np.zeros((2, 2)), q_pos)
    assert np.array_equal(out[:2], q_pos)
    assert np.array_equal(out[2:], q_pos)


def test_compose_hand_case():
    out = compose_queries(np.array([[1.0], [10.0]]), np.array([[0.1], [0.2]]))
    assert np.allclose(out, [[1.1], [1.2], [10.1], [10.2]], atol=1e-12)


def test_compose_rejects_channel_mismatch():
    with pytest.raises(ShapeError):
        compose_queries(np.zeros((2, 3)), np.zeros((2, 4)))


# ---------------------------------------------------------------------------
# instance stage


def test_instance_stage_single_instance_identity_path():
    cfg, params = _params(seed=2, n_instances=1, n_points=4, channels=6, num_heads=2)
    h = _rand_h(cfg, seed=3)
    out = instance_self_attention(h, params)
    compressed = mlp_forward(h.reshape(1, -1), params.merge_mlp)
    attn = params.instance_attn
    heads = [linear_forward(compressed, attn.value[k]) for k in range(attn.num_heads)]
    expected = linear_forward(np.concatenate(heads, axis=1), attn.out)
    assert np.allclose(out, expected, atol=1e-12)


def test_instance_stage_identical_instances_give_identical_rows():
    cfg, params = _params(seed=4, n_instances=2, n_points=3, channels=4, num_heads=2)
    block = np.random.default_rng(5).normal(size=(cfg.n_points, cfg.channels))
    h = np.vstack([block, block])
    out = instance_self_attention(h, params)
    assert np.array_equal(out[0], out[1])


def test_instance_stage_permutation_equivariance():
    cfg, params = _params(seed=6, n_instances=5, n_points=4, channels=8, num_heads=2)
    h = _rand_h(cfg, seed=7)
    perm = np.random.default_rng(8).permutation(cfg.n_instances)
    base = instance_self_attention(h, params)
    permuted = instance_self_attention(_permute_instances(h, perm, cfg.n_points), params)
    assert np.abs(permuted - base[perm]).max() <= 1e-9


def test_instance_stage_is_point_order_sensitive():
    cfg, params = _params(seed=9, n_instances=2, n_points=5, channels=4, num_heads=2)
    h = _rand_h(cfg, seed=10)
    shuffled = h.copy()
    shuffled[:cfg.n_points] = h[:cfg.n_points][::-1]
    a = instance_self_attention(h, params)
    b = instance_self_attention(shuffled, params)
    assert np.abs(a - b).max() > 1e-9


def test_instance_stage_shape_errors():
    cfg, params = _params(seed=11, n_instances=2, n_points=3, channels=4, num_heads=2)
    with pytest.raises(ShapeError):
        instance_self_attention(np.zeros((6, 5)), params)  # wrong channels
    with pytest.raises(ShapeError):
        instance_self_attention(np.zeros((7, 4)), params)  # not a multiple of N_p


# ---------------------------------------------------------------------------
# point stage


def test_point_stage_zero_summary_reduces_to_per_block_attention():
    cfg, params = _params(seed=12, n_instances=3, n_points=4, channels=4, num_heads=2)
    h = _rand_h(cfg, seed=13)
    out = point_self_attention(h, np.zeros((3, 4)), params)
    for i in range(3):
        block = h[i * 4:(i + 1) * 4]
        assert np.array_equal(out[i * 4:(i + 1) * 4], mhsa_forward(block, params.point_attn))


def test_point_stage_isolation():
    cfg, params = _params(seed=14, n_instances=4, n_points=3, channels=4, num_heads=2)
    h = _rand_h(cfg, seed=15)
    f_ins = np.random.default_rng(16).normal(size=(4, 4))
    base = point_self_attention(h, f_ins, params)
    tweaked = h.copy()
    tweaked[3:6] += 5.0  # instance 1's rows
    out = point_self_attention(tweaked, f_ins, params)
    assert not np.allclose(out[3:6], base[3:6])
    mask = np.ones(12, dtype=bool)
    mask[3:6] = False
    assert np.array_equal(out[mask], base[mask])


def test_point_stage_hand_case_identity_projections():
    ident = LinearParams(weight=np.eye(2), bias=np.zeros(2))
    attn = MhsaParams(num_heads=1, model_dim=2, query=(ident,), key=(ident,), value=(ident,), out=ident)
    merge = (LinearParams(weight=np.zeros((2, 4)), bias=np.zeros(2)),)
    params = IiaParams(n_points=2, channels=2, merge_mlp=merge, instance_attn=attn, point_attn=attn)
    h = np.array([[1.0, 0.0], [0.0, 1.0]])
    f_ins = np.array([[0.25, -0.25]])
    e = h + f_ins  # enriched rows
    logits = (e @ e.T) / math.sqrt(2.0)
    w = np.exp(logits - logits.max(axis=1, keepdims=True))
    w /= w.sum(axis=1, keepdims=True)
    expected = w @ e
    out = point_self_attention(h, f_ins, params)
    assert np.allclose(out, expected, atol=1e-12)


def test_point_stage_rejects_bad_summary_shape():
    cfg, params = _params(seed=17, n_instances=2, n_points=3, channels=4, num_heads=2)
    h = _rand_h(cfg, seed=18)
    with pytest.raises(ShapeError):
        point_self_attention(h, np.zeros((3, 4)), params)


# ---------------------------------------------------------------------------
# end to end


def test_forward_preserves_shape_across_configs():
    for seed, kwargs in enumerate(
        [
            dict(n_instances=1, n_points=1, channels=2, num_heads=1),
            dict(n_instances=3, n_points=5, channels=6, num_heads=3),
            dict(n_instances=8, n_points=20, channels=32, num_heads=4),
        ]
    ):
        cfg, params = _params(seed=seed, **kwargs)
        h = _rand_h(cfg, seed=seed + 100)
        assert iia_forward(h, params).shape == h.shape


def test_forward_instance_permutation_equivariance():
    cfg, params = _params(seed=20, n_instances=6, n_points=4, channels=8, num_heads=4)
    h = _rand_h(cfg, seed=21)
    perm = np.random.default_rng(22).permutation(cfg.n_instances)
    base = iia_forward(h, params)
    permuted = iia_forward(_permute_instances(h, perm, cfg.n_points), params)
    expected = _permute_instances(base, perm, cfg.n_points)
    assert np.abs(permuted - expected).max() <= 1e-9


def test_forward_deterministic():
    cfg, params1 = _params(seed=23, n_instances=4, n_points=6, channels=8, num_heads=2)
    _, params2 = _params(seed=23, n_instances=4, n_points=6, channels=8, num_heads=2)
    h = _rand_h(cfg, seed=24)
    assert np.array_equal(iia_forward(h, params1), iia_forward(h, params2))
