"""Property-based invariants spanning synthesis, parameters, and file I/O."""

import tempfile
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rawnoise import (
    FitLine,
    JointParamModel,
    NoiseParams,
    RngStream,
    darken,
    read_frame,
    restore,
    sample_noise_params,
    synthesize_noise,
    write_frame,
)
from rawnoise.model import exp_scale

from conftest import constant_frame

component_sets = st.sets(st.sampled_from(["shot", "read", "row", "quant"]))

params_strategy = st.builds(
    NoiseParams,
    k=st.floats(min_value=0.5, max_value=8.0),
    lam=st.floats(min_value=-0.45, max_value=0.45),
    sigma_tl=st.floats(min_value=0.0, max_value=16.0),
    sigma_r=st.floats(min_value=0.0, max_value=4.0),
    q=st.floats(min_value=0.0, max_value=2.0),
    enabled=component_sets,
)


@given(params_strategy, st.integers(min_value=0, max_value=2**32))
@settings(max_examples=40, deadline=None)
def test_component_additivity_property(params, seed):
    clean = constant_frame(60.0, shape=(8, 12))
    stream = RngStream(seed).child("noise")
    full = synthesize_noise(clean, params, stream, clip=False)
    base = synthesize_noise(clean, params.with_enabled(set()), stream, clip=False)
    total = np.zeros_like(base.data)
    for comp in params.enabled:
        solo = synthesize_noise(clean, params.with_enabled({comp}), stream, clip=False)
        total += solo.data - base.data
    np.testing.assert_allclose(base.data + total, full.data, rtol=0, atol=1e-9)


@given(params_strategy, st.integers(min_value=0, max_value=2**32))
@settings(max_examples=40, deadline=None)
def test_clip_support_property(params, seed):
    clean = constant_frame(500.0, shape=(8, 8), white_level=1023)
    out = synthesize_noise(clean, params, RngStream(seed), clip=True)
    assert np.all(out.data >= 0.0)
    assert np.all(out.data <= 1023.0)


@given(st.floats(min_value=0.5, max_value=8.0), st.integers(min_value=0, max_value=2**32))
@settings(max_examples=40, deadline=None)
def test_zero_noise_fixed_point_property(k, seed):
    clean = constant_frame(75.0, shape=(6, 6))
    params = NoiseParams(k=k, lam=0.0, sigma_tl=0.0, sigma_r=0.0, q=0.0,
                         enabled={"read", "row", "quant"})
    out = synthesize_noise(clean, params, RngStream(seed), clip=False)
    np.testing.assert_array_equal(out.data, k * clean.data)


@given(
    st.floats(min_value=1.0, max_value=300.0),
    st.integers(min_value=0, max_value=2**16),
)
@settings(max_examples=40, deadline=None)
def test_darken_restore_inverse_property(f, seed):
    gen = np.random.default_rng(seed)
    clean = constant_frame(0.0, shape=(6, 6)).copy_with(gen.uniform(0, 65535, (6, 6)))
    back = restore(darken(clean, f), f, clip=False)
    np.testing.assert_allclose(back.data, clean.data, rtol=1e-12)


@given(
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=0.0, max_value=1.5),
    st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=1, max_size=6),
    st.integers(min_value=0, max_value=2**32),
)
@settings(max_examples=60, deadline=None)
def test_sampled_params_respect_model_property(log_k_lo, spread, pool, seed):
    model = JointParamModel(
        log_k_min=log_k_lo,
        log_k_max=log_k_lo + spread,
        tl_line=FitLine(0.5, 0.2, 0.1, 4),
        row_line=FitLine(0.4, -0.5, 0.1, 4),
        lambda_pool=tuple(pool),
    )
    p = sample_noise_params(model, RngStream(seed))
    assert exp_scale(model.log_k_min) <= p.k <= exp_scale(model.log_k_max) * (1 + 1e-12)
    assert p.lam in model.lambda_pool
    assert p.sigma_tl > 0 and p.sigma_r > 0
    assert p.q == 1.0


@given(
    st.integers(min_value=1, max_value=6).map(lambda n: 2 * n),
    st.integers(min_value=1, max_value=6).map(lambda n: 2 * n),
    st.integers(min_value=0, max_value=2000),
    st.integers(min_value=0, max_value=2**32),
)
@settings(max_examples=30, deadline=None)
def test_frame_file_round_trip_property(h, w, black_level, seed):
    gen = np.random.default_rng(seed)
    white_level = black_level + int(gen.integers(1, 65535 - black_level + 1))
    data = np.floor(gen.uniform(0, white_level - black_level + 1, (h, w)))
    frame = constant_frame(0.0, shape=(h, w), black_level=black_level,
                           white_level=white_level).copy_with(data)
    with tempfile.TemporaryDirectory() as td:
        path = Path(td) / "f.pgm"
        write_frame(frame, path)
        back = read_frame(path)
    np.testing.assert_array_equal(back.data, frame.data)
    assert back.black_level == black_level
    assert back.white_level == white_level
