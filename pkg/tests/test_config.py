"""Config validation, receptive-field arithmetic, and layer-plan routing."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcnfx.config import (
    MAX_RECEPTIVE_FIELD,
    NetworkConfig,
    derive_layer_plan,
    describe_lines,
    format_rf_ms,
    param_count,
    receptive_field,
)
from tcnfx.errors import ConfigTooLargeError, ConfigurationError


def test_receptive_field_pinned_values():
    assert receptive_field(NetworkConfig(num_layers=1, kernel_size=1,
                                         dilation_growth=1)) == 1
    assert receptive_field(NetworkConfig(num_layers=3, kernel_size=3,
                                         dilation_growth=2)) == 15
    assert receptive_field(NetworkConfig(num_layers=16, kernel_size=3,
                                         dilation_growth=2)) == 131071


def test_receptive_field_linear_growth_when_g_is_1():
    for L in (1, 2, 5, 9):
        cfg = NetworkConfig(num_layers=L, kernel_size=4, dilation_growth=1)
        assert receptive_field(cfg) == 1 + 3 * L


@given(L=st.integers(1, 8), k=st.integers(1, 9), g=st.integers(1, 4))
@settings(max_examples=200, deadline=None)
def test_receptive_field_matches_direct_sum(L, k, g):
    cfg = NetworkConfig(num_layers=L, kernel_size=k, dilation_growth=g)
    direct = 1 + (k - 1) * sum(g**l for l in range(L))
    assert receptive_field(cfg) == direct


def test_receptive_field_overflow_rejected():
    cfg = NetworkConfig(num_layers=32, kernel_size=64, dilation_growth=16)
    with pytest.raises(ConfigTooLargeError):
        receptive_field(cfg)
    # just inside the limit still works
    assert receptive_field(NetworkConfig(num_layers=30, kernel_size=3,
                                         dilation_growth=2)) < MAX_RECEPTIVE_FIELD


@pytest.mark.parametrize("field,value", [
    ("num_layers", 0),
    ("num_layers", 33),
    ("kernel_size", 0),
    ("kernel_size", 65),
    ("dilation_growth", 0),
    ("channel_width", 0),
    ("in_channels", 3),
    ("out_channels", 0),
    ("seed", -1),
    ("seed", 2**64),
])
def test_out_of_range_fields_are_named_in_the_error(field, value):
    with pytest.raises(ConfigurationError, match=field):
        NetworkConfig(**{field: value})


def test_bad_enum_values_rejected():
    with pytest.raises(ConfigurationError, match="activation"):
        NetworkConfig(activation="banana")
    with pytest.raises(ConfigurationError, match="init_scheme"):
        NetworkConfig(init_scheme="xavier")


def test_init_param_only_for_parameterized_schemes():
    with pytest.raises(ConfigurationError, match="init_param"):
        NetworkConfig(init_scheme="glorot_uniform", init_param=0.5)
    assert NetworkConfig(init_scheme="normal", init_param=0.5).resolved_init_param() == 0.5
    assert NetworkConfig(init_scheme="normal").resolved_init_param() == 0.4
    assert NetworkConfig(init_scheme="uniform").resolved_init_param() == 1.0


def test_layer_plan_single_layer_connects_io_directly():
    plan = derive_layer_plan(NetworkConfig(num_layers=1, in_channels=1,
                                           out_channels=2, channel_width=8))
    assert len(plan) == 1
    assert (plan[0].in_ch, plan[0].out_ch) == (1, 2)


def test_layer_plan_dense_routing():
    plan = derive_layer_plan(NetworkConfig(num_layers=3, in_channels=1,
                                           out_channels=2, channel_width=8,
                                           dilation_growth=2))
    assert [(s.in_ch, s.out_ch, s.dilation) for s in plan] == [
        (1, 8, 1), (8, 8, 2), (8, 2, 4)]
    assert not any(s.depthwise for s in plan)


def test_layer_plan_depthwise_keeps_entry_and_exit_dense():
    plan = derive_layer_plan(NetworkConfig(num_layers=3, in_channels=1,
                                           out_channels=2, channel_width=8,
                                           depthwise=True))
    assert [s.depthwise for s in plan] == [False, True, False]
    assert (plan[0].in_ch, plan[0].out_ch) == (1, 8)
    assert (plan[1].in_ch, plan[1].out_ch) == (8, 8)
    assert (plan[2].in_ch, plan[2].out_ch) == (8, 2)


@given(
    L=st.integers(1, 10),
    k=st.integers(1, 8),
    g=st.integers(1, 4),
    c=st.integers(1, 16),
    i=st.integers(1, 2),
    o=st.integers(1, 2),
    dw=st.booleans(),
    bias=st.booleans(),
)
@settings(max_examples=300, deadline=None)
def test_layer_plan_composes_for_every_config(L, k, g, c, i, o, dw, bias):
    """Adjacent layers agree on channel counts and dilations follow g**l."""
    cfg = NetworkConfig(num_layers=L, kernel_size=k, dilation_growth=g,
                        channel_width=c, in_channels=i, out_channels=o,
                        depthwise=dw, use_bias=bias)
    plan = derive_layer_plan(cfg)
    assert plan[0].in_ch == i
    assert plan[-1].out_ch == o
    for a, b in zip(plan, plan[1:]):
        assert a.out_ch == b.in_ch
    for l, spec in enumerate(plan):
        assert spec.dilation == g**l
        if spec.depthwise:
            assert spec.in_ch == spec.out_ch


def test_param_count_pinned_values():
    assert param_count(NetworkConfig(num_layers=1, in_channels=1, out_channels=1,
                                     kernel_size=3, use_bias=True)) == 4
    assert param_count(NetworkConfig(num_layers=2, in_channels=1, out_channels=2,
                                     channel_width=8, kernel_size=3,
                                     use_bias=True)) == 82


def test_param_count_depthwise_hidden_layer_reduction():
    # one hidden layer at c=8, k=3: 24 depthwise scalars vs 192 dense
    dense = NetworkConfig(num_layers=3, channel_width=8, kernel_size=3)
    dw = NetworkConfig(num_layers=3, channel_width=8, kernel_size=3, depthwise=True)
    plan_dense = derive_layer_plan(dense)[1]
    plan_dw = derive_layer_plan(dw)[1]
    assert plan_dense.weight_shape == (8, 8, 3)
    assert plan_dw.weight_shape == (8, 1, 3)
    assert param_count(dense) - param_count(dw) == 192 - 24


def test_format_rf_ms_canonical_string():
    assert format_rf_ms(131071, 44100) == "2972.1"
    assert format_rf_ms(15, 44100) == "0.3"
    assert format_rf_ms(44100, 44100) == "1000.0"


def test_describe_lines_layout():
    lines = describe_lines(NetworkConfig(num_layers=3, seed=42), 44100)
    assert lines[0].startswith("receptive field: 15 samples (0.3 ms")
    assert lines[1] == "parameters: 240"
    assert lines[2] == "seed: 42"
    assert len(lines) == 4 + 3  # header + one row per layer
