import numpy as np
import pytest

from cosetcap import (ChannelFamily, CodeStack, MonteCarlo, PauliChannel,
                      compose_stack, effective_channels, family_eval,
                      parse_stack_spec, registry_get, s_rb_code,
                      s_rb_stack_exact, s_rb_stack_mc)
from cosetcap.stacks import StackBudgetError

DEPOL = ChannelFamily("depolarizing")
CH06 = family_eval(DEPOL, 0.06)

# stacks of total length <= 12 with 2 and 3 layers, including k=2 tops
ORACLE_SPECS = [
    "repZ(3) x repX(3)",
    "repZ(2) x repX(5)",
    "repX(3) x repZ(4)",
    "repZ(2) x repX(2) x repZ(3)",
    "repZ(2) x repX(3) x repZ(2)",
    "repZ(3) x 422",
    "repZ(2) x scfH",
    "repZ(5) x repX(2)",
    "repZ(2) x repX(2) x 3repX",
    "repZ(3) x toric822",  # 24 qubits: flat side skipped below
]


def test_parse_stack_spec():
    # aliases resolve to canonical registry names
    stack = parse_stack_spec("5repX x 5qubit x 5repZ")
    assert [c.name for c in stack.layers] == ["repX(5)", "5qubit", "5repZ"]
    assert stack.total_length == 125
    assert stack.k_outer == 1
    assert parse_stack_spec("").layers == ()
    assert parse_stack_spec("").total_length == 1
    with pytest.raises(KeyError):
        parse_stack_spec("noidea x 5repZ")


def test_inner_layers_must_be_k1():
    with pytest.raises(ValueError):
        CodeStack((registry_get("422"), registry_get("repZ(3)")))


def test_effective_channels_rep3_groups():
    es = effective_channels(registry_get("repZ(3)"), [CH06] * 3)
    es.check_invariants()
    assert len(es.weights) == 2
    # trivial syndrome = X-support empty or full; the three nontrivial
    # syndromes share a single conditional channel class
    p = 0.06
    assert es.weights[0] == pytest.approx((1 - 2 * p) ** 3 + (2 * p) ** 3, abs=1e-12)


def test_effective_channels_noiseless():
    es = effective_channels(registry_get("repZ(3)"), [PauliChannel(1, 0, 0, 0)] * 3)
    assert len(es.weights) == 1
    assert es.weights[0] == pytest.approx(1.0)
    assert es.channels[0] == pytest.approx([1, 0, 0, 0])


def test_effective_channels_five_qubit_structure():
    es = effective_channels(registry_get("5qubit"), [CH06] * 5)
    es.check_invariants()
    # 16 syndromes collapse to the trivial one plus one equivalence class
    assert len(es.weights) == 2
    assert np.all(es.channels >= 0)
    assert es.channels.sum(axis=1) == pytest.approx(np.ones(2))


def test_effective_channels_requires_k1():
    with pytest.raises(ValueError):
        effective_channels(registry_get("422"), [CH06] * 4)


@pytest.mark.parametrize("spec", [s for s in ORACLE_SPECS if "toric" not in s])
def test_stack_exact_equals_flat_composition(spec):
    stack = parse_stack_spec(spec)
    flat = compose_stack(stack)
    assert flat.n == stack.total_length
    got = s_rb_stack_exact(stack, CH06)
    want = s_rb_code(flat, CH06)
    assert got == pytest.approx(want, abs=1e-9)


def test_grouping_never_changes_values():
    for spec in ("repZ(3) x repX(3)", "repZ(2) x repX(2) x repZ(2)", "repZ(3) x 422"):
        stack = parse_stack_spec(spec)
        grouped = s_rb_stack_exact(stack, CH06)
        raw = s_rb_stack_exact(stack, CH06, group_tol=0.0, canonicalize=False)
        assert grouped == pytest.approx(raw, abs=1e-12)


def test_empty_stack_is_bare_channel_entropy():
    from cosetcap import channel_entropy
    assert s_rb_stack_exact(CodeStack(()), CH06) == pytest.approx(channel_entropy(CH06))


def test_compose_stack_names_and_validation():
    stack = parse_stack_spec("repZ(3) x repX(3)")
    flat = compose_stack(stack)
    assert flat.n == 9 and flat.k == 1
    assert flat.name == "repZ(3) x repX(3)"
    # composing the empty stack gives the trivial identity encoding
    assert compose_stack(CodeStack(())).n == 1


def test_stack_budget_error():
    stack = parse_stack_spec("repZ(5) x biased9")
    with pytest.raises(StackBudgetError):
        s_rb_stack_exact(stack, CH06, budget=100)


def test_mc_zero_noise():
    stack = parse_stack_spec("repZ(3) x repX(3)")
    est, se = s_rb_stack_mc(stack, PauliChannel(1, 0, 0, 0), samples=2000, seed=3)
    assert est == 0.0 and se == 0.0


def test_mc_needs_two_layers():
    with pytest.raises(ValueError):
        s_rb_stack_mc(parse_stack_spec("repZ(3)"), CH06, samples=100, seed=0)


def test_mc_agrees_with_exact_within_3_sigma():
    stack = parse_stack_spec("repZ(3) x repX(3)")
    exact = s_rb_stack_exact(stack, CH06)
    est, se = s_rb_stack_mc(stack, CH06, samples=100_000, seed=11)
    assert abs(est - exact) <= 3.0 * se


def test_mc_deterministic_and_chunk_invariant():
    stack = parse_stack_spec("repZ(3) x repX(3)")
    a = s_rb_stack_mc(stack, CH06, samples=30_000, seed=5)
    b = s_rb_stack_mc(stack, CH06, samples=30_000, seed=5)
    assert a == b
    c = s_rb_stack_mc(stack, CH06, samples=30_000, seed=6)
    assert c != a


def test_mc_error_shrinks_with_samples():
    stack = parse_stack_spec("repZ(3) x repX(3)")
    _, se1 = s_rb_stack_mc(stack, CH06, samples=20_000, seed=9)
    _, se2 = s_rb_stack_mc(stack, CH06, samples=80_000, seed=9)
    assert se2 == pytest.approx(se1 / 2.0, rel=0.25)


def test_three_layer_mc_runs():
    stack = parse_stack_spec("repX(3) x 5qubit x repZ(3)")
    exact = s_rb_stack_exact(stack, CH06)
    est, se = s_rb_stack_mc(stack, CH06, samples=60_000, seed=2)
    assert abs(est - exact) <= 4.0 * se
