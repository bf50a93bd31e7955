import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from infogain.errors import ConditioningError, SchemaError
from infogain.joint import Dataset, JointDistribution, estimate_joint, marginal, posterior, support
from infogain.model import BasicSignal, SignalSchema, StateSpace

BINARY = SignalSchema(signals=(BasicSignal("x", ("0", "1")),))


def _dataset(rows, schema=BINARY, n_states=2):
    return Dataset(StateSpace.of([str(i) for i in range(n_states)]), schema, np.array(rows, dtype=np.int64))


def test_estimate_four_distinct_rows():
    data = _dataset([[0, 0], [0, 1], [1, 0], [1, 1]])
    joint = estimate_joint(data)
    assert np.allclose(joint.probs, 0.25)
    assert joint.keys.shape == (4, 2)


def test_estimate_two_identical_rows():
    joint = estimate_joint(_dataset([[1, 0], [1, 0]]))
    assert joint.keys.shape == (1, 2)
    assert joint.probs[0] == 1.0


def test_estimate_with_add_one_smoothing():
    joint = estimate_joint(_dataset([[0, 0], [1, 1]]), smoothing=1.0)
    table = marginal(joint, ["state", "x"])
    assert table[(0, 0)] == pytest.approx(2 / 6, abs=1e-15)
    assert table[(1, 1)] == pytest.approx(2 / 6, abs=1e-15)
    assert table[(0, 1)] == pytest.approx(1 / 6, abs=1e-15)
    assert table[(1, 0)] == pytest.approx(1 / 6, abs=1e-15)


def test_estimate_rejects_negative_smoothing():
    with pytest.raises(ValueError):
        estimate_joint(_dataset([[0, 0]]), smoothing=-0.5)


def test_dataset_must_be_nonempty():
    with pytest.raises(ValueError):
        _dataset(np.zeros((0, 2), dtype=np.int64))


def test_dataset_rejects_out_of_domain_indices():
    with pytest.raises(ValueError):
        _dataset([[0, 2]])


def test_marginal_over_nothing_is_total_mass(xor_joint):
    assert marginal(xor_joint, []) == {(): 1.0}


def test_marginal_over_one_xor_bit(xor_joint):
    assert marginal(xor_joint, ["s1"]) == {(0,): 0.5, (1,): 0.5}


def test_marginal_over_all_variables_is_the_joint(xor_joint):
    table = marginal(xor_joint, ["state", "s1", "s2"])
    expect = {tuple(int(v) for v in k): float(p) for k, p in zip(xor_joint.keys, xor_joint.probs)}
    assert table == expect


def test_marginal_unknown_variable(xor_joint):
    with pytest.raises(SchemaError):
        marginal(xor_joint, ["nope"])


def test_posterior_one_bit_uninformative(xor_joint):
    assert posterior(xor_joint, {"s1": 0}).tolist() == [0.5, 0.5]


def test_posterior_both_bits_decisive(xor_joint):
    assert posterior(xor_joint, {"s1": 0, "s2": 1}).tolist() == [0.0, 1.0]


def test_posterior_empty_assignment_is_prior(xor_joint):
    assert posterior(xor_joint, {}).tolist() == [0.5, 0.5]


def test_posterior_zero_probability_assignment():
    joint = estimate_joint(_dataset([[0, 0]]))
    with pytest.raises(ConditioningError):
        posterior(joint, {"x": 1})


def test_support_order_and_mass(xor_joint):
    entries = list(support(xor_joint, ["s1", "s2"]))
    assert [real for real, _ in entries] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(p == 0.25 for _, p in entries)


def test_support_empty_vars(xor_joint):
    assert list(support(xor_joint, [])) == [((), 1.0)]


def test_support_single_point():
    joint = estimate_joint(_dataset([[1, 0], [1, 0]]))
    assert list(support(joint, ["state", "x"])) == [((1, 0), 1.0)]


def test_huge_sparse_spaces_group_small_subsets_but_refuse_full_encoding():
    from infogain.errors import ProductSpaceError
    from infogain.model import DecisionColumn

    schema = SignalSchema(
        signals=(),
        decisions=tuple(
            DecisionColumn(f"d{i}", "other", tuple(str(v) for v in range(101))) for i in range(10)
        ),
    )
    joint = JointDistribution(
        states=StateSpace.of(("0", "1")),
        schema=schema,
        keys=np.zeros((1, 11), dtype=np.int64),
        probs=np.array([1.0]),
    )
    assert marginal(joint, ["d0"]) == {(0,): 1.0}
    with pytest.raises(ProductSpaceError):
        marginal(joint, [f"d{i}" for i in range(10)])


def test_mass_invariant_rejects_bad_total():
    with pytest.raises(ValueError):
        JointDistribution(
            states=StateSpace.of(("0", "1")),
            schema=BINARY,
            keys=np.array([[0, 0]]),
            probs=np.array([0.5]),
        )


def _all_var_subsets(joint):
    names = joint.variables
    for r in range(len(names) + 1):
        yield from itertools.combinations(names, r)


@pytest.mark.parametrize("smoothing", [0.0, 0.7])
def test_support_sums_to_one_for_every_subset(smoothing):
    data = _dataset([[0, 0], [0, 1], [1, 1], [1, 1], [0, 0]])
    joint = estimate_joint(data, smoothing)
    for vars_ in _all_var_subsets(joint):
        total = math.fsum(p for _, p in support(joint, vars_))
        assert abs(total - 1.0) <= 1e-12


def test_posterior_over_support_reconstructs_marginal(xor_joint):
    vars_ = ["s1", "s2"]
    rebuilt = {}
    for real, p in support(xor_joint, vars_):
        post = posterior(xor_joint, dict(zip(vars_, real)))
        for w, q in enumerate(post):
            if q > 0:
                rebuilt[(w,) + real] = p * q
    table = {k: v for k, v in marginal(xor_joint, ["state"] + vars_).items() if v > 0}
    assert set(rebuilt) == set(table)
    for key in table:
        assert rebuilt[key] == pytest.approx(table[key], abs=1e-12)


@st.composite
def small_datasets(draw):
    n_signals = draw(st.integers(1, 3))
    sizes = [draw(st.integers(2, 3)) for _ in range(n_signals)]
    schema = SignalSchema(
        signals=tuple(BasicSignal(f"x{i}", tuple(str(v) for v in range(k))) for i, k in enumerate(sizes))
    )
    n_rows = draw(st.integers(1, 30))
    rows = [
        [draw(st.integers(0, 1))] + [draw(st.integers(0, k - 1)) for k in sizes]
        for _ in range(n_rows)
    ]
    return Dataset(StateSpace.of(("0", "1")), schema, np.array(rows, dtype=np.int64))


@given(small_datasets())
def test_plugin_marginal_matches_brute_force_counts(data):
    joint = estimate_joint(data)
    for col, name in enumerate(joint.variables):
        counts = np.bincount(data.rows[:, col], minlength=joint.domain_sizes[col])
        expected = counts / data.n_rows
        table = marginal(joint, [name])
        for v, freq in enumerate(expected):
            assert table.get((v,), 0.0) == pytest.approx(freq, abs=1e-12)


@given(small_datasets(), st.floats(0.0, 2.0))
def test_total_mass_is_one(data, smoothing):
    joint = estimate_joint(data, smoothing)
    explicit = math.fsum(joint.probs)
    total = explicit + joint.background * (joint.n_cells - len(joint.probs))
    assert abs(total - 1.0) <= 1e-12
