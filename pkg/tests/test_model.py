from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from infogain.model import (
    BasicSignal,
    DecisionColumn,
    DecisionProblem,
    DecisionSpace,
    PayoffFunction,
    SignalSchema,
    StateSpace,
    brier_problem,
    payoff,
    validate_problem,
    validate_schema,
)

UMBRELLA = DecisionProblem(
    states=StateSpace.of(("no_rain", "rain")),
    decisions=DecisionSpace.categorical(("no_umbrella", "take_umbrella")),
    payoff=PayoffFunction.from_matrix([[0.0, -100.0], [-50.0, 0.0]]),
)


def test_brier_payoff_certainty():
    problem = brier_problem()
    assert payoff(problem, 100, 1) == 1.0  # d = 1.00 against state 1


def test_brier_payoff_midpoint():
    problem = brier_problem()
    assert payoff(problem, 50, 0) == 0.75  # d = 0.5 against state 0


def test_umbrella_matrix_entry():
    assert payoff(UMBRELLA, 0, 1) == -100.0


@pytest.mark.parametrize("d,omega", [(-1, 0), (101, 0), (0, -1), (0, 2)])
def test_payoff_index_errors(d, omega):
    with pytest.raises(IndexError):
        payoff(brier_problem(), d, omega)


def test_payoff_is_pure():
    problem = brier_problem()
    values = [payoff(problem, 37, 1) for _ in range(3)]
    assert values[0] == values[1] == values[2]


def test_brier_payoff_within_unit_interval():
    problem = brier_problem()
    for d in range(problem.decisions.size):
        for w in range(2):
            assert 0.0 <= payoff(problem, d, w) <= 1.0


def test_validate_brier_needs_binary_state():
    problem = DecisionProblem(
        states=StateSpace.of(("a", "b", "c")),
        decisions=DecisionSpace.percent_grid(),
        payoff=PayoffFunction.brier(),
    )
    codes = [d.code for d in validate_problem(problem)]
    assert "brier-requires-binary-state" in codes


def test_validate_wellformed_matrix_is_clean():
    assert validate_problem(UMBRELLA) == []


def test_validate_grid_not_strictly_increasing():
    problem = DecisionProblem(
        states=StateSpace.of(("0", "1")),
        decisions=DecisionSpace.numeric([0, 0, 1]),
        payoff=PayoffFunction.brier(),
    )
    codes = [d.code for d in validate_problem(problem)]
    assert "grid-not-strictly-increasing" in codes


def test_validate_matrix_dimension_mismatch():
    problem = DecisionProblem(
        states=StateSpace.of(("0", "1")),
        decisions=DecisionSpace.categorical(("x", "y")),
        payoff=PayoffFunction.from_matrix([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0]]),
    )
    codes = [d.code for d in validate_problem(problem)]
    assert "matrix-dimension-mismatch" in codes


def test_validate_grid_out_of_unit_range():
    problem = DecisionProblem(
        states=StateSpace.of(("0", "1")),
        decisions=DecisionSpace.numeric([0, Fraction(3, 2)]),
        payoff=PayoffFunction.brier(),
    )
    codes = [d.code for d in validate_problem(problem)]
    assert "grid-out-of-unit-range" in codes


def test_constant_signal_flagged_as_warning():
    schema = SignalSchema(signals=(BasicSignal("fixed", ("only",)), BasicSignal("x", ("0", "1"))))
    diags = validate_schema(schema)
    assert [d.code for d in diags] == ["signal-domain-constant"]
    assert diags[0].severity == "warning"


def test_duplicate_variable_name_is_error():
    schema = SignalSchema(
        signals=(BasicSignal("x", ("0", "1")),),
        decisions=(DecisionColumn("x", "human", ("0", "1")),),
    )
    assert "variable-name-duplicate" in [d.code for d in validate_schema(schema)]


def test_unknown_role_is_error():
    schema = SignalSchema(decisions=(DecisionColumn("d", "robot", ("0", "1")),), signals=())
    assert "decision-role-unknown" in [d.code for d in validate_schema(schema)]


def test_percent_grid_is_exact_hundredths():
    grid = DecisionSpace.percent_grid()
    assert grid.size == 101
    assert grid.points[37] == Fraction(37, 100)
    assert grid.is_numeric


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_nearest_index_is_true_nearest(value):
    grid = DecisionSpace.percent_grid()
    idx = grid.nearest_index(value)
    dists = np.abs(grid.grid_floats - value)
    assert dists[idx] == dists.min()


def test_nearest_index_ties_resolve_low():
    grid = DecisionSpace.numeric([0, Fraction(1, 2), 1])
    assert grid.nearest_index(0.25) == 0
    assert grid.nearest_index(0.75) == 1
