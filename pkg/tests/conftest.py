import hypothesis
import numpy as np
import pytest

from infogain.synth import make_xor_joint, xor_problem

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def xor_joint():
    return make_xor_joint()


@pytest.fixture(scope="session")
def brier():
    return xor_problem()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
