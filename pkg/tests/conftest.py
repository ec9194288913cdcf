import numpy as np
import pytest

from spiralvis import SequenceSpec


@pytest.fixture(scope="session")
def golden():
    return SequenceSpec("golden-angle")


@pytest.fixture(scope="session")
def ladder():
    return SequenceSpec("rational-ladder")


@pytest.fixture(scope="session")
def constant_seq():
    return SequenceSpec("constant", d=1, v=np.array([1.0, 0.0]))


@pytest.fixture(scope="session")
def fib_sphere():
    return SequenceSpec("fibonacci-sphere", d=2)
