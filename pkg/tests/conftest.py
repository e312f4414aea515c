import pytest

from chute.instances import MomipInstance, WeightVector
from chute.scalarize import ChebyshevParams, ReferencePoint


@pytest.fixture
def toy():
    return MomipInstance("TOY", [[4, 1], [1, 4]], [[1, 1]], [1])


@pytest.fixture
def toy_ystar():
    return ReferencePoint((5.0, 5.0), ("exact-plus-epsilon", "exact-plus-epsilon"))


@pytest.fixture
def toy_params(toy_ystar):
    return ChebyshevParams(WeightVector((0.5, 0.5)), toy_ystar, 0.001)
