import json

import numpy as np
import pytest
from hypothesis import strategies as st

from daugavet.models.enums import ScalarField
from daugavet.services.space_service import SpaceService

J = np.array([[0.0, -1.0], [1.0, 0.0]])


@pytest.fixture
def l1_2():
    return SpaceService.lp(1, 2)


@pytest.fixture
def l1_3():
    return SpaceService.lp(1, 3)


@pytest.fixture
def linf_2():
    return SpaceService.lp("inf", 2)


@pytest.fixture
def l2_2():
    return SpaceService.lp(2, 2)


@pytest.fixture
def cl2_2():
    return SpaceService.lp(2, 2, ScalarField.COMPLEX)


@pytest.fixture
def hexagon():
    return SpaceService.polyhedral([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def write_json(tmp_path):
    """Write a document to tmp_path/<name> and return the path."""

    def write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path

    return write


finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def vectors(dim: int):
    return st.lists(finite, min_size=dim, max_size=dim).map(np.array)
