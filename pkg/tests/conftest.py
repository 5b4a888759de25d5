import math

import numpy as np
import pytest

from outagelab.mutual_info import EngineConfig


@pytest.fixture(scope="session")
def cfg():
    return EngineConfig()


@pytest.fixture(scope="session")
def fast_cfg():
    return EngineConfig(gh_order=16)


def db(x):
    return 10.0 ** (x / 10.0)


@pytest.fixture(scope="session")
def gamma_8db():
    return db(8.0)
