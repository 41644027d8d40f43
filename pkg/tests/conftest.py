import numpy as np
import pytest

from framepbo.frame import Catalogs, build_case
from framepbo.perf_constraints import default_tables
from framepbo.sections import load_catalogs


@pytest.fixture(scope="session")
def catalogs() -> Catalogs:
    return Catalogs(*load_catalogs())


@pytest.fixture(scope="session")
def tables():
    return default_tables()


@pytest.fixture(scope="session")
def story4():
    return build_case("story4")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


TINY_CONFIG = """\
[run]
levels = LS
seed = {seed}
threads = {threads}

[abc]
N_p = 10
I_max = 15
r = 1

[custom]
stories = 2
bays = 5.0
grouping = uniform

[bounds]
beam = 10:14
column = 20:24
"""


@pytest.fixture
def tiny_config_text():
    return TINY_CONFIG
