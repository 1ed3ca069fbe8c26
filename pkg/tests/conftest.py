import pytest

from arborlab.heightcount import build_count_table


@pytest.fixture(scope="session")
def exact_table():
    # shared by counting, sampler, and ball-mass tests; ~0.6 s to build
    return build_count_table(256, mode="exact")


@pytest.fixture(scope="session")
def scaled_table():
    return build_count_table(512, mode="scaled", materialize_cap=512)
