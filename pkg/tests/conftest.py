import pytest

from primecusps.arith import build_context


@pytest.fixture(scope="session")
def ctx():
    # one shared table; large enough for every test and the acceptance gate
    return build_context(120_000)
