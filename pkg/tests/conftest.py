import pytest

from cicsim.scenarios import builtin
from cicsim.simulator import run_scenario


@pytest.fixture(scope="session")
def fixture_run():
    """Memoized (fixture name, protocol) -> AnnotatedTrace."""
    cache = {}

    def get(name, protocol):
        key = (name, protocol)
        if key not in cache:
            scen, _ = builtin(name)
            cache[key] = run_scenario(scen, protocol)
        return cache[key]

    return get
