import pytest
from hypothesis import HealthCheck, settings

from pastvar import Exponential, Power, Uniform, Weibull

settings.register_profile(
    "pastvar",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pastvar")

# uniform, exponential, power-2 and Weibull shape 2
ZOO = {
    "uniform": Uniform(1.0),
    "exponential": Exponential(1.0),
    "power2": Power(2.0),
    "weibull2": Weibull(2.0),
}


@pytest.fixture(params=sorted(ZOO))
def zoo_dist(request):
    return ZOO[request.param]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
