import pytest
from hypothesis import HealthCheck, settings

from levydiv import BrownianDrift, CramerLundbergExp, HyperExpJumpDiffusion, StableSpectralNeg

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture]
)
settings.load_profile("default")

DESK = {
    "brownian": BrownianDrift(1.0, 1.0),
    "cl": CramerLundbergExp(2.0, 1.0, 1.0),
    "stable": StableSpectralNeg(1.5, 1.0),
    "hyperexp": HyperExpJumpDiffusion(1.0, 0.5, 1.0, (0.4, 0.6), (1.0, 3.0)),
}

# filled by tests/test_acceptance.py, printed once at the end of the session
ACCEPTANCE_LINES = {}


@pytest.fixture(params=sorted(DESK))
def desk_model(request):
    return DESK[request.param]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
