import pytest

from ntexpander.morgenstern import build_instance, make_params


@pytest.fixture(scope="session")
def main_params():
    return make_params(3, htilde=[1, 1])


@pytest.fixture(scope="session")
def main_instance(main_params):
    return build_instance(main_params)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
