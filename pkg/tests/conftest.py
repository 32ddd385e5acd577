import pytest

from floerd.knots import doubled_trefoil_model, lp_complex, torus_staircase


@pytest.fixture(scope="session")
def t45():
    return torus_staircase(5)


@pytest.fixture(scope="session")
def dtref():
    return doubled_trefoil_model()


@pytest.fixture(scope="session")
def l3():
    return lp_complex(3)


@pytest.fixture(scope="session")
def l3_report(l3):
    from floerd.obstruct import obstruct_complex

    return obstruct_complex(l3, 3, knot="L_3")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
