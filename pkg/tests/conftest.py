import pytest

from toprot import _backend, _pykernels, quantum_spectrum, specfun
from toprot.classical import get_molecule

try:
    from toprot import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

BACKENDS = {"python": _pykernels, "cython": _ckernels}


@pytest.fixture(params=["cython", "python"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    mod = BACKENDS[request.param]
    if mod is None:
        pytest.skip("compiled kernels not built")
    for target in (_backend, specfun, quantum_spectrum):
        monkeypatch.setattr(target, "kernels", mod)
    return mod


@pytest.fixture
def water():
    return get_molecule("water")


@pytest.fixture(params=["water", "ethylene", "s4"])
def molecule(request):
    return get_molecule(request.param)


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance verdicts collected by tests/test_acceptance.py."""
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
