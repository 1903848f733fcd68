from pathlib import Path

import pytest

from fuzzy_gepsvm import dataio

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def _load_or_skip(filename, **options):
    path = DATA_DIR / filename
    if not path.exists():
        pytest.skip(f"{path} not present")
    return dataio.load_csv(path, **options)


@pytest.fixture(scope="session")
def breast_cancer():
    return _load_or_skip("breast-cancer-wisconsin.data", missing="drop", name="Breast Cancer")


@pytest.fixture(scope="session")
def ionosphere():
    return _load_or_skip("ionosphere.data", name="Ionosphere")


_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion.

    Usage: ``with acceptance(3, "text") as note: ...``; ``note(str)`` appends
    measured values to the line. An exception inside the block marks FAIL and
    propagates.
    """
    results = request.config.stash.setdefault(_RESULTS, {})

    class _Criterion:
        def __init__(self, number, title, fatal=True):
            self.number, self.title, self.fatal = number, title, fatal
            self.notes = []

        def __enter__(self):
            return self.notes.append

        def skip(self, reason):
            results[self.number] = f"criterion {self.number}: SKIPPED  {self.title}  ({reason})"
            pytest.skip(reason)

        def __exit__(self, exc_type, exc, tb):
            status = "PASS" if exc_type is None else "FAIL"
            if exc_type is not None and not self.fatal:
                status = "FAIL (report only)"
            detail = "; ".join(self.notes)
            line = f"criterion {self.number}: {status}  {self.title}" + (f"  [{detail}]" if detail else "")
            if exc_type is not None and exc is not None and not isinstance(exc, AssertionError):
                line += f"  ({type(exc).__name__}: {exc})"
            results[self.number] = line
            print(line)
            return not self.fatal

    return _Criterion


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
