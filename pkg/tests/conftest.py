import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

# criterion number -> (passed or None for skipped, detail)
ACCEPTANCE: dict[int, tuple] = {}


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def reference_csv():
    """Path to the real 48-feature phishing CSV, when provided.

    Set PHISHLENS_REFERENCE_CSV to a local copy of the Mendeley
    Phishing_Legitimate_full.csv file.
    """
    path = os.environ.get("PHISHLENS_REFERENCE_CSV")
    if not path or not Path(path).is_file():
        return None
    return Path(path)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"criterion {num}: {status}  {detail}")
