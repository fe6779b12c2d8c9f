import pytest

from loglab.grid import build_grid

# criterion number -> (title, [(sub-check, ok, detail)])
ACCEPTANCE = {}


def record(number, title, check, ok, detail=""):
    """Register one sub-check of an acceptance criterion and echo it."""
    ACCEPTANCE.setdefault(number, (title, []))[1].append((check, bool(ok), detail))
    print(f"criterion {number} [{check}]: {'PASS' if ok else 'FAIL'} {detail}")
    return bool(ok)


def acceptance_lines():
    lines = []
    for number in sorted(ACCEPTANCE):
        title, subs = ACCEPTANCE[number]
        status = "PASS" if all(ok for _, ok, _ in subs) else "FAIL"
        parts = "; ".join(f"{name} {'ok' if ok else 'FAILED'} ({detail})" for name, ok, detail in subs)
        lines.append(f"{status}  criterion {number}: {title}: {parts}")
    return lines


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines():
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid64():
    return build_grid(-1.0, 1.0, 64)


@pytest.fixture(scope="session")
def grid256():
    return build_grid(-1.0, 1.0, 256)


@pytest.fixture(scope="session")
def grid512():
    return build_grid(-1.0, 1.0, 512)
