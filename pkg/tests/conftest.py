import sys
from pathlib import Path

# make the oracle helpers importable as a plain module
sys.path.insert(0, str(Path(__file__).resolve().parent))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES,
                       key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
