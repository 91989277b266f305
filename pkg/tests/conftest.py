import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    _LINES.append(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
