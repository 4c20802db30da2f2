"""Shared test plumbing: the acceptance report printed at the end of the run."""

ACCEPTANCE_LINES: list[str] = []


def report(criterion: int, ok: bool, detail: str) -> bool:
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
