ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[n]
        line = f"Criterion {n}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f"  ({note})" if note else ""))
