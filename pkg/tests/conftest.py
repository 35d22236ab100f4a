_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "acceptance":
            idx, title, ok, detail = value
            _ACCEPTANCE[idx] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for idx in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[idx]
        terminalreporter.write_line(f"criterion {idx} ({title}): {'PASS' if ok else 'FAIL'} - {detail}")
