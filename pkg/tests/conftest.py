def pytest_terminal_summary(terminalreporter):
    from test_acceptance import SUMMARY
    if not SUMMARY:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(SUMMARY, key=lambda r: r.number):
        terminalreporter.write_line(r.summary())
        for note in r.notes:
            terminalreporter.write_line(f"    note: {note}")
