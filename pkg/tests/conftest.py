import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        word = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"criterion {n:2d}: {word}  {detail}")
