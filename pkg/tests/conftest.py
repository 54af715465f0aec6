import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    from lfembed import kernels

    terminalreporter.section("acceptance criteria")
    terminalreporter.write_line(f"kernel backend: {kernels.BACKEND}")
    for number in sorted(results):
        terminalreporter.write_line(results[number][1])
    missing = [n for n in range(1, 10) if n not in results]
    if missing:
        terminalreporter.write_line(f"not run: criteria {missing}")
