import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of a run."""
    results = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            match = re.search(r"test_acceptance\.py::test_criterion_(\d+)", nodeid)
            if match is None:
                continue
            num = int(match.group(1))
            results[num] = results.get(num, True) and status == "passed"
    if not results:
        return
    terminalreporter.write_line("")
    for num in sorted(results):
        terminalreporter.write_line(
            f"ACCEPTANCE {num}: {'PASS' if results[num] else 'FAIL'}"
        )
