import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[n]
        statuses = {s for _, s, _ in checks}
        overall = "FAIL" if "FAIL" in statuses else ("PASS" if "PASS" in statuses else "SKIP")
        bad = [f"{name}: {detail}" for name, s, detail in checks if s == "FAIL"]
        note = "; ".join(bad) if bad else f"{len(checks)} check(s)"
        terminalreporter.write_line(f"criterion {n}: {overall} ({note})")
