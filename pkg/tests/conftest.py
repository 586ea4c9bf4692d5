import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 9):
        if n not in results:
            terminalreporter.write_line(f"criterion {n}: NOT RUN")
            continue
        ok, failed = results[n]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += " - " + "; ".join(failed)
        terminalreporter.write_line(line)
