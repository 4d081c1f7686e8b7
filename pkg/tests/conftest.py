import pytest

from acceptance_registry import all_results


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = all_results()
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results):
        clauses = results[name]
        ok = all(passed for _, passed, _ in clauses)
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}")
        for clause, passed, detail in clauses:
            mark = "ok " if passed else "FAIL"
            terminalreporter.write_line(f"    [{mark}] {clause}: {detail}")
