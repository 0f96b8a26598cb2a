import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CRITERIA: dict = {}      # number -> (name, passed, seconds, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        name, ok, secs, detail = CRITERIA[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {name}  ({secs:.2f} s)"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
