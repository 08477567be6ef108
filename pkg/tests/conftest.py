import importlib.util
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def load_script(name: str):
    path = ROOT / "scripts" / f"{name}.py"
    found = importlib.util.spec_from_file_location(f"scripts_{name}", path)
    module = importlib.util.module_from_spec(found)
    found.loader.exec_module(module)
    return module


class Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.details: list[str] = []
        self.ok = True

    def check(self, cond, detail: str) -> None:
        cond = bool(cond)
        self.details.append(("ok " if cond else "FAIL ") + detail)
        self.ok = self.ok and cond

    def done(self) -> None:
        failures = [d for d in self.details if d.startswith("FAIL")]
        assert not failures, "; ".join(failures)


@pytest.fixture
def criterion(request):
    number, title = request.node.get_closest_marker("criterion").args
    rec = Criterion(number, title)
    yield rec
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed and rec.ok
    detail = "; ".join(rec.details) or "no checks ran"
    ACCEPTANCE[number] = (title, ok, detail)
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.rep_call = report


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running check")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title} -- {detail}")
