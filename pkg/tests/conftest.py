import time
from collections import defaultdict
from importlib import resources
from pathlib import Path

import pytest

from pgen_bt.corpus import load_mono, load_parallel

DATA = Path(str(resources.files("pgen_bt") / "data"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion this test checks")


_criteria = defaultdict(lambda: {"title": "", "outcomes": [], "seconds": 0.0})


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    num, title = crit
    entry = _criteria[num]
    entry["title"] = title
    entry["outcomes"].append(report.outcome)
    entry["seconds"] += report.duration


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        ok = all(o == "passed" for o in e["outcomes"])
        terminalreporter.write_line(
            f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {e['title']}  "
            f"({len(e['outcomes'])} checks, {e['seconds']:.2f}s)"
        )


@pytest.fixture(scope="session")
def toy_authentic():
    return load_parallel(DATA / "toy_authentic.tsv", name="authentic")


@pytest.fixture(scope="session")
def toy_text(toy_authentic):
    return toy_authentic.texts("authentic").relabel(name="authentic")


@pytest.fixture(scope="session")
def toy_test():
    return load_parallel(DATA / "toy_test.tsv", name="test")


@pytest.fixture(scope="session")
def toy_general():
    return load_mono(DATA / "toy_general.txt", name="general", domain_label="general")


@pytest.fixture(scope="session")
def toy_pgen(toy_text):
    """Generated corpus (5x authentic) from the builtin backend, k = 20."""
    from pgen_bt.pgen import PromptConfig, generate_corpus, train_builtin_backend

    cfg = PromptConfig(k=20, target_size=5 * len(toy_text), seed=13)
    backend, _, _ = train_builtin_backend(toy_text, cfg)
    return generate_corpus(backend, toy_text, toy_text, cfg).corpus


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0
