import pytest

from silverforge.data import PairDataset, Sentence

from _helpers import labeled

ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: toolkit acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.get_closest_marker("acceptance"):
        name = item.get_closest_marker("acceptance").kwargs.get("name", item.name)
        ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture
def toy_sentences():
    texts = [
        "how does one cook broccoli",
        "what are the best ways to cook broccoli",
        "the cat sat on the mat",
        "a cat rested on a mat",
        "stock markets fell sharply today",
        "rain is expected tomorrow",
    ]
    return [Sentence(i, t) for i, t in enumerate(texts)]


@pytest.fixture
def toy_dataset(toy_sentences):
    s = toy_sentences
    train = (
        labeled(s[0], s[1], 1.0),
        labeled(s[2], s[3], 0.8),
        labeled(s[0], s[4], 0.05),
        labeled(s[1], s[5], 0.1),
    )
    dev = (labeled(s[2], s[5], 0.15),)
    test = (labeled(s[3], s[4], 0.05),)
    return PairDataset(task="regression", train=train, dev=dev, test=test)
