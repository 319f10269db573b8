import pytest

from memscrub import ScrubConfig


@pytest.fixture
def table1_base():
    """1 MB of 32-bit words at lambda=1e-5, T=10 s, mu=0.1/s."""
    return ScrubConfig(
        lambda_per_bit_day=1e-5,
        data_bits=32,
        check_bits=7,
        memory_words=262144,
        scrub_period_seconds=10.0,
        scrub_rate_per_second=0.1,
    )


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, ok, detail)``."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
