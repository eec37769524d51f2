from importlib import resources

import pytest

from singability.lexstats import load_stopwords
from singability.phonetics import load_lexicon

DATA = resources.files("singability.data")


@pytest.fixture(scope="session")
def lex():
    return load_lexicon(str(DATA / "cmudict_trimmed.dict"))


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture(scope="session")
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
