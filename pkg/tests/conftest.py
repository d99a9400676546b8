import pytest

from hanfuse.tables import Tables


@pytest.fixture(scope="session")
def tables():
    return Tables.bundled()


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
