import pytest
from hypothesis import settings

import database

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("repro")


@pytest.fixture
def ledger(tmp_path):
    """Run ledger on a throwaway SQLite file."""
    engine = database.configure_engine(f"sqlite:///{tmp_path / 'runs.db'}")
    database.init_db()
    yield engine
    engine.dispose()
    database.engine = None


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("LC_OUTPUT_DIR", str(tmp_path / "results"))
    return tmp_path / "results"
