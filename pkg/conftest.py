# conftest.py
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
SCRIPTS = ROOT / "scripts"
if str(SCRIPTS) not in sys.path:
    sys.path.insert(0, str(SCRIPTS))


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    """Keine Benutzer-ENV in Tests; Logs nur ab WARN."""
    for key in ("UDW_CONFIG", "UDW_OUTPUT_DIR", "UDW_THREADS"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("UDW_LOG_LEVEL", "WARN")
