import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

from make_fixture_corpus import build_fixture  # noqa: E402


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory) -> Path:
    """The synthetic demo corpus, built once per session."""
    return build_fixture(tmp_path_factory.mktemp("corpus"))
