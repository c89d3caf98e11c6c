from __future__ import annotations

import pytest

from typofix.corpus import ErrorMix, generate_corpus


@pytest.fixture(scope="session")
def corpus_records():
    """The 50-scene seeded corpus used across acceptance-style tests."""
    return generate_corpus(50, seed=7, mix=ErrorMix(0.5, 0.3, 0.5))
