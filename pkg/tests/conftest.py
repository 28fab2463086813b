import pytest

from spkid.synth import synth_corpus


@pytest.fixture(scope="session")
def corpus12():
    """12 speakers x 8 utterances; shared by the GCI and acceptance suites."""
    return synth_corpus(12, 8, seed=7)
