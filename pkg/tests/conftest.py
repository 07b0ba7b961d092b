import pytest

from toolnet.dataset import augment, generate_corpus
from toolnet.embeddings import hash_provider, toy_kb_provider
from toolnet.scenes import make_scene


@pytest.fixture(scope="session")
def corpus():
    """Teacher demonstrations for both domains (10 scenes x 8 goals x 8 styles)."""
    return generate_corpus()


@pytest.fixture(scope="session")
def augmented(corpus):
    return augment(corpus)


@pytest.fixture(scope="session")
def home():
    return make_scene("home", 0)


@pytest.fixture(scope="session")
def factory():
    return make_scene("factory", 0)


@pytest.fixture(scope="session")
def hashes():
    return hash_provider()


@pytest.fixture(scope="session")
def toy():
    return toy_kb_provider()
