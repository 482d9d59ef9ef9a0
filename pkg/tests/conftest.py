import numpy as np
import pytest

from jointemb.corpus import Corpus, Document, generate_synthetic_corpus


def make_doc(id_, caption, tags=(), features=None, labels=None, split="train"):
    return Document(
        id=id_,
        caption=caption,
        tags=frozenset(tags),
        features=tuple(features) if features is not None else None,
        labels=frozenset(labels) if labels is not None else None,
        split=split,
    )


@pytest.fixture
def tiny_corpus():
    """Six documents, two concepts, features on everything."""
    docs = [
        make_doc("t0", "sun beach sand", ["shore"], [1, 0, 0, 0], ["shore"]),
        make_doc("t1", "beach sun waves", ["shore"], [1, 0.1, 0, 0], ["shore"]),
        make_doc("t2", "snow ski slope", ["alpine"], [0, 0, 1, 0], ["alpine"]),
        make_doc("t3", "ski snow lift", ["alpine"], [0, 0, 1, 0.1], ["alpine"]),
        make_doc("v0", "sun sand", ["shore"], [1, 0, 0, 0], ["shore"], split="val"),
        make_doc("x0", "snow slope", ["alpine"], [0, 0, 0.9, 0], ["alpine"], split="test"),
        make_doc("x1", "beach waves", ["shore"], [0.9, 0, 0, 0], ["shore"], split="test"),
    ]
    return Corpus(docs)


@pytest.fixture(scope="session")
def synth_corpus():
    # small but big enough for the trainers to separate concepts
    return generate_synthetic_corpus(
        n_concepts=4, words_per_concept=12, n_docs=600,
        feature_dim=8, noise_sigma=0.05, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
