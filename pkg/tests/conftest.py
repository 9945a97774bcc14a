import numpy as np
import pytest

from attrigraph.datasets import make_toy_corpus
from attrigraph.model import forward, make_toy_model


@pytest.fixture(scope="session")
def toy_model():
    return make_toy_model(0)


@pytest.fixture(scope="session")
def toy_corpus():
    return make_toy_corpus(0, n_classes=5, n_per_class=20)


@pytest.fixture(scope="session")
def toy_traces(toy_model, toy_corpus):
    return [forward(toy_model, img) for img in toy_corpus.images]


@pytest.fixture(scope="session")
def toy_bundle_aggs(toy_model, toy_corpus, toy_traces):
    from attrigraph.activations import aggregate_activations, build_channel_max
    from attrigraph.influences import aggregate_influences

    a_per_layer = [
        aggregate_activations(
            build_channel_max(toy_traces, layer.name, toy_corpus.labels), 5
        )
        for layer in toy_model.layers
    ]
    i_per_layer = {1: aggregate_influences(toy_traces, toy_model, 1, toy_corpus.labels, k=5)}
    return a_per_layer, i_per_layer


def conv2d_reference(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Brute-force 2D cross-correlation with zero padding, written first and
    kept independent of the library implementation."""
    h, w = x.shape
    kh, kw = k.shape
    ph, pw = kh // 2, kw // 2
    out = np.zeros((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for dr in range(kh):
                for dc in range(kw):
                    rr = r + dr - ph
                    cc = c + dc - pw
                    if 0 <= rr < h and 0 <= cc < w:
                        acc += float(x[rr, cc]) * float(k[dr, dc])
            out[r, c] = acc
    return out
