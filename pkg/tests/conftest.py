import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)


def match_spectra(e1, e2):
    """Greedy bipartite matching distance between two (complex) spectra."""
    e2 = list(np.asarray(e2))
    worst = 0.0
    for w in np.asarray(e1):
        j = int(np.argmin([abs(w - v) for v in e2]))
        worst = max(worst, abs(w - e2[j]))
        e2.pop(j)
    return worst
