import numpy as np
import pytest

import sparsepr as sp


def dense_truncated_y(A, y, scale, l, u):
    """Dense assembly oracle for the band-truncated surrogate matrix.

    Builds (1/m) sum_i y_i^2 a_i a_i^T 1{l*scale <= y_i <= u*scale}
    entry by entry; ``scale`` is nu for the empirical matrix or the exact
    signal norm for the idealized one.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    out = np.zeros((n, n))
    for i in range(m):
        if l * scale <= y[i] <= u * scale:
            out += y[i] ** 2 * np.outer(A[i], A[i])
    return out / m


@pytest.fixture
def dense_ybar():
    return dense_truncated_y


@pytest.fixture
def small_instance():
    """One seeded small problem where both support rules recover the true
    support exactly (needed by the exact-expectation seam tests)."""
    rng = sp.trial_rng(2057)
    x = sp.sample_signal(40, 4, rng)
    e = sp.measure(x, 800, rng)
    return x, e
