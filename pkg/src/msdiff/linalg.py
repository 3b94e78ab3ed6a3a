"""Small dense linear-algebra helpers used across modules."""
from functools import lru_cache

import numpy as np
import scipy.linalg


@lru_cache(maxsize=32)
def simplex_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the zero-sum subspace {v in R^n : sum(v) = 0}.

    Returns an n x (n-1) matrix P with P.T @ P = I and ones(n) @ P = 0.
    Deterministic for a given n.
    """
    P = scipy.linalg.null_space(np.ones((1, n)))
    P.setflags(write=False)
    return P


def project_zero_sum(v: np.ndarray) -> np.ndarray:
    """Remove the mean from the last axis, enforcing an exact zero sum."""
    v = np.asarray(v, dtype=float)
    return v - v.mean(axis=-1, keepdims=True)
