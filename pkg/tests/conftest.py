import os

import numpy as np
import pytest

from dirmbo import FieldSet, Labeling, TorusDomain
from dirmbo.initializers import indicator_fields

EXTENDED = os.environ.get("DIRMBO_EXTENDED", "") == "1"

extended = pytest.mark.skipif(not EXTENDED, reason="extended run; set DIRMBO_EXTENDED=1")


def two_slab_labeling(n=32, length=2.0):
    """k=2 torus labeling split evenly between the column halves.

    Both boundaries fall between grid columns, so the two cells are exact
    translates of each other.
    """
    dom = TorusDomain(2, n, length)
    labels = np.zeros((n, n), dtype=np.uint8)
    labels[n // 2 :, :] = 1
    return Labeling(dom, labels, 2)


def two_slab_fields(n=32, length=2.0):
    return indicator_fields(two_slab_labeling(n, length))


def quadrant_labeling(n=64, length=2.0):
    """k=4 torus labeling cut into the four axis-aligned quadrants."""
    dom = TorusDomain(2, n, length)
    labels = np.zeros((n, n), dtype=np.uint8)
    h = n // 2
    labels[:h, h:] = 1
    labels[h:, :h] = 2
    labels[h:, h:] = 3
    return Labeling(dom, labels, 4)


def random_fieldset(domain, k, seed, nonneg=True):
    rng = np.random.default_rng(seed)
    vals = rng.random((k,) + domain.shape) if nonneg else rng.normal(size=(k,) + domain.shape)
    return FieldSet(domain, vals)
