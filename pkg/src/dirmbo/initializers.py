"""Initial field configurations: random tessellations, a triply periodic
two-phase interface, and label-file imports.

All initializers return normalized indicator FieldSets: each component is the
characteristic function of its region scaled to unit quadrature L2 norm.
Randomness comes from numpy's seeded PCG64 generator, so identical seeds give
bit-identical output on every platform.
"""

import numpy as np

from .domains import FieldSet, Labeling, SphereDomain, TorusDomain, load_labels, weighted_norm_sq
from .solver import EmptyComponentError

__all__ = [
    "InitializationError",
    "indicator_fields",
    "voronoi_labels",
    "random_voronoi",
    "schwarz_p_init",
    "from_labels",
]

MAX_SEED_ATTEMPTS = 50


class InitializationError(RuntimeError):
    pass


def indicator_fields(labeling):
    """Normalized indicator functions of a labeling's regions."""
    dom = labeling.domain
    k = labeling.k
    values = np.zeros((k,) + dom.shape)
    for i in range(k):
        values[i] = labeling.labels == i
    norms_sq = weighted_norm_sq(dom, values)
    for i, nsq in enumerate(norms_sq):
        if nsq == 0.0:
            raise EmptyComponentError(i)
    values /= np.sqrt(norms_sq).reshape((k,) + (1,) * len(dom.shape))
    return FieldSet(dom, values)


def _torus_voronoi_labels(domain, seeds):
    """Nearest seed per grid point under the per-axis wraparound metric.

    Ties go to the lowest seed index, mirroring the solver's tie rule.
    """
    coords = domain.axis_coords()
    L = domain.length
    best = np.full(domain.shape, np.inf)
    labels = np.zeros(domain.shape, dtype=np.uint8)
    for i, seed in enumerate(seeds):
        dist_sq = np.zeros(domain.shape)
        for ax in range(domain.d):
            delta = np.abs(coords - seed[ax])
            wrapped = np.minimum(delta, L - delta)
            shape = [1] * domain.d
            shape[ax] = domain.n
            dist_sq = dist_sq + wrapped.reshape(shape) ** 2
        closer = dist_sq < best
        labels[closer] = i
        np.minimum(best, dist_sq, out=best)
    return labels


def _sphere_voronoi_labels(domain, seeds):
    """Nearest seed in geodesic distance = largest dot product (ties: lowest index)."""
    vecs = domain.grid_vectors()
    dots = np.einsum("kc,cij->kij", seeds, vecs)
    return dots.argmax(axis=0).astype(np.uint8)


def voronoi_labels(domain, seeds):
    seeds = np.asarray(seeds, dtype=np.float64)
    if isinstance(domain, TorusDomain):
        return _torus_voronoi_labels(domain, seeds)
    return _sphere_voronoi_labels(domain, seeds)


def _sample_seeds(domain, k, rng):
    """Seed points, resampled until no two coincide at grid resolution."""
    for _ in range(MAX_SEED_ATTEMPTS):
        if isinstance(domain, TorusDomain):
            seeds = rng.uniform(-domain.length / 2, domain.length / 2, size=(k, domain.d))
            h = domain.length / domain.n
            cells = np.floor((seeds + domain.length / 2) / h).astype(np.int64)
        else:
            seeds = rng.normal(size=(k, 3))
            seeds /= np.linalg.norm(seeds, axis=1, keepdims=True)
            # grid-resolution collision test via nearest (theta, phi) node
            ti = np.searchsorted(domain.theta_nodes, np.arccos(np.clip(seeds[:, 2], -1, 1)))
            ti = np.clip(ti, 0, domain.n_theta - 1)
            phi = np.mod(np.arctan2(seeds[:, 0], seeds[:, 1]), 2 * np.pi)
            pi_ = np.rint(phi / (2 * np.pi / domain.n_phi)).astype(np.int64) % domain.n_phi
            cells = np.column_stack([ti, pi_])
        if len({tuple(row) for row in cells}) == k:
            return seeds
    raise InitializationError(f"could not place {k} distinct seeds in {MAX_SEED_ATTEMPTS} attempts")


def random_voronoi(domain, k, seed):
    """Normalized indicators of the Voronoi tessellation of k random seeds.

    Torus seeds are uniform per coordinate; sphere seeds are normalized
    Gaussian vectors (uniform on the sphere).  Seed sets leaving any cell
    without grid points are redrawn a bounded number of times.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > domain.npoints:
        raise ValueError(f"k={k} exceeds grid point count {domain.npoints}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_SEED_ATTEMPTS):
        seeds = _sample_seeds(domain, k, rng)
        labels = voronoi_labels(domain, seeds)
        counts = np.bincount(labels.reshape(-1), minlength=k)
        if (counts > 0).all():
            return indicator_fields(Labeling(domain, labels, k))
    raise InitializationError(f"a Voronoi cell stayed empty after {MAX_SEED_ATTEMPTS} seed redraws")


def schwarz_p_init(domain):
    """Two-phase split of a 3d torus along cos(2pi x/L)+cos(2pi y/L)+cos(2pi z/L) = 0.

    Component 0 is the normalized indicator of the positive side, component 1
    its complement.  The frequency 2pi/L makes the interface periodic on the
    box for any side length.
    """
    if not isinstance(domain, TorusDomain) or domain.d != 3:
        raise ValueError("this initializer needs a 3d torus domain")
    c = np.cos(2 * np.pi * domain.axis_coords() / domain.length)
    level = c[:, None, None] + c[None, :, None] + c[None, None, :]
    labels = np.where(level > 0, 0, 1).astype(np.uint8)
    return indicator_fields(Labeling(domain, labels, 2))


def from_labels(path, k=None):
    """Normalized indicators of a stored labeling (see domains.save_labels)."""
    labeling = load_labels(path)
    if k is not None and k != labeling.k:
        raise ValueError(f"label file has k={labeling.k}, expected {k}")
    return indicator_fields(labeling)
