"""Discretized computational domains, field containers, and labelings.

Grid conventions
----------------
Torus: the periodic box [-L/2, L/2)^d sampled at n node-centered points per
axis, x_i = -L/2 + i*L/n.  Scalar fields are ndarrays of shape (n,)*d in
C (row-major) order over axes (x1, ..., xd); flattening with ``reshape(-1)``
gives the canonical linearization used by all binary exports.

Sphere: the unit sphere parameterized by inclination theta in (0, pi) and
azimuth phi in [0, 2*pi).  Inclination nodes are Gauss-Legendre in cos(theta)
(ascending theta), azimuth is uniform with n_phi points.  Fields are ndarrays
of shape (n_theta, n_phi), theta-major.  The per-node quadrature weight
already contains the sin(theta) Jacobian and the azimuthal spacing, so plain
weighted sums are surface integrals.

Quadrature is the periodic trapezoid rule on the torus (uniform weight equal
to the cell volume, spectrally accurate for band-limited integrands) and
Gauss-Legendre x uniform-azimuth on the sphere (exact through the band
limit).
"""

import json
import os

import numpy as np

__all__ = [
    "TorusDomain",
    "SphereDomain",
    "FieldSet",
    "Labeling",
    "weighted_inner",
    "weighted_norm_sq",
    "labeling_distance",
    "periodic_extend",
    "save_labels",
    "load_labels",
    "labels_to_csv",
]


class TorusDomain:
    """Periodic box [-L/2, L/2)^d with n grid points per axis."""

    def __init__(self, d, n, length=2.0):
        if d not in (2, 3, 4):
            raise ValueError(f"dimension must be 2, 3 or 4, got {d}")
        if n < 4 or n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 4, got {n}")
        if not length > 0:
            raise ValueError(f"length must be positive, got {length}")
        self.d = int(d)
        self.n = int(n)
        self.length = float(length)

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def npoints(self):
        return self.n**self.d

    @property
    def cell_volume(self):
        return (self.length / self.n) ** self.d

    @property
    def total_volume(self):
        return self.length**self.d

    def axis_coords(self):
        """Node coordinates along one axis: x_i = -L/2 + i*L/n."""
        return -self.length / 2 + np.arange(self.n) * (self.length / self.n)

    def __eq__(self, other):
        return (
            isinstance(other, TorusDomain)
            and self.d == other.d
            and self.n == other.n
            and self.length == other.length
        )

    def __hash__(self):
        return hash(("torus", self.d, self.n, self.length))

    def __repr__(self):
        return f"TorusDomain(d={self.d}, n={self.n}, length={self.length})"


class SphereDomain:
    """Unit sphere on a Gauss-Legendre (theta) x uniform (phi) grid.

    ``quad_weights[i]`` is the quadrature weight of every node on the i-th
    inclination ring (Gauss-Legendre weight times 2*pi/n_phi); summed over
    all n_theta*n_phi nodes it reproduces the surface area 4*pi.
    """

    def __init__(self, n_theta, n_phi=None, lmax=None):
        if n_phi is None:
            n_phi = n_theta
        if n_theta < 2 or n_phi < 4:
            raise ValueError("need n_theta >= 2 and n_phi >= 4")
        max_band = min(n_theta - 1, (n_phi - 1) // 2)
        if lmax is None:
            lmax = max_band
        if lmax > n_theta - 1:
            raise ValueError(f"lmax={lmax} exceeds n_theta-1={n_theta - 1}")
        if n_phi < 2 * lmax + 1:
            raise ValueError(f"n_phi={n_phi} < 2*lmax+1={2 * lmax + 1}: azimuthal aliasing")
        self.n_theta = int(n_theta)
        self.n_phi = int(n_phi)
        self.lmax = int(lmax)
        xg, wg = np.polynomial.legendre.leggauss(self.n_theta)
        # leggauss returns ascending cos(theta); flip so theta ascends (north first)
        self.cos_theta = xg[::-1].copy()
        self.theta_nodes = np.arccos(self.cos_theta)
        self.gl_weights = wg[::-1].copy()
        self.quad_weights = self.gl_weights * (2 * np.pi / self.n_phi)
        self.total_volume = 4 * np.pi

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @property
    def npoints(self):
        return self.n_theta * self.n_phi

    def phi_nodes(self):
        return 2 * np.pi * np.arange(self.n_phi) / self.n_phi

    def grid_vectors(self):
        """Unit vectors of all nodes, shape (3, n_theta, n_phi).

        Uses (x, y, z) = (sin t sin p, sin t cos p, cos t).
        """
        t = self.theta_nodes[:, None]
        p = self.phi_nodes()[None, :]
        st, ct = np.sin(t), np.cos(t)
        return np.stack(
            [
                st * np.sin(p),
                st * np.cos(p),
                ct * np.ones_like(p),
            ]
        )

    def __eq__(self, other):
        return (
            isinstance(other, SphereDomain)
            and self.n_theta == other.n_theta
            and self.n_phi == other.n_phi
            and self.lmax == other.lmax
        )

    def __hash__(self):
        return hash(("sphere", self.n_theta, self.n_phi, self.lmax))

    def __repr__(self):
        return f"SphereDomain(n_theta={self.n_theta}, n_phi={self.n_phi}, lmax={self.lmax})"


def _check_same_domain(a, b):
    if a != b:
        raise ValueError(f"domain mismatch: {a!r} vs {b!r}")


def weighted_inner(domain, a, b):
    """Quadrature inner product of two fields on a common domain.

    Symmetric and bilinear; for the constant field 1 it returns the domain
    volume (L^d, respectively 4*pi).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != domain.shape or b.shape != domain.shape:
        raise ValueError(f"field shape {a.shape}/{b.shape} does not match domain {domain.shape}")
    if isinstance(domain, TorusDomain):
        return float((a * b).sum() * domain.cell_volume)
    return float(((a * b).sum(axis=1) * domain.quad_weights).sum())


def weighted_norm_sq(domain, values):
    """Squared quadrature norms along the leading (component) axis."""
    values = np.asarray(values)
    if isinstance(domain, TorusDomain):
        flat = values.reshape(values.shape[0], -1)
        return (flat * flat).sum(axis=1) * domain.cell_volume
    return ((values * values).sum(axis=-1) * domain.quad_weights).sum(axis=-1)


class FieldSet:
    """k nonnegative scalar fields over one domain, stacked as values[k, ...]."""

    def __init__(self, domain, values):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != len(domain.shape) + 1 or values.shape[1:] != domain.shape:
            raise ValueError(f"values shape {values.shape} does not match domain {domain.shape}")
        if values.shape[0] < 2:
            raise ValueError("need at least 2 components")
        if not np.isfinite(values).all():
            raise ValueError("fields contain non-finite values")
        self.domain = domain
        self.values = values

    @property
    def k(self):
        return self.values.shape[0]

    def copy(self):
        return FieldSet(self.domain, self.values.copy())

    def norms_sq(self):
        return weighted_norm_sq(self.domain, self.values)

    def argmax_labels(self):
        """Pointwise index of the largest component (lowest index on ties)."""
        return self.values.argmax(axis=0).astype(np.uint8)


class Labeling:
    """Per-grid-point partition membership in {0, ..., k-1}."""

    def __init__(self, domain, labels, k):
        labels = np.asarray(labels)
        if labels.shape != domain.shape:
            raise ValueError(f"labels shape {labels.shape} does not match domain {domain.shape}")
        if k < 2 or k > 256:
            raise ValueError(f"k must be in [2, 256], got {k}")
        if labels.size and int(labels.max()) >= k:
            raise ValueError(f"label {int(labels.max())} out of range for k={k}")
        if labels.size and int(labels.min()) < 0:
            raise ValueError("negative label")
        self.domain = domain
        self.labels = labels.astype(np.uint8)
        self.k = int(k)

    def counts(self):
        return np.bincount(self.labels.reshape(-1), minlength=self.k)

    def copy(self):
        return Labeling(self.domain, self.labels.copy(), self.k)

    def __eq__(self, other):
        return (
            isinstance(other, Labeling)
            and self.domain == other.domain
            and self.k == other.k
            and np.array_equal(self.labels, other.labels)
        )


def labeling_distance(a, b):
    """Number of grid points whose membership differs."""
    if a.domain != b.domain or a.k != b.k:
        raise ValueError("labelings are not comparable (domain or k mismatch)")
    return int((a.labels != b.labels).sum())


def periodic_extend(labeling, m):
    """Tile a torus labeling m times per axis onto an (m*n)^d grid.

    The result lives on a torus of side m*L, so the partition geometry is
    unchanged, just repeated.
    """
    dom = labeling.domain
    if not isinstance(dom, TorusDomain):
        raise ValueError("periodic extension requires a torus labeling")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    big = TorusDomain(dom.d, m * dom.n, m * dom.length)
    tiled = np.tile(labeling.labels, (m,) * dom.d)
    return Labeling(big, tiled, labeling.k)


# ---------------------------------------------------------------------------
# label export: flat uint8 binary + JSON sidecar, and CSV

def _sidecar_path(bin_path):
    root, _ = os.path.splitext(str(bin_path))
    return root + ".json"


def save_labels(labeling, bin_path):
    """Write labels as flat uint8 bytes plus a JSON sidecar describing the grid."""
    dom = labeling.domain
    if isinstance(dom, TorusDomain):
        meta = {
            "domain_kind": "torus",
            "d": dom.d,
            "n": dom.n,
            "length": dom.length,
            "k": labeling.k,
        }
    else:
        meta = {
            "domain_kind": "sphere",
            "n_theta": dom.n_theta,
            "n_phi": dom.n_phi,
            "k": labeling.k,
        }
    with open(bin_path, "wb") as f:
        f.write(labeling.labels.reshape(-1).tobytes())
    with open(_sidecar_path(bin_path), "w") as f:
        json.dump(meta, f, sort_keys=True, indent=1)
        f.write("\n")


def load_labels(bin_path):
    """Inverse of :func:`save_labels`."""
    with open(_sidecar_path(bin_path)) as f:
        meta = json.load(f)
    kind = meta.get("domain_kind")
    if kind == "torus":
        dom = TorusDomain(meta["d"], meta["n"], meta.get("length", 2.0))
    elif kind == "sphere":
        dom = SphereDomain(meta["n_theta"], meta["n_phi"])
    else:
        raise ValueError(f"unknown domain_kind {kind!r} in sidecar")
    raw = np.fromfile(bin_path, dtype=np.uint8)
    if raw.size != dom.npoints:
        raise ValueError(f"label file has {raw.size} bytes, expected {dom.npoints}")
    return Labeling(dom, raw.reshape(dom.shape), meta["k"])


def labels_to_csv(labeling, path):
    """One row per grid point: coordinates and label."""
    dom = labeling.domain
    flat = labeling.labels.reshape(-1)
    if isinstance(dom, TorusDomain):
        coords = dom.axis_coords()
        grids = np.meshgrid(*([coords] * dom.d), indexing="ij")
        cols = [g.reshape(-1) for g in grids] + [flat]
        header = ",".join(f"x{i + 1}" for i in range(dom.d)) + ",label"
    else:
        t, p = np.meshgrid(dom.theta_nodes, dom.phi_nodes(), indexing="ij")
        cols = [t.reshape(-1), p.reshape(-1), flat]
        header = "theta,phi,label"
    data = np.column_stack(cols)
    fmt = ["%.17g"] * (len(cols) - 1) + ["%d"]
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=header, comments="")
