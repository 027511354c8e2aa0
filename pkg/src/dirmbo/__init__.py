"""Diffusion-generated computation of Dirichlet k-partitions.

Partitions periodic boxes (d = 2, 3, 4) and the unit sphere into k cells by
iterating heat diffusion, a pointwise largest-component projection, and
per-component L2 renormalization, then reports a normalized surrogate of the
summed first Dirichlet eigenvalues.
"""

from .domains import (
    TorusDomain,
    SphereDomain,
    FieldSet,
    Labeling,
    weighted_inner,
    labeling_distance,
    periodic_extend,
    save_labels,
    load_labels,
    labels_to_csv,
)
from .torus_spectral import SpectralMultiplier, build_multiplier, diffuse, TorusHeat
from .sphere_spectral import ShtPlan, ShCoeffs, sht_forward, sht_inverse, diffuse_sphere, SphereHeat
from .solver import (
    SolverConfig,
    SolveResult,
    EmptyComponentError,
    project,
    renormalize,
    step,
    solve,
    energy_tilde,
    heat_operator,
)
from .initializers import random_voronoi, schwarz_p_init, from_labels, indicator_fields

__version__ = "0.1.0"
