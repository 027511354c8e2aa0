"""Outer iteration: diffusion, largest-component projection, renormalization.

Each sweep diffuses every component for time tau, keeps at each grid point
only the component attaining the pointwise maximum (ties break to the lowest
index and are counted), and rescales every component back to unit quadrature
L2 norm.  The iteration stops when the membership labeling repeats the
previous iterate exactly, when a two-step cycle is detected, or at the
iteration cap.

The reported objective is the normalized diffusion surrogate of the summed
first Dirichlet eigenvalues,

    E = |U|^(2/d) / k^(1+2/d) * (1/tau) * (k - sum_l <u_l, H_tau u_l>),

with d = 2 and |U| = 4*pi on the sphere, H_tau the same diffusion operator
used by the sweep, and every u_l unit-normalized.  It is nonnegative because
diffusion is an L2 contraction.

Diffusion streams one component at a time, so peak memory stays at the state
array plus a few single-field scratch buffers regardless of k.
"""

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import (
    FieldSet,
    Labeling,
    SphereDomain,
    TorusDomain,
    weighted_inner,
    weighted_norm_sq,
)
from .sphere_spectral import SphereHeat
from .torus_spectral import TorusHeat

__all__ = [
    "EmptyComponentError",
    "SolverConfig",
    "SolveResult",
    "project",
    "renormalize",
    "step",
    "solve",
    "energy_tilde",
    "heat_operator",
]

log = logging.getLogger("dirmbo")


class EmptyComponentError(RuntimeError):
    """A component lost its entire support (its region was absorbed).

    Renormalization is undefined for it; typically the diffusion time is too
    large, or k is infeasible at this resolution.
    """

    def __init__(self, component):
        self.component = int(component)
        super().__init__(
            f"component {component} has empty support; "
            "reduce tau or k, or refine the grid"
        )


def heat_operator(domain, tau):
    """Diffusion operator for the domain kind (precomputed, reusable)."""
    if isinstance(domain, TorusDomain):
        return TorusHeat(domain, tau)
    if isinstance(domain, SphereDomain):
        return SphereHeat(domain, tau)
    raise ValueError(f"no diffusion operator for {domain!r}")


@dataclass
class SolverConfig:
    k: int
    tau: float
    domain: object
    max_iters: int = 1000
    seed: int = 0
    energy_trace: bool = True
    check_invariants: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class SolveResult:
    fields: FieldSet
    labeling: Labeling
    energy: float
    energy_trace: Optional[np.ndarray]
    iterations: int
    converged: bool
    stop_reason: str  # "converged" | "oscillation" | "max_iters"
    tie_count: int
    wall_time: float


def _prefactor(domain, k, tau):
    if isinstance(domain, SphereDomain):
        d_eff, vol = 2, domain.total_volume
    else:
        d_eff, vol = domain.d, domain.total_volume
    return vol ** (2.0 / d_eff) / k ** (1.0 + 2.0 / d_eff) / tau


def project(fs):
    """Keep at each point only the largest component, zero the rest.

    Ties break to the lowest component index; the number of points with tied
    maxima is returned alongside.  The kept value equals the pointwise max of
    the input, so a point where every component is zero keeps a zero in
    component 0.
    """
    labels = fs.values.argmax(axis=0)
    kept = np.take_along_axis(fs.values, labels[None], 0)
    ties = int(((fs.values == kept).sum(axis=0) > 1).sum())
    out = np.zeros_like(fs.values)
    np.put_along_axis(out, labels[None], kept, 0)
    return FieldSet(fs.domain, out), ties


def renormalize(fs):
    """Rescale each component to unit quadrature L2 norm (supports unchanged)."""
    norms_sq = weighted_norm_sq(fs.domain, fs.values)
    for i, nsq in enumerate(norms_sq):
        if nsq == 0.0:
            raise EmptyComponentError(i)
    shape = (fs.k,) + (1,) * len(fs.domain.shape)
    return FieldSet(fs.domain, fs.values / np.sqrt(norms_sq).reshape(shape))


def _sweep(domain, values, heat, want_inner):
    """Diffuse all components (streaming) and reduce the pointwise argmax.

    Returns (labels, max_values, tie_count, sum of <u_i, H u_i>).  Scheduling
    is sequential per component, so results are bit-reproducible.
    """
    k = values.shape[0]
    inner_sum = 0.0
    diffused0 = heat.apply(values[0])
    if want_inner:
        inner_sum += weighted_inner(domain, values[0], diffused0)
    best = diffused0
    labels = np.zeros(domain.shape, dtype=np.uint8)
    at_best = np.ones(domain.shape, dtype=np.uint8)
    for i in range(1, k):
        d_i = heat.apply(values[i])
        if want_inner:
            inner_sum += weighted_inner(domain, values[i], d_i)
        gt = d_i > best
        eq = d_i == best
        labels[gt] = i
        np.copyto(best, d_i, where=gt)
        at_best[gt] = 1
        at_best[eq] += 1
    ties = int((at_best > 1).sum())
    return labels, best, ties, inner_sum


def _normalized_fields(domain, labels, max_values, k):
    """Assemble the projected, renormalized field stack from a sweep."""
    values = np.zeros((k,) + domain.shape)
    for i in range(k):
        mask = labels == i
        comp = np.where(mask, max_values, 0.0)
        nsq = weighted_inner(domain, comp, comp)
        if nsq == 0.0:
            raise EmptyComponentError(i)
        values[i] = comp / np.sqrt(nsq)
    return values


def _assert_invariants(domain, values):
    support_count = (values != 0.0).sum(axis=0)
    assert support_count.max() <= 1, "projection left overlapping supports"
    norms_sq = weighted_norm_sq(domain, values)
    assert np.abs(norms_sq - 1.0).max() < 1e-10, "renormalization off tolerance"


def step(fs, heat):
    """One full sweep: diffuse by heat.tau, project, renormalize.

    Returns (new FieldSet, Labeling of the argmax memberships, tie count).
    """
    labels, best, ties, _ = _sweep(fs.domain, fs.values, heat, want_inner=False)
    values = _normalized_fields(fs.domain, labels, best, fs.k)
    return FieldSet(fs.domain, values), Labeling(fs.domain, labels, fs.k), ties


def energy_tilde(fs, tau, heat):
    """Normalized diffusion surrogate energy of a unit-normalized FieldSet."""
    norms_sq = weighted_norm_sq(fs.domain, fs.values)
    if np.abs(np.sqrt(norms_sq) - 1.0).max() > 1e-6:
        raise ValueError("energy requires unit-normalized components")
    s = 0.0
    for i in range(fs.k):
        s += weighted_inner(fs.domain, fs.values[i], heat.apply(fs.values[i]))
    return _prefactor(fs.domain, fs.k, tau) * (fs.k - s)


def solve(config, init, heat=None):
    """Iterate sweeps from init until the membership labeling is stationary.

    Deterministic for a fixed config and init.  A repeat of the labeling from
    two sweeps back (but not the last one) stops the run as a two-cycle and
    the lower-energy iterate of the pair is returned.  Hitting max_iters
    returns the last iterate flagged unconverged.
    """
    if init.k != config.k:
        raise ValueError(f"init has k={init.k}, config wants k={config.k}")
    if init.domain != config.domain:
        raise ValueError("init domain does not match config domain")
    if heat is None:
        heat = heat_operator(config.domain, config.tau)
    domain, k, tau = config.domain, config.k, config.tau
    pref = _prefactor(domain, k, tau)

    t0 = time.perf_counter()
    fs = renormalize(init)
    values = fs.values
    cur = values.argmax(axis=0).astype(np.uint8)
    prev2 = None
    trace = [] if config.energy_trace else None
    ties_total = 0
    converged = False
    stop_reason = "max_iters"
    iterations = config.max_iters

    for it in range(1, config.max_iters + 1):
        labels, best, ties, inner_sum = _sweep(domain, values, heat, want_inner=trace is not None)
        ties_total += ties
        if trace is not None:
            trace.append(pref * (k - inner_sum))
        new_values = _normalized_fields(domain, labels, best, k)
        if config.check_invariants:
            _assert_invariants(domain, new_values)
        if np.array_equal(labels, cur):
            values, cur = new_values, labels
            converged, stop_reason, iterations = True, "converged", it
            break
        if prev2 is not None and np.array_equal(labels, prev2):
            # two-cycle: keep the lower-energy state of the pair
            old_fs = FieldSet(domain, values)
            new_fs = FieldSet(domain, new_values)
            e_old = energy_tilde(old_fs, tau, heat)
            e_new = energy_tilde(new_fs, tau, heat)
            if e_new <= e_old:
                values, cur = new_values, labels
            stop_reason, iterations = "oscillation", it
            log.warning("labeling two-cycle detected at iteration %d; returning lower-energy iterate", it)
            break
        prev2 = cur
        values, cur = new_values, labels
        iterations = it

    final = FieldSet(domain, values)
    energy = energy_tilde(final, tau, heat)
    if trace is not None:
        trace.append(energy)
        diffs = np.diff(trace)
        if diffs.size and diffs.max() > 1e-9:
            log.warning("energy increased on %d step(s); largest jump %.3g", int((diffs > 1e-9).sum()), float(diffs.max()))
    if stop_reason == "max_iters":
        log.warning("no stationary labeling within %d iterations", config.max_iters)

    return SolveResult(
        fields=final,
        labeling=Labeling(domain, cur, k),
        energy=float(energy),
        energy_trace=np.asarray(trace) if trace is not None else None,
        iterations=iterations,
        converged=converged,
        stop_reason=stop_reason,
        tie_count=ties_total,
        wall_time=time.perf_counter() - t0,
    )
