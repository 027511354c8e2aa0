"""Trial orchestration and machine-readable run reports.

A run executes ``trials`` independent solves (trial t uses seed base_seed+t),
keeps every per-trial outcome, and selects the finished trial with minimal
energy as the winner.  Reports echo the full configuration, record the RNG
and quadrature conventions, and are plain sorted-key JSON so they diff
cleanly.
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .domains import SphereDomain, TorusDomain
from .initializers import InitializationError, from_labels, random_voronoi, schwarz_p_init
from .solver import EmptyComponentError, SolverConfig, solve

__all__ = ["make_domain", "make_init", "run_trials", "build_report", "write_report", "write_trials_csv", "write_trace_csv"]

DOMAIN_KINDS = ("torus2", "torus3", "torus4", "sphere")

QUADRATURE_NOTES = {
    "torus": "periodic trapezoid rule (uniform weight = cell volume)",
    "sphere": (
        "Gauss-Legendre nodes in cos(theta) with uniform azimuth; exact through "
        "the band limit, unlike a uniform-theta grid (energies shift in the "
        "third decimal)"
    ),
}


def make_domain(kind, n, length=2.0):
    if kind == "sphere":
        return SphereDomain(n, n)
    if kind in ("torus2", "torus3", "torus4"):
        return TorusDomain(int(kind[-1]), n, length)
    raise ValueError(f"unknown domain kind {kind!r}; expected one of {DOMAIN_KINDS}")


def domain_kind(domain):
    if isinstance(domain, SphereDomain):
        return "sphere"
    return f"torus{domain.d}"


def make_init(domain, k, init_spec, seed):
    """Initial FieldSet from an init spec: random | schwarz-p | file:<path>."""
    if init_spec == "random":
        return random_voronoi(domain, k, seed)
    if init_spec == "schwarz-p":
        if not (isinstance(domain, TorusDomain) and domain.d == 3 and k == 2):
            raise ValueError("schwarz-p init needs a 3d torus and k=2")
        return schwarz_p_init(domain)
    if init_spec.startswith("file:"):
        return from_labels(init_spec[5:], k)
    raise ValueError(f"unknown init {init_spec!r}")


def _one_trial(args):
    domain, k, tau, init_spec, trial, seed, max_iters, check_invariants = args
    record = {"trial": trial, "seed": seed}
    try:
        init = make_init(domain, k, init_spec, seed)
        config = SolverConfig(
            k=k,
            tau=tau,
            domain=domain,
            max_iters=max_iters,
            seed=seed,
            energy_trace=True,
            check_invariants=check_invariants,
        )
        result = solve(config, init)
    except (EmptyComponentError, InitializationError) as exc:
        record["error"] = type(exc).__name__
        if isinstance(exc, EmptyComponentError):
            record["component"] = exc.component
        record["message"] = str(exc)
        return record, None, None
    record.update(
        energy=result.energy,
        iterations=result.iterations,
        converged=result.converged,
        stop_reason=result.stop_reason,
        tie_count=result.tie_count,
        wall_time=result.wall_time,
    )
    return record, result.labeling, result.energy_trace


def run_trials(domain, k, tau, init_spec, trials, base_seed, max_iters=1000, jobs=1, check_invariants=True):
    """Run `trials` seeded solves; returns (records, best_index, labeling, traces).

    best_index is the finished trial with minimal energy, or None if every
    trial failed.  Trial ordering (and therefore the report) is independent
    of scheduling.
    """
    args = [
        (domain, k, tau, init_spec, t, base_seed + t, max_iters, check_invariants)
        for t in range(trials)
    ]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_one_trial, args))
    else:
        outcomes = [_one_trial(a) for a in args]
    records = [rec for rec, _, _ in outcomes]
    traces = [(rec["trial"], trace) for (rec, _, trace) in outcomes]
    best_index, best_energy, best_labeling = None, None, None
    for rec, labeling, _ in outcomes:
        if "energy" in rec and (best_energy is None or rec["energy"] < best_energy):
            best_index, best_energy, best_labeling = rec["trial"], rec["energy"], labeling
    return records, best_index, best_labeling, traces


def build_report(domain, k, tau, init_spec, trials, base_seed, max_iters, records, best_index, extra=None):
    kind = domain_kind(domain)
    config = {
        "domain_kind": kind,
        "k": k,
        "tau": tau,
        "init": init_spec,
        "trials": trials,
        "seed": base_seed,
        "max_iters": max_iters,
    }
    if isinstance(domain, TorusDomain):
        config.update(d=domain.d, n=domain.n, length=domain.length)
    else:
        config.update(n_theta=domain.n_theta, n_phi=domain.n_phi, lmax=domain.lmax)
    report = {
        "config": config,
        "trials": records,
        "best_trial": best_index,
        "version": __version__,
        "rng": "numpy default_rng (PCG64), trial t uses seed base+t",
        "quadrature": QUADRATURE_NOTES["sphere" if kind == "sphere" else "torus"],
    }
    if extra:
        report.update(extra)
    return report


def write_report(report, path):
    with open(path, "w") as f:
        json.dump(report, f, indent=1, sort_keys=True)
        f.write("\n")


def write_trials_csv(records, path):
    fields = [
        "trial", "seed", "energy", "iterations", "converged", "stop_reason",
        "tie_count", "wall_time", "error", "component", "message",
    ]
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for rec in records:
            writer.writerow(rec)


def write_trace_csv(trace, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["iteration", "energy"])
        for i, e in enumerate(trace):
            writer.writerow([i, f"{e:.12g}"])
