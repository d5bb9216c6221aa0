"""Simulation of direct density-matrix measurement for two-photon polarization states."""

from ._core import (
    WeaktomoError,
    density_from_pure,
    fidelity,
    fixture,
    method1,
    method2,
    modular_to_weak,
    modular_values,
    mub_overlaps,
    oracle,
    physicality_project,
    random_mixed,
    random_pure,
    run_cli,
    sample_bernoulli,
    trace_distance,
    weak_value_joint,
)

__all__ = [
    "WeaktomoError",
    "density_from_pure",
    "fidelity",
    "fixture",
    "method1",
    "method2",
    "modular_to_weak",
    "modular_values",
    "mub_overlaps",
    "oracle",
    "physicality_project",
    "random_mixed",
    "random_pure",
    "run_cli",
    "sample_bernoulli",
    "trace_distance",
    "weak_value_joint",
]
