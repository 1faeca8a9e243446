"""Shared fixtures. Catalog traces and locus results are computed once per run."""

import pytest

from linkagekit.catalog import entry, names
from linkagekit.locus import locus_equation
from linkagekit.solver import Configuration, SolverSettings, trace


def catalog_seed(e) -> Configuration:
    anchored = {
        j.id: (float(j.anchor[0]), float(j.anchor[1]))
        for j in e.spec.anchored_joints
    }
    return Configuration({**anchored, **e.seed})


def catalog_trace(name: str, settings: SolverSettings = None, sweep=None):
    e = entry(name)
    lo, hi = sweep if sweep is not None else e.sweep
    return trace(
        e.spec, lo, hi, settings or SolverSettings(),
        seed=catalog_seed(e), seed_theta=e.theta_ref,
    )


@pytest.fixture(scope="session")
def traces():
    return {name: catalog_trace(name) for name in names()}


@pytest.fixture(scope="session")
def loci():
    return {name: locus_equation(entry(name).spec) for name in names()}
