"""Shared fixtures: canonical problems and a session-wide solve cache.

Spectra and nodal sets are expensive relative to everything else, so tests
share them through one session-scoped cache keyed by problem label.
"""

import math

import numpy as np
import pytest

from dirac_nodal import (Classical, DiracProblem, EigenSearchConfig,
                         IntegratorConfig, ParamDependent, extract_nodes,
                         find_eigenvalues, named_potential)


def canonical_pd(alpha, beta):
    """Parameter-dependent boundary whose sign terms are exactly +1 and -1."""
    return ParamDependent(alpha, beta, math.sin(alpha), -math.cos(alpha),
                          -math.sin(beta), math.cos(beta))


def loglog_slope(ns, errs):
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    keep = errs > 0
    assert keep.sum() >= 3, "not enough positive errors for a slope fit"
    return float(np.polyfit(np.log(ns[keep]), np.log(errs[keep]), 1)[0])


class SolveCache:
    def __init__(self):
        self._problems = {}
        self._records = {}
        self._nodals = {}

    def register(self, label, problem, integrator=None, search=None):
        if label not in self._problems:
            self._problems[label] = (problem,
                                     integrator or IntegratorConfig(),
                                     search or EigenSearchConfig())
        return self._problems[label][0]

    def problem(self, label):
        return self._problems[label][0]

    def records(self, label, indices):
        problem, integrator, search = self._problems[label]
        store = self._records.setdefault(label, {})
        missing = [n for n in indices if n not in store]
        if missing:
            for rec in find_eigenvalues(problem, missing, integrator, search):
                store[rec.index] = rec
        return {n: store[n] for n in indices}

    def record(self, label, n):
        return self.records(label, [n])[n]

    def nodal(self, label, n, component=1):
        key = (label, n, component)
        if key not in self._nodals:
            problem, integrator, _ = self._problems[label]
            rec = self.record(label, n)
            self._nodals[key] = extract_nodes(problem, rec, component, integrator)
        return self._nodals[key]


@pytest.fixture(scope="session")
def cache():
    c = SolveCache()
    fast = IntegratorConfig(n_steps=1024)
    mid = IntegratorConfig(n_steps=2048)
    c.register("zero_quarter",
               DiracProblem(0.0, named_potential("zero"), Classical(0.0, math.pi / 4)),
               fast)
    c.register("zero_flat",
               DiracProblem(0.0, named_potential("zero"), Classical(0.0, 0.0)),
               fast)
    c.register("zero_half_mass",
               DiracProblem(0.5, named_potential("zero"), Classical(0.0, 0.0)),
               mid)
    c.register("sin_half",
               DiracProblem(0.5, named_potential("sin2x"), Classical(0.0, 0.0)),
               mid)
    c.register("const_one",
               DiracProblem(0.0, named_potential("constant", c=1.0),
                            Classical(0.0, 0.0)),
               fast)
    c.register("pd_example",
               DiracProblem(0.5, named_potential("sin2x"), canonical_pd(0.4, 0.5)),
               mid)
    return c
