import numpy as np
import pytest

from cvbench.bench import benchmark_pipeline
from cvbench.ensemble import DeltaAtOrigin, EnsembleSpec, GaussianIsotropic

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one PASS/FAIL line per acceptance criterion at the end of the run."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def pipeline_cache():
    """Memoized benchmark runs so acceptance criteria can share solves."""
    cache = {}

    def run(s, lam, prior_kind, alpha, cutoff, samples=8192, tol=1e-7):
        key = (s, lam, prior_kind, alpha, cutoff, samples, tol)
        if key not in cache:
            prior = (
                DeltaAtOrigin()
                if prior_kind == "delta"
                else GaussianIsotropic(alpha=alpha)
            )
            spec = EnsembleSpec(
                s=s, lam=lam, prior=prior, cutoff=cutoff, samples=samples
            )
            cache[key] = benchmark_pipeline(spec, tol=tol)
        return cache[key]

    return run


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
