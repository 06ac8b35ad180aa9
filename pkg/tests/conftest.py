"""Shared trial bank for the acceptance criteria.

One seeded stream of generated operators (dims 2-12, conditioning bound
1e3) with their classified spectra, built once per session and reused by
the read-only acceptance checks."""

import numpy as np
import pytest

from krein_spectra import (
    ToleranceConfig,
    build_normal_with_types,
    classified_spectrum,
    sample_generator_spec,
)

ACCEPTANCE_SEED = 20260810
ACCEPTANCE_TRIALS = 500
ACCEPTANCE_DIMS = (2, 12)
ACCEPTANCE_COND_BOUND = 1e3


def generate_trial(index: int, seed: int = ACCEPTANCE_SEED):
    rng = np.random.default_rng([seed, index])
    dim = int(rng.integers(ACCEPTANCE_DIMS[0], ACCEPTANCE_DIMS[1] + 1))
    spec = sample_generator_spec(rng, dim, cond_bound=ACCEPTANCE_COND_BOUND)
    return build_normal_with_types(spec)


@pytest.fixture(scope="session")
def trial_bank():
    cfg = ToleranceConfig()
    bank = []
    for i in range(ACCEPTANCE_TRIALS):
        gen = generate_trial(i)
        bank.append((i, gen, classified_spectrum(gen.operator, cfg)))
    return bank
