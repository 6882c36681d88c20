"""End-to-end acceptance checks.

All eleven claims share one set of sweeps (about three minutes on one core).
Each claim gets its own test and a PASS/FAIL line in the terminal summary.
"""

import pytest

from ensemble_coherence.sweeps import SweepConfig
from ensemble_coherence.verify import CLAIMS, verify_claims

@pytest.fixture(scope="module")
def results(acceptance_sink):
    out = verify_claims(SweepConfig("verify"))
    acceptance_sink.extend(out)
    return {r.id: r for r in out}


@pytest.mark.slow
@pytest.mark.parametrize("claim_id", range(1, len(CLAIMS) + 1), ids=[c.__name__.removeprefix("claim_") for c in CLAIMS])
def test_acceptance(results, claim_id):
    r = results[claim_id]
    print(f"[{'PASS' if r.passed else 'FAIL'}] {r.id:>2} {r.claim}: {r.measured} (tol {r.tolerance})")
    assert r.passed, f"{r.claim}: measured {r.measured}, tolerance {r.tolerance}"
