import numpy as np
import pytest

from aiplab.errors import InadmissibleParameters
from aiplab.geometry import VPolytope
from aiplab.proptests import (SUITES, Trial, boule_bound, centered_inradius, run_suite,
                              run_trials, summarize, surface_moments, trial_dimension)


def test_surface_moments_match_fan_moments(rng):
    for n in (2, 3):
        p = VPolytope(rng.standard_normal((20, n)) + 2.0)
        vol, first = surface_moments(p)
        assert vol == pytest.approx(p.volume, rel=1e-12)
        np.testing.assert_allclose(first / vol, p.centroid, atol=1e-12)


def test_boule_bound_on_square(square):
    # |P| / (3 D |B^1|) with D = sqrt 2: 4 / (6 sqrt 2) < inradius 1
    assert boule_bound(square) == pytest.approx(4 / (6 * np.sqrt(2)))
    assert centered_inradius(square) == pytest.approx(1.0)


def test_dimensions_alternate():
    assert [trial_dimension(s) for s in range(4)] == [2, 3, 2, 3]


@pytest.mark.parametrize("suite", sorted(set(SUITES) - {"equivariance"}))
def test_suites_pass_on_a_few_seeds(suite):
    for summary in run_suite(suite, 3, seed=100):
        assert summary.passed, summary


def test_equivariance_suite_small():
    summary = {s.name: s for s in run_suite("equivariance", 2, seed=0)}
    assert set(summary) == {"g", "gdelta:0.1", "s", "j", "l"}
    assert all(s.passed for s in summary.values())


def test_trials_are_seeded():
    a = run_trials("boule", 3, seed=7)
    b = run_trials("boule", 3, seed=7)
    assert [t.residuals for t in a] == [t.residuals for t in b]
    assert [t.seed for t in a] == [7, 8, 9]


def test_summary_reports_minimal_failing_seed():
    trials = [Trial(4, {"concavity": 0.3}), Trial(2, {"concavity": 0.5}),
              Trial(3, {"concavity": 0.0})]
    (s,) = summarize("brunn-minkowski", trials, tol=0.1)
    assert (s.violations, s.min_failing_seed, s.max_residual) == (2, 2, 0.5)
    assert not s.passed


def test_bad_arguments():
    with pytest.raises(InadmissibleParameters):
        run_trials("nope", 3, 0)
    with pytest.raises(InadmissibleParameters):
        run_trials("boule", 0, 0)
