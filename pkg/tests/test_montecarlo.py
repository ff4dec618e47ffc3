import numpy as np
import pytest

from molauth import _backend
from molauth.detect import MeasurementModel, test_statistic
from molauth.errors import DomainError
from molauth.kernels import count_exceedances, trial_statistics
from molauth.montecarlo import (DfMode, Occupant, Scenario, error_counts, estimate_error_probs,
                                point_seed, run_roc, simulate_slot)
from molauth.rng import SplitMix64, derive_seed, trial_key

from conftest import binomial_se, make_scenario

needs_numba = pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")
BACKENDS = ["numpy", pytest.param("numba", marks=needs_numba)]


def test_splitmix_reference_vector():
    s = SplitMix64(1234567)
    assert [s.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_stream_normals_look_standard():
    x = SplitMix64(99).standard_normal(200_000)
    assert abs(x.mean()) < 0.01 and abs(x.var() - 1) < 0.01


def test_derive_is_index_sensitive():
    keys = {derive_seed(7, i) for i in range(1000)}
    assert len(keys) == 1000
    assert trial_key(7, 0, 5) != trial_key(7, 1, 5)


def test_vanishing_noise():
    s = make_scenario(sigma2=1e-30)
    z = simulate_slot(Occupant.ALICE, s, np.random.default_rng(0))
    np.testing.assert_allclose(z, s.h_alice.taps, rtol=1e-10)


def test_identical_attacker_is_indistinguishable():
    s = make_scenario(ratio=1.0)
    a = simulate_slot(Occupant.ALICE, s, SplitMix64(5))
    e = simulate_slot(Occupant.EVE, s, SplitMix64(5))
    assert a.tobytes() == e.tobytes()


def test_simulate_slot_deterministic(scenario):
    a = simulate_slot(Occupant.EVE, scenario, SplitMix64(trial_key(3, 1, 17)))
    b = simulate_slot(Occupant.EVE, scenario, SplitMix64(trial_key(3, 1, 17)))
    assert a.tobytes() == b.tobytes()


def test_scenario_validation():
    s = make_scenario()
    with pytest.raises(DomainError):
        Scenario(s.alice_channel, make_scenario(L=8).eve_channel, s.measurement)
    with pytest.raises(DomainError):
        Scenario(s.alice_channel, s.eve_channel, MeasurementModel.isotropic(1.0, 5))


@pytest.mark.parametrize("occupant,hyp", [(Occupant.ALICE, 0), (Occupant.EVE, 1)])
def test_kernel_replays_single_trials(scenario, occupant, hyp):
    """Kernel statistics equal simulate_slot + test_statistic on the trial's own stream."""
    seed = 2024
    ref = scenario.h_alice
    stats = trial_statistics(scenario.cir(occupant).taps, ref.taps, scenario.measurement.cholesky,
                             derive_seed(seed, hyp), 0, 200)
    for i in range(200):
        z = simulate_slot(occupant, scenario, SplitMix64(trial_key(seed, hyp, i)))
        assert stats[i] == pytest.approx(test_statistic(z, ref, scenario.measurement), rel=1e-12)


@needs_numba
@pytest.mark.parametrize("L", [1, 3, 4, 12])
def test_backends_agree(L):
    s = make_scenario(L=L, sigma2=2.0)
    args = (s.h_eve.taps, s.h_alice.taps, s.measurement.cholesky, 6.5, derive_seed(11, 1), 50_000)
    assert count_exceedances(*args, backend="numba") == count_exceedances(*args, backend="numpy")


@pytest.mark.parametrize("backend", BACKENDS)
def test_count_independent_of_workers_and_chunking(scenario, backend):
    args = (scenario.h_eve.taps, scenario.h_alice.taps, scenario.measurement.cholesky,
            5.0, 12345, 30_001)
    base = count_exceedances(*args, backend=backend)
    assert count_exceedances(*args, backend=backend, workers=3, chunk=4096) == base
    assert count_exceedances(*args, backend=backend, workers=2, chunk=777) == base


def test_blind_attacker_pmd():
    pfa, pmd = estimate_error_probs(make_scenario(ratio=1.0), 0.1, 100_000, 1)
    assert abs(pmd - 0.9) <= 0.004


def test_noiseless_separation():
    # Pfa is pinned at alpha by the threshold for any noise level; only Pmd collapses
    pfa, pmd = estimate_error_probs(make_scenario(sigma2=1e-12), 0.05, 20_000, 2)
    assert pmd == 0.0
    assert abs(pfa - 0.05) <= 3 * binomial_se(0.05, 20_000)


@pytest.mark.parametrize("L,ratio", [(4, 1.1), (8, 1.5), (12, 1.25)])
def test_pfa_at_five_percent(L, ratio):
    pfa, _ = estimate_error_probs(make_scenario(L=L, ratio=ratio), 0.05, 100_000, 3)
    assert abs(pfa - 0.05) <= 0.0021


def test_single_point_roc_is_composition(scenario):
    curve = run_roc(scenario, [0.2], 20_000, seed=77)
    direct = estimate_error_probs(scenario, 0.2, 20_000, point_seed(77, 0))
    assert (curve.points[0].pfa_hat, curve.points[0].pmd_hat) == direct


def test_roc_deterministic(scenario):
    a = run_roc(scenario, [0.01, 0.1, 0.5], 20_000, seed=5)
    b = run_roc(scenario, [0.01, 0.1, 0.5], 20_000, seed=5, workers=2)
    assert a == b
    assert a.scenario_digest == scenario.digest() and len(a.scenario_digest) == 16


def test_roc_rejects_unsorted_alphas(scenario):
    with pytest.raises(DomainError):
        run_roc(scenario, [0.1, 0.05], 10)


def test_more_noise_more_misses():
    alphas = [0.01, 0.05, 0.1, 0.3]
    low = run_roc(make_scenario(sigma2=1.0), alphas, 100_000, seed=9)
    high = run_roc(make_scenario(sigma2=3.0), alphas, 100_000, seed=9)
    for a, b in zip(low.points, high.points):
        slack = 3 * np.hypot(binomial_se(a.pmd_hat, 100_000), binomial_se(b.pmd_hat, 100_000))
        assert b.pmd_hat >= a.pmd_hat - slack


def test_farther_attacker_is_easier_to_catch():
    pmds = [estimate_error_probs(make_scenario(ratio=r), 0.05, 50_000, 4)[1]
            for r in (1.0, 1.1, 1.25, 1.5)]
    for x, y in zip(pmds, pmds[1:]):
        assert y <= x + 3 * np.hypot(binomial_se(x, 50_000), binomial_se(y, 50_000))


def test_roc_sanity(scenario):
    curve = run_roc(scenario, [0.01, 0.05, 0.1, 0.3, 0.6, 0.999], 50_000, seed=8)
    assert np.all((curve.pfa >= 0) & (curve.pfa <= 1) & (curve.pmd >= 0) & (curve.pmd <= 1))
    slack = 3 * np.sqrt(2 * 0.25 / 50_000)
    assert np.all(np.diff(curve.pmd) <= slack)
    assert curve.pmd[-1] < 0.005


def test_2L_df_is_conservative():
    s = make_scenario(df_mode=DfMode.TWO_L)
    assert s.degrees_of_freedom == 8
    for alpha in (0.01, 0.1, 0.5):
        assert estimate_error_probs(s, alpha, 50_000, 6)[0] < alpha


def test_error_counts_are_integers(scenario):
    fa, md = error_counts(scenario, 0.1, 1000, 0)
    assert isinstance(fa, int) and isinstance(md, int)
    with pytest.raises(DomainError):
        error_counts(scenario, 0.1, 0, 0)
