import itertools
import math

import numpy as np
import pytest
from scipy import stats

from fbmac import (
    UNBOUNDED,
    AtomicDistribution,
    GuardExceeded,
    InfeasibleTarget,
    InputPair,
    TailTarget,
    cdf,
    density_table,
    exact_sum_distribution,
    joint_tail,
    lattice_sum_distribution,
    monte_carlo_tail,
    solve_delta,
)
from fbmac.validation import random_law

LN2 = math.log(2)
FAIR = AtomicDistribution([LN2, 2 * LN2], [0.5, 0.5])


def brute(law, n):
    acc = {}
    for seq in itertools.product(range(len(law)), repeat=n):
        v = math.fsum(law.values[list(seq)])
        acc[v] = acc.get(v, 0.0) + math.prod(law.probs[list(seq)])
    return AtomicDistribution(list(acc), list(acc.values()))


def test_n_equal_one_is_identity():
    assert exact_sum_distribution(FAIR, 1) is FAIR


@pytest.mark.parametrize(
    "n,multiples,probs",
    [(2, [2, 3, 4], [0.25, 0.5, 0.25]), (3, [3, 4, 5, 6], [1 / 8, 3 / 8, 3 / 8, 1 / 8])],
)
def test_fair_two_atom_sums(n, multiples, probs):
    d = exact_sum_distribution(FAIR, n)
    np.testing.assert_allclose(d.values, np.array(multiples) * LN2, atol=1e-12)
    np.testing.assert_allclose(d.probs, probs, atol=1e-12)


def test_guard():
    law = AtomicDistribution(np.arange(10.0), np.full(10, 0.1))
    with pytest.raises(GuardExceeded):
        exact_sum_distribution(law, 50, guard=1000)


@pytest.mark.parametrize("seed", range(25))
def test_exact_matches_sequence_enumeration(seed):
    rng = np.random.default_rng(seed)
    law = random_law(rng)
    n = int(rng.integers(1, 7))
    a, b = exact_sum_distribution(law, n), brute(law, n)
    assert len(a) == len(b)
    np.testing.assert_allclose(a.values, b.values, atol=1e-12, rtol=0)
    np.testing.assert_allclose(a.probs, b.probs, atol=1e-12, rtol=0)


def test_mean_and_variance_additivity_at_large_n():
    law = AtomicDistribution([-0.3, 0.1, 0.7], [0.2, 0.5, 0.3])
    n = 300
    d = exact_sum_distribution(law, n)
    assert d.mean == pytest.approx(n * law.mean, abs=1e-9 * n)
    assert d.variance == pytest.approx(n * law.variance, abs=1e-9 * n)


def test_cdf_edges_and_inclusive_atoms():
    d = exact_sum_distribution(FAIR, 2)
    assert cdf(d, LN2) == 0.0
    assert cdf(d, 4 * LN2) == 1.0
    assert cdf(d, 1e6) == 1.0
    assert cdf(d, 3 * LN2) == pytest.approx(0.75, abs=1e-15)
    assert cdf(d, 3 * LN2 - 5e-13) == pytest.approx(0.75, abs=1e-15)
    assert cdf(d, UNBOUNDED) == 1.0
    with pytest.raises(ValueError):
        cdf(d, math.inf)


def test_lattice_total_collapse():
    lat = lattice_sum_distribution(FAIR, 5, step=10.0, direction="round_up")
    assert lat.pmf.size == 1 and lat.pmf[0] == 1.0
    assert lat.values[0] == pytest.approx(50.0)


@pytest.mark.parametrize("direction", ["round_up", "round_down"])
def test_lattice_aligned_values_reproduce_exact(direction):
    lat = lattice_sum_distribution(FAIR, 10, step=LN2, direction=direction)
    ex = exact_sum_distribution(FAIR, 10)
    binom = stats.binom(10, 0.5)
    for k in range(-1, 12):
        t = (10 + k) * LN2
        assert cdf(lat, t) == pytest.approx(cdf(ex, t), abs=1e-14)
        assert cdf(ex, t) == pytest.approx(binom.cdf(k), abs=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_rounding_sandwich(seed):
    rng = np.random.default_rng(100 + seed)
    law = random_law(rng)
    n = int(rng.integers(1, 12))
    step = 0.037 * (1 + seed)
    ex = exact_sum_distribution(law, n)
    up = lattice_sum_distribution(law, n, step, "round_up")
    down = lattice_sum_distribution(law, n, step, "round_down")
    for t in rng.uniform(n * law.values[0] - 1, n * law.values[-1] + 1, size=200):
        c = cdf(ex, t)
        assert cdf(up, t) <= c + 1e-12
        assert c <= cdf(down, t) + 1e-12


def test_lattice_guard():
    with pytest.raises(GuardExceeded):
        lattice_sum_distribution(FAIR, 1000, step=1e-4, guard=10**6)


def test_solve_delta_examples():
    mean = 1.5 * LN2
    assert solve_delta(FAIR, mean, TailTarget(0.5, 2)) == pytest.approx(0.0, abs=1e-15)
    assert solve_delta(FAIR, mean, TailTarget(0.2, 2)) == pytest.approx(0.5 * LN2, abs=1e-15)
    const = AtomicDistribution([0.42], [1.0])
    for target in (0.01, 0.5, 1.0):
        assert solve_delta(const, 0.42, TailTarget(target, 17)) == pytest.approx(0.0, abs=1e-14)


def test_solve_delta_lattice_mode_is_sound_and_close():
    law = AtomicDistribution([-0.4, 0.05, 0.9], [0.3, 0.45, 0.25])
    tt = TailTarget(0.13, 60)
    ex = exact_sum_distribution(law, 60)
    d_exact = solve_delta(law, law.mean, tt, "exact")
    d_lat = solve_delta(law, law.mean, tt, "lattice", step=0.01)
    assert d_lat <= d_exact + 1e-12
    assert cdf(ex, 60 * (law.mean - d_lat)) >= 0.13
    assert d_exact - d_lat <= 0.01


def test_infeasible_target():
    with pytest.raises(InfeasibleTarget):
        TailTarget(1.2, 5)


def test_joint_tail_examples(adder):
    t = density_table(adder, InputPair.uniform(adder))
    assert joint_tail(t, 1, UNBOUNDED, UNBOUNDED, LN2, step=LN2) == pytest.approx(0.5, abs=1e-15)
    assert joint_tail(t, 1, UNBOUNDED, UNBOUNDED, LN2, step=LN2 / 8) == pytest.approx(0.5, abs=1e-15)
    n = 4
    assert joint_tail(t, n, n * LN2, n * LN2, 2 * n * LN2, step=LN2 / 4) == pytest.approx(1.0, abs=1e-14)
    assert joint_tail(t, n, n * LN2 - 0.1, UNBOUNDED, UNBOUNDED, step=LN2 / 4) == 0.0
    assert joint_tail(t, n, UNBOUNDED, UNBOUNDED, UNBOUNDED, step=1.0) == 1.0


def test_joint_tail_matches_enumeration(noisy_adder):
    t = density_table(noisy_adder, InputPair([0.4, 0.6], [0.7, 0.3]))
    n = 3
    thr = (n * 0.3, n * 0.35, n * 0.6)
    exact = 0.0
    for seq in itertools.product(range(len(t)), repeat=n):
        idx = list(seq)
        if (t.d1[idx].sum() <= thr[0] and t.d2[idx].sum() <= thr[1] and t.d12[idx].sum() <= thr[2]):
            exact += math.prod(t.prob[idx])
    for step in (0.1, 0.05):
        lower = joint_tail(t, n, *thr, step=step)
        assert lower <= exact + 1e-12
    assert exact - lower < 0.01


def test_joint_tail_single_coordinate_equals_marginal_lattice(noisy_adder):
    t = density_table(noisy_adder, InputPair([0.5, 0.5], [0.5, 0.5]))
    per = t.per_letter("d12")
    n, step, thr = 6, 0.01, 6 * 0.5
    lat = lattice_sum_distribution(per, n, step, "round_up")
    assert joint_tail(t, n, UNBOUNDED, UNBOUNDED, thr, step) == pytest.approx(cdf(lat, thr), abs=1e-12)


def test_joint_guard(noisy_adder):
    t = density_table(noisy_adder, InputPair([0.5, 0.5], [0.5, 0.5]))
    with pytest.raises(GuardExceeded):
        joint_tail(t, 50, 100.0, 100.0, 100.0, step=1e-3, guard=10**6)


def test_monte_carlo_edges(adder):
    t = density_table(adder, InputPair.uniform(adder))
    assert monte_carlo_tail(t, "d12", 5, UNBOUNDED, 1000, 0) == (1.0, 0.0)
    assert monte_carlo_tail(t, "d12", 5, 4.9 * LN2, 1000, 0)[0] == 0.0
    assert monte_carlo_tail(t, "d12", 2, 3 * LN2, 500, 11) == monte_carlo_tail(t, "d12", 2, 3 * LN2, 500, 11)
    with pytest.raises(ValueError):
        monte_carlo_tail(t, "d12", 2, 0.0, 50, 0)


def test_monte_carlo_estimate_near_exact(adder):
    t = density_table(adder, InputPair.uniform(adder))
    est, hw = monte_carlo_tail(t, "d12", 2, 3 * LN2, 10**5, 1)
    assert abs(est - 0.75) <= hw


def test_monte_carlo_coverage_battery(adder):
    t = density_table(adder, InputPair.uniform(adder))
    covered = 0
    for seed in range(100):
        est, hw = monte_carlo_tail(t, "d12", 2, 3 * LN2, 2000, seed)
        covered += abs(est - 0.75) <= hw
    assert covered / 100 >= 0.90
