import math

import numpy as np
import pytest

from fbmac import kernels

BACKENDS = kernels.backends()


@pytest.fixture(params=sorted(BACKENDS))
def impl(request):
    return BACKENDS[request.param]


def test_selected_backend_is_reported():
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("n,k", [(1, 1), (3, 1), (4, 2), (5, 3), (6, 4)])
def test_composition_sums_cover_every_composition(impl, n, k):
    values = np.arange(1, k + 1, dtype=float) * 10.0 ** np.arange(k)
    logp = np.log(np.full(k, 1.0 / k))
    sums, logw = impl.composition_sums(values, logp, n)
    assert sums.size == math.comb(n + k - 1, k - 1)
    # values are digit-separated, so each composition has a distinct sum
    assert np.unique(sums).size == sums.size
    assert math.fsum(np.exp(logw)) == pytest.approx(1.0, abs=1e-12)


def test_backends_agree_on_compositions():
    rng = np.random.default_rng(3)
    values = rng.normal(size=4)
    logp = np.log(rng.dirichlet(np.ones(4)))
    outs = [b.composition_sums(values, logp, 9) for b in BACKENDS.values()]
    for s, w in outs[1:]:
        np.testing.assert_allclose(s, outs[0][0], rtol=0, atol=1e-12)
        np.testing.assert_allclose(w, outs[0][1], rtol=0, atol=1e-12)


def test_merge_sorted(impl):
    v = np.array([0.0, 5e-13, 1.0, 1.0 + 2e-12, 3.0])
    p = np.array([0.1, 0.2, 0.3, 0.1, 0.3])
    mv, mp = impl.merge_sorted(v, p, 1e-12)
    np.testing.assert_array_equal(mv, [0.0, 1.0, 1.0 + 2e-12, 3.0])
    np.testing.assert_allclose(mp, [0.3, 0.3, 0.1, 0.3], atol=1e-15)


def test_lattice_power_matches_repeated_numpy_convolve(impl):
    shifts = np.array([0, 2, 5])
    probs = np.array([0.5, 0.3, 0.2])
    dense = np.zeros(6)
    dense[shifts] = probs
    ref = np.ones(1)
    for _ in range(7):
        ref = np.convolve(ref, dense)
    np.testing.assert_allclose(impl.lattice_power(shifts, probs, 7), ref, atol=1e-15)


def test_lattice_power_3d_truncates_box(impl):
    shifts = np.array([[0, 0, 0], [1, 0, 1], [0, 1, 1]])
    probs = np.array([0.2, 0.5, 0.3])
    full = impl.lattice_power_3d(shifts, probs, 3, (4, 4, 7))
    assert math.fsum(full.ravel()) == pytest.approx(1.0, abs=1e-14)
    cut = impl.lattice_power_3d(shifts, probs, 3, (2, 2, 3))
    np.testing.assert_allclose(cut, full[:2, :2, :3], atol=1e-15)


def test_backends_agree_on_ml_masses():
    rng = np.random.default_rng(5)
    lik = rng.dirichlet(np.ones(3), size=(3, 2, 4))  # [m1, m2, n, y]
    outs = [b.ml_error_masses(lik, 1e-12) for b in BACKENDS.values()]
    for err, tot in outs:
        np.testing.assert_allclose(tot, 1.0, atol=1e-12)
        np.testing.assert_allclose(err, outs[0][0], atol=1e-12)
