import numpy as np
import pytest

from swssb import models
from swssb.states import charge_operator, z2_generator


def test_xx_chain_conserves_charge():
    h = models.xx_chain(5, 0.7, 1.3)
    q = charge_operator(5)
    assert np.allclose(h @ q, q @ h)
    assert np.allclose(h, h.conj().T)


def test_free_fermion_spectrum_two_sites():
    # two sites, one particle: hopping splits into +-t, staggered field shifts by +-m/2
    t, m = 0.6, 0.8
    h = models.xx_chain(2, t, m, periodic=False)
    e = np.linalg.eigvalsh(h[np.ix_([1, 2], [1, 2])])
    assert np.allclose(e, [-np.hypot(t, m), np.hypot(t, m)])


def test_classical_ising_parity():
    h = models.classical_ising_chain(4)
    assert np.allclose(h @ z2_generator(4), z2_generator(4) @ h)
    assert np.linalg.eigvalsh(h)[0] == pytest.approx(-4)


def test_gaps():
    n = 8
    h = models.xx_chain(n, 0.5, 4.0)
    assert models.charge_gap(h, n, n // 2) == pytest.approx(4.0, rel=0.05)
    # GHZ+ and GHZ- are degenerate on the classical ring
    assert models.parity_gap(models.classical_ising_chain(4), 4) == pytest.approx(0, abs=1e-12)


def test_mean_charge_limits():
    n = 4
    h = models.xx_chain(n, 0.5, 1.0)
    assert models.mean_charge(h, n, 0.0, 0.0) == pytest.approx(n / 2)
    assert models.mean_charge(h, n, 10.0, 50.0) == pytest.approx(n, abs=1e-6)
