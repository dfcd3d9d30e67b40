import math

import numpy as np
import pytest

import ucplab


def test_dirichlet_spectrum_near_squares():
    dom = ucplab.Domain(1, math.pi, "dirichlet")
    basis = ucplab.spectrum(ucplab.schrodinger(dom, 399), 10.0)
    assert len(basis) == 3
    assert np.allclose(basis.energies, [1.0, 4.0, 9.0], atol=1e-3)
    grid = ucplab.Grid(dom, 399)
    gram = basis.modes.T @ basis.modes * grid.h
    assert np.allclose(gram, np.eye(3), atol=1e-10)


def test_projection_keeps_the_span():
    dom = ucplab.Domain(1, 3.0)
    grid = ucplab.Grid(dom, 119)
    v = ucplab.random_potential(grid, 1.0, 7)
    basis = ucplab.spectrum(ucplab.schrodinger(dom, 119, v), 30.0)
    psi = basis.modes @ np.arange(1.0, len(basis) + 1)
    assert np.allclose(ucplab.project(basis, psi), psi, atol=1e-10)


def test_periodic_ratio_and_uncertainty_constant():
    dom = ucplab.Domain(1, 5.0)
    grid = ucplab.Grid(dom, 499)
    arr = ucplab.arrangement(dom, 0.2)
    assert len(arr) == 5
    w = ucplab.indicator(arr, grid)
    assert w.sum() * grid.h == pytest.approx(2.0, abs=0.02)
    assert ucplab.ratio(grid, np.ones(grid.size), arr) == pytest.approx(0.4, abs=0.01)
    basis = ucplab.spectrum(ucplab.schrodinger(dom, 499), 10.0)
    lam = ucplab.uncertainty_constant(basis, arr)
    assert 0.0 < lam <= 0.4 + 1e-9


def test_containment_error_names_the_site():
    dom = ucplab.Domain(1, 1.0)
    with pytest.raises(ValueError, match="j="):
        ucplab.arrangement(dom, 0.2, "explicit", centers=[[0.4]])


def test_bound_formulas():
    assert ucplab.sfuc_bound(0.25, K=0.0, E=1.0, N=2.0) == 0.00390625
    assert ucplab.klein_gamma(0.5, M_d=1.0) == (0.25, 0.0625)


def test_carleman_and_extension_scalars():
    assert ucplab.carleman_psi(1.0, 0.5) == pytest.approx(0.3208, abs=1e-4)
    assert ucplab.s_case(0.0, 0.7) == 0.7
    assert ucplab.s_case(4.0, 1.0) == pytest.approx(math.sinh(2.0) / 2.0, rel=1e-15)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.7, 0.7, size=(500, 2))
    assert ucplab.weight_violations(2, 1.0, 1.0, pts.tolist()) == 0


def test_extension_residual_small():
    dom = ucplab.Domain(1, 1.0)
    grid = ucplab.Grid(dom, 99)
    basis = ucplab.spectrum(ucplab.schrodinger(dom, 99), 12.0)
    l2, boundary = ucplab.extension_residual(basis, basis.modes[:, 0], np.zeros(grid.size))
    assert l2 < 1e-2
    assert boundary < 1e-3


def test_shannon_gaussian_holds():
    report = ucplab.verify_aliasing(
        lambda x: math.exp(-0.5 * x * x), lambda p: math.exp(-0.5 * p * p), 2.0, list(np.linspace(-2, 2, 101))
    )
    assert report["verdict"] == "holds"
    assert report["sup_error"] <= report["bound"] + report["truncation_allowance"]
    xs = [0.3, 1.7]
    f = lambda x: ucplab.sinc(x - 1.0)
    assert np.allclose(ucplab.reconstruct(f, 1.0, 50, xs), [f(x) for x in xs], atol=1e-14)


def test_run_experiment_csv():
    text = ucplab.run_experiment("sweep", {"L": "1,3", "delta": "0.2"})
    assert text.startswith("# ucplab experiment=sweep schema=sweep/v1")
    assert "sweep" in ucplab.experiment_names()
    with pytest.raises(ValueError, match=r"delta must be in \(0, 1/2\)"):
        ucplab.run_experiment("observability", {"delta": "0.6"})
