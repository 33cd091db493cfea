"""Acceptance suite: one test per shipped criterion, one printed line each."""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from simplexforge import blochalg, certify, knasteropt as ko
from simplexforge import simplexgeo, tracepoly, whsic

from conftest import random_hermitian
from test_tracepoly import cubic_poly_dimension_three


@contextmanager
def criterion(number, label):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:02d} FAIL {label}")
        raise
    elapsed = (time.perf_counter() - start) * 1e3
    print(f"ACCEPTANCE {number:02d} PASS {label} ({elapsed:.1f} ms)")


@pytest.fixture(scope="module")
def d3_scan(sic_start3):
    cfg = ko.OptimizerConfig(power=3, tol_residual=1e-18, max_iters=500, seed=0)
    return ko.scan_f0(-2.0 / 9.0, 2.0 / 9.0, 101, cfg, dim=3, start=sic_start3)


@pytest.fixture(scope="module")
def d4_scans():
    out = {}
    for power, lo, hi in ((3, 0.0, 0.33), (4, 0.42, 0.95)):
        cfg = ko.OptimizerConfig(power=power, tol_residual=1e-18, seed=0)
        out[power] = ko.scan_f0(lo, hi, 12, cfg, dim=4)
    return out


def test_criterion_01_simplex_fixtures():
    with criterion(1, "printed simplex coordinates at 1e-12, under 1 ms"):
        v2 = np.array([[np.sqrt(3) / 2, 0.5], [-np.sqrt(3) / 2, 0.5], [0, -1.0]])
        v3 = np.array(
            [
                [np.sqrt(6) / 3, np.sqrt(2) / 3, 1 / 3],
                [-np.sqrt(6) / 3, np.sqrt(2) / 3, 1 / 3],
                [0, -np.sqrt(8) / 3, 1 / 3],
                [0, 0, -1.0],
            ]
        )
        simplexgeo.regular_simplex(3)  # warm-up
        best = min(
            _timed(lambda: (simplexgeo.regular_simplex(2), simplexgeo.regular_simplex(3)))
            for _ in range(5)
        )
        assert np.max(np.abs(simplexgeo.regular_simplex(2).vertices - v2)) <= 1e-12
        assert np.max(np.abs(simplexgeo.regular_simplex(3).vertices - v3)) <= 1e-12
        assert best < 1e-3, f"construction took {best * 1e3:.3f} ms"


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def test_criterion_02_basis_laws(rng):
    with criterion(2, "orthogonality and completeness for n in 2..6 at 1e-12"):
        t0 = time.perf_counter()
        for n in range(2, 7):
            basis = blochalg.build_basis(n)
            gram = np.einsum("aij,bji->ab", basis.matrices, basis.matrices)
            assert np.max(np.abs(gram - 2.0 * np.eye(basis.size))) <= 1e-12
            h = random_hermitian(rng, n)
            h -= np.trace(h) / n * np.eye(n)
            coeffs = 0.5 * np.einsum("ij,aji->a", h, basis.matrices)
            rebuilt = np.einsum("a,aij->ij", coeffs, basis.matrices)
            assert np.max(np.abs(rebuilt - h)) <= 1e-12
        assert time.perf_counter() - t0 < 1.0


def test_criterion_03_cubic_oracle(tensor3, rng):
    with criterion(3, "cubic form equals the printed 8-variable polynomial, 1000 points"):
        t0 = time.perf_counter()
        for _ in range(1000):
            v = rng.uniform(-1.0, 1.0, 8)
            assert abs(
                tracepoly.f_cubic(v, tensor3) - cubic_poly_dimension_three(v)
            ) <= 1e-12
        assert time.perf_counter() - t0 < 1.0


def test_criterion_04_sic_seed(seed3, tensor3):
    with criterion(4, "seed SIC: overlaps, radius, cubic value, triple-product sum"):
        t0 = time.perf_counter()
        projs = seed3.projectors
        for a in range(9):
            for b in range(a + 1, 9):
                assert abs(np.trace(projs[a] @ projs[b]) - 0.25) <= 1e-12
        radius = np.sqrt(1.0 / 3.0)
        for v in seed3.bloch_vertices:
            assert abs(np.linalg.norm(v) - radius) <= 1e-12
            assert abs(tracepoly.f_cubic(v, tensor3) - 2.0 / 9.0) <= 1e-10
        assert abs(whsic.triple_product_sum(projs) - 81.0) <= 1e-8
        ok, dev = whsic.verify_sic(seed3, tol=1e-12)
        assert ok, dev
        assert time.perf_counter() - t0 < 1.0


def test_criterion_05_d3_generalized_family(d3_scan):
    with criterion(5, "101-target d=3 scan: >=99 at 1e-16 with matched spectra"):
        converged = [r for r in d3_scan if r.converged and r.residual_sum <= 1e-16]
        assert len(converged) >= 99, f"only {len(converged)} of 101 converged"
        assert max(r.wall_time for r in d3_scan) < 10.0
        for result in converged:
            assert np.max(np.abs(result.spectra - result.spectra[0])) <= 1e-8


def test_criterion_06_d4_experiments(d4_scans):
    with criterion(6, "d=4 families for cubic and quartic targets at 1e-14"):
        for power, results in d4_scans.items():
            good = [r for r in results if r.converged and r.residual_sum <= 1e-14]
            assert len(good) >= 10, f"power {power}: only {len(good)} targets"
            assert len({r.f0 for r in good}) >= 10
            assert max(r.wall_time for r in results) < 60.0
            for r in good:
                assert r.vertices.shape == (16, 15)


def test_criterion_07_continuity_circle(seed3):
    with criterion(7, "circle fit A + B cos(3 theta), B = 0 exactly at alpha = -1"):
        t0 = time.perf_counter()
        p = seed3.projectors
        flat = ko.circle_profile(p[0], p[1], p[2], samples=240)
        assert flat.alpha == pytest.approx(-1.0, abs=1e-10)
        assert abs(flat.fitted_cos3_coefficient) <= 1e-9
        assert flat.fit_residual <= 1e-9
        assert abs(flat.trace_values[0] - 1.0) <= 1e-10
        generic = ko.circle_profile(p[0], p[1], p[3], samples=240)
        assert abs(generic.alpha + 1.0) > 1e-6
        assert abs(generic.fitted_cos3_coefficient) > 1e-9
        predicted = ko.circle_cos3_coefficient(3, generic.alpha)
        assert abs(generic.fitted_cos3_coefficient - predicted) <= 1e-9
        assert generic.fit_residual <= 1e-9
        assert abs(generic.trace_values[0] - 1.0) <= 1e-10
        assert time.perf_counter() - t0 < 1.0


def test_criterion_08_gradient_suite(rng):
    with criterion(8, "analytic gradients vs central differences at 1e-6 relative"):
        h = 1e-5
        for n in (3, 4):
            basis = blochalg.build_basis(n)
            tensor = blochalg.structure_tensor(basis)
            for _ in range(100):
                v = rng.uniform(-0.7, 0.7, basis.size)
                grad_cubic = tracepoly.grad_f_cubic(v, tensor)
                grad_power = tracepoly.grad_trace_power(v, 4, basis)
                for j in rng.choice(basis.size, size=2, replace=False):
                    plus, minus = v.copy(), v.copy()
                    plus[j] += h
                    minus[j] -= h
                    fd_cubic = (
                        tracepoly.f_cubic(plus, tensor) - tracepoly.f_cubic(minus, tensor)
                    ) / (2 * h)
                    fd_power = (
                        tracepoly.trace_power(blochalg.from_bloch(plus, basis), 4)
                        - tracepoly.trace_power(blochalg.from_bloch(minus, basis), 4)
                    ) / (2 * h)
                    assert abs(grad_cubic[j] - fd_cubic) <= 1e-6 * max(1.0, abs(fd_cubic))
                    assert abs(grad_power[j] - fd_power) <= 1e-6 * max(1.0, abs(fd_power))


def test_criterion_09_knaster_demo():
    with criterion(9, "threefold-symmetric cubic equalizes every equilateral triple"):
        t0 = time.perf_counter()
        fn = lambda p: 3.0 * p[0] ** 2 * p[1] - p[1] ** 3
        result = ko.knaster_s1(fn, points=3, tol=1e-12)
        assert result.spread <= 1e-12
        offsets = (0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0)
        for theta in np.linspace(0.0, 2.0 * np.pi, 360, endpoint=False):
            vals = [fn(np.array([np.cos(theta + o), np.sin(theta + o)])) for o in offsets]
            assert max(vals) - min(vals) <= 1e-12
        assert time.perf_counter() - t0 < 1.0


def test_criterion_10_stabilizer_and_reduction(rng):
    with criterion(10, "vertex-fixing rotations and sphere reductions at N=8"):
        t0 = time.perf_counter()
        simplex = simplexgeo.regular_simplex(8)
        gram = simplexgeo.gram_matrix(simplex.vertices)
        from conftest import random_special_orthogonal

        for k in range(1, 8):
            small = random_special_orthogonal(rng, 8 - k)
            u = simplexgeo.stabilizer_rotation(simplex, k, small)
            moved = simplex.vertices @ u.T
            assert np.max(np.abs(moved[:k] - simplex.vertices[:k])) <= 1e-12
            assert np.max(np.abs(simplexgeo.gram_matrix(moved) - gram)) <= 1e-12
        for i in range(1, 9):
            reduced = [
                simplexgeo.reduce_to_sphere(simplex.vertices[j], simplex, i)
                for j in range(i - 1, 9)
            ]
            target = -1.0 / (8 - i + 1)
            for r in reduced:
                assert abs(np.linalg.norm(r) - 1.0) <= 1e-10
            for a in range(len(reduced)):
                for b in range(a + 1, len(reduced)):
                    assert abs(reduced[a] @ reduced[b] - target) <= 1e-10
        assert time.perf_counter() - t0 < 1.0


def test_criterion_11_last_vertex_closure(d3_scan):
    with criterion(11, "closure element matches the final vertex and its purity defect"):
        checked = 0
        for result in d3_scan[::10]:
            if not result.converged:
                continue
            rebuilt = ko.last_vertex(result.matrices[:8])
            assert np.max(np.abs(rebuilt - result.matrices[8])) <= 1e-10
            defect_rebuilt = tracepoly.purity_defect(rebuilt)
            defect_stored = tracepoly.purity_defect(result.matrices[8])
            assert abs(defect_rebuilt - defect_stored) <= 1e-10
            checked += 1
        assert checked >= 8
