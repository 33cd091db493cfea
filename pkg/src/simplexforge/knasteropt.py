"""Orient a regular simplex so its vertices share a trace-power value.

The search variable is a single rotation acting on a fixed reference simplex
scaled to the pure-state Bloch radius, so equiangularity holds exactly at
every iterate.  Levenberg-Marquardt steps live in the skew-symmetric tangent
space and are retracted with a matrix exponential; continuation scans chain
converged rotations as warm starts across nearby target values.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import blochalg, simplexgeo, tracepoly

ORTHO_DRIFT_TOL = 1e-12
_LM_DAMPING_CEIL = 1e14


@dataclass(frozen=True)
class RotationState:
    """Orthogonal matrix plus the skew parameters of its last tangent step."""

    matrix: np.ndarray
    tangent: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "RotationState":
        return cls(matrix=np.eye(n), tangent=np.zeros(n * (n - 1) // 2))


@dataclass(frozen=True)
class OptimizerConfig:
    power: int = 3
    f0: float = 0.0
    tol_residual: float = 1e-18
    max_iters: int = 500
    lm_damping: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.power < 3:
            raise ValueError(f"trace power must be >= 3, got {self.power}")
        if self.tol_residual <= 0:
            raise ValueError("tol_residual must be positive")


@dataclass
class PovmFamilyResult:
    dim: int
    f0: float
    power: int
    vertices: np.ndarray             # (n^2, n^2 - 1)
    matrices: np.ndarray             # (n^2, n, n)
    residual_sum: float
    per_vertex_residuals: np.ndarray
    spectra: np.ndarray              # (n^2, n), sorted descending
    psd_flags: list[bool]
    iterations: int
    wall_time: float
    converged: bool
    rotation: RotationState
    cost_trace: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class CircleProfile:
    dim: int
    theta_samples: np.ndarray
    trace_values: np.ndarray
    fitted_constant: float
    fitted_cos3_coefficient: float
    alpha: float
    fit_residual: float


@dataclass(frozen=True)
class KnasterS1Result:
    angles: np.ndarray
    values: np.ndarray
    common_value: float
    spread: float
    iterations: int


@dataclass(frozen=True)
class EvalContext:
    """Shared basis and cubic tensor for one Hilbert dimension."""

    basis: blochalg.GellMannBasis
    tensor: blochalg.StructureTensor

    @classmethod
    def for_dim(cls, n: int) -> "EvalContext":
        return _context_cache(n)


@lru_cache(maxsize=8)
def _context_cache(n: int) -> EvalContext:
    basis = blochalg.build_basis(n)
    return EvalContext(basis=basis, tensor=blochalg.structure_tensor(basis))


def bloch_reference_simplex(n: int) -> np.ndarray:
    """Vertices of the regular (n^2-1)-simplex at radius sqrt((n-1)/(2n))."""
    radius = np.sqrt((n - 1.0) / (2.0 * n))
    return radius * simplexgeo.regular_simplex(n * n - 1).vertices


def skew_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i < j) enumerating the skew-symmetric basis of so(n)."""
    ii, jj = np.triu_indices(n, k=1)
    return ii, jj


def skew_matrix(params: np.ndarray, n: int) -> np.ndarray:
    ii, jj = skew_pairs(n)
    a = np.zeros((n, n))
    a[ii, jj] = params
    a[jj, ii] = -params
    return a


_PADE6 = (1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0)


def expm_skew(a: np.ndarray) -> np.ndarray:
    """Matrix exponential via order-6 Pade approximation with squaring."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    norm = float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = a / (2.0 ** squarings)
    ident = np.eye(n)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (_PADE6[1] * ident + _PADE6[3] * a2 + _PADE6[5] * a4)
    v = _PADE6[0] * ident + _PADE6[2] * a2 + _PADE6[4] * a4 + _PADE6[6] * a6
    r = np.linalg.solve(v - u, v + u)
    for _ in range(squarings):
        r = r @ r
    return r


def orthogonality_defect(r: np.ndarray) -> float:
    return float(np.max(np.abs(r.T @ r - np.eye(r.shape[0]))))


def reorthonormalize(r: np.ndarray) -> np.ndarray:
    """Nearest orthogonal matrix (polar factor via SVD)."""
    u, _, vt = np.linalg.svd(r)
    return u @ vt


def align_to_vertices(ref: np.ndarray, vertices: np.ndarray) -> RotationState:
    """Rotation carrying the reference simplex onto a congruent vertex set.

    Solves the orthogonal Procrustes problem with the determinant pinned
    to +1; exact when the two configurations share their Gram matrix.
    """
    ref = np.asarray(ref, dtype=np.float64)
    v = np.asarray(vertices, dtype=np.float64)
    corr = ref.T @ v
    u, _, wt = np.linalg.svd(corr)
    if np.linalg.det(u @ wt) < 0:
        u[:, -1] = -u[:, -1]
    rot = (u @ wt).T
    n = ref.shape[1]
    return RotationState(matrix=rot, tangent=np.zeros(n * (n - 1) // 2))


def _eval_family(
    y: np.ndarray, power: int, ctx: EvalContext
) -> tuple[np.ndarray, np.ndarray]:
    """Values and gradients of the target functional at each vertex row."""
    values = np.empty(y.shape[0])
    grads = np.empty_like(y)
    if power == 3:
        for k, row in enumerate(y):
            values[k] = tracepoly.f_cubic(row, ctx.tensor)
            grads[k] = tracepoly.grad_f_cubic(row, ctx.tensor)
    else:
        for k, row in enumerate(y):
            rho = blochalg.from_bloch(row, ctx.basis)
            values[k] = tracepoly.trace_power(rho, power)
            grads[k] = tracepoly.grad_trace_power(row, power, ctx.basis)
    return values, grads


def objective(
    rot: RotationState,
    ref: np.ndarray,
    cfg: OptimizerConfig,
    ctx: EvalContext | None = None,
) -> np.ndarray:
    """Per-vertex residuals g(R p_k) - f0 over all n^2 vertices."""
    ref = np.asarray(ref, dtype=np.float64)
    n = _dim_from_reference(ref)
    ctx = ctx or EvalContext.for_dim(n)
    y = ref @ rot.matrix.T
    values, _ = _eval_family(y, cfg.power, ctx)
    return values - cfg.f0


def _dim_from_reference(ref: np.ndarray) -> int:
    nsq = ref.shape[0]
    n = int(round(np.sqrt(nsq)))
    if n * n != nsq or ref.shape[1] != nsq - 1:
        raise ValueError(f"reference simplex has shape {ref.shape}, expected (n^2, n^2-1)")
    return n


def optimize(
    start: RotationState,
    ref: np.ndarray,
    cfg: OptimizerConfig,
    ctx: EvalContext | None = None,
) -> PovmFamilyResult:
    """Levenberg-Marquardt over the rotation group for a fixed target f0.

    Steps solve (J^T J + lambda I) s = -J^T r in the skew tangent basis and
    retract with the matrix exponential; lambda halves on accepted steps and
    quadruples on rejections.  Non-convergence is reported, not raised.
    """
    t0 = time.perf_counter()
    ref = np.asarray(ref, dtype=np.float64)
    n = _dim_from_reference(ref)
    ctx = ctx or EvalContext.for_dim(n)
    nm1 = ref.shape[1]
    ii, jj = skew_pairs(nm1)
    rot = np.array(start.matrix, dtype=np.float64, copy=True)
    if orthogonality_defect(rot) > ORTHO_DRIFT_TOL:
        rot = reorthonormalize(rot)
    tangent = np.zeros(len(ii))

    y = ref @ rot.T
    values, grads = _eval_family(y, cfg.power, ctx)
    res = values - cfg.f0
    cost = float(res @ res)
    lam = cfg.lm_damping
    cost_trace = [cost]
    iterations = 0

    while cost > cfg.tol_residual and iterations < cfg.max_iters:
        jac = grads[:, ii] * y[:, jj] - grads[:, jj] * y[:, ii]
        jtj = jac.T @ jac
        jtr = jac.T @ res
        accepted = False
        while lam < _LM_DAMPING_CEIL:
            step = np.linalg.solve(jtj + lam * np.eye(len(ii)), -jtr)
            cand = expm_skew(skew_matrix(step, nm1)) @ rot
            if orthogonality_defect(cand) > ORTHO_DRIFT_TOL:
                cand = reorthonormalize(cand)
            y_c = ref @ cand.T
            values_c, grads_c = _eval_family(y_c, cfg.power, ctx)
            res_c = values_c - cfg.f0
            cost_c = float(res_c @ res_c)
            if cost_c < cost:
                rot, y, grads, res, cost = cand, y_c, grads_c, res_c, cost_c
                tangent = step
                lam = max(lam * 0.5, 1e-14)
                accepted = True
                break
            lam *= 4.0
        if not accepted:
            break
        iterations += 1
        cost_trace.append(cost)

    matrices = np.array([blochalg.from_bloch(row, ctx.basis) for row in y])
    spectra = np.array([np.sort(np.linalg.eigvalsh(m))[::-1] for m in matrices])
    psd_flags = [bool(s[-1] >= -tracepoly.PSD_EIG_TOL) for s in spectra]
    return PovmFamilyResult(
        dim=n,
        f0=cfg.f0,
        power=cfg.power,
        vertices=y,
        matrices=matrices,
        residual_sum=cost,
        per_vertex_residuals=res,
        spectra=spectra,
        psd_flags=psd_flags,
        iterations=iterations,
        wall_time=time.perf_counter() - t0,
        converged=cost <= cfg.tol_residual,
        rotation=RotationState(matrix=rot, tangent=tangent),
        cost_trace=cost_trace,
    )


def _perturbed(rot: np.ndarray, rng: np.random.Generator, scale: float) -> RotationState:
    n = rot.shape[0]
    params = scale * rng.standard_normal(n * (n - 1) // 2)
    return RotationState(
        matrix=expm_skew(skew_matrix(params, n)) @ rot, tangent=params
    )


def antipodal_start(ref: np.ndarray, start: RotationState) -> RotationState:
    """Rotation reaching the negated vertex configuration of a start.

    The negated simplex is congruent to the original and the simplex has
    orientation-reversing symmetries, so an exact SO alignment exists.  For
    odd functionals this start solves the sign-mirrored target.
    """
    ref = np.asarray(ref, dtype=np.float64)
    return align_to_vertices(ref, -(ref @ start.matrix.T))


def scan_f0(
    f0_min: float,
    f0_max: float,
    steps: int,
    cfg: OptimizerConfig,
    *,
    dim: int | None = None,
    ref: np.ndarray | None = None,
    start: RotationState | None = None,
    ctx: EvalContext | None = None,
    parallel: bool = False,
    max_workers: int | None = None,
    retries: int = 4,
    on_result=None,
) -> list[PovmFamilyResult]:
    """Solve a family of targets f0, warm-starting each from its neighbor.

    Sequentially (default) each converged rotation seeds the next target;
    failed steps retry from the stalled rotation, the two base orientations,
    and seeded perturbations before being recorded as-is.  In parallel mode
    the targets are independent jobs with per-job seeds, merged back in f0
    order.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if ref is None:
        if dim is None:
            raise ValueError("either dim or ref is required")
        ref = bloch_reference_simplex(dim)
    ref = np.asarray(ref, dtype=np.float64)
    n = _dim_from_reference(ref)
    ctx = ctx or EvalContext.for_dim(n)
    if start is None:
        start = RotationState.identity(ref.shape[1])
    targets = np.linspace(f0_min, f0_max, steps)

    if parallel:
        return _scan_parallel(
            targets, cfg, ref, start, ctx, max_workers, retries, on_result
        )

    results: list[PovmFamilyResult] = []
    current = start
    mirrored = antipodal_start(ref, start)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed)))
    for f0 in targets:
        step_cfg = replace(cfg, f0=float(f0))
        result = optimize(current, ref, step_cfg, ctx)
        attempt = 0
        while not result.converged and attempt < retries:
            attempt += 1
            if attempt == 1:
                # resume the stalled run before switching starts
                restart = result.rotation
            elif attempt == 2:
                restart = start
            elif attempt == 3:
                restart = mirrored
            else:
                restart = _perturbed(current.matrix, rng, 0.2)
            result = optimize(restart, ref, step_cfg, ctx)
        if result.converged:
            current = result.rotation
        results.append(result)
        if on_result is not None:
            on_result(result)
    return results


def _scan_parallel(targets, cfg, ref, start, ctx, max_workers, retries, on_result):
    from concurrent.futures import ThreadPoolExecutor

    seeds = np.random.SeedSequence(cfg.seed).spawn(len(targets))

    def job(index: int) -> PovmFamilyResult:
        rng = np.random.Generator(np.random.Philox(seeds[index]))
        step_cfg = replace(cfg, f0=float(targets[index]))
        result = optimize(start, ref, step_cfg, ctx)
        attempt = 0
        while not result.converged and attempt < retries:
            attempt += 1
            result = optimize(_perturbed(start.matrix, rng, 0.5), ref, step_cfg, ctx)
        return result

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(job, range(len(targets))))
    if on_result is not None:
        for result in results:
            on_result(result)
    return results


def last_vertex(matrices: np.ndarray) -> np.ndarray:
    """Close the family: the missing element is n I - sum of the others."""
    mats = np.asarray(matrices, dtype=np.complex128)
    n = mats.shape[-1]
    if mats.shape != (n * n - 1, n, n):
        raise ValueError(
            f"expected {n * n - 1} matrices of size {n}, got shape {mats.shape}"
        )
    traces = np.einsum("aii->a", mats)
    worst = float(np.max(np.abs(traces - 1.0)))
    if worst > 1e-10:
        raise ValueError(f"inputs must have unit trace: worst deviation {worst:.3e}")
    return n * np.eye(n, dtype=np.complex128) - mats.sum(axis=0)


def circle_profile(
    rho_a: np.ndarray,
    rho_b: np.ndarray,
    rho_c: np.ndarray,
    samples: int = 360,
) -> CircleProfile:
    """Trace of the cubed circle through three equiangular elements.

    Samples Tr((I/n + Omega(theta))^3) on a uniform grid, fits
    A + B cos(3 theta), and reports the cosine alpha of the triple-product
    phase.  The inputs must be unit-trace and pairwise equiangular.
    """
    if samples < 4:
        raise ValueError(f"need at least 4 samples, got {samples}")
    rhos = [np.asarray(r, dtype=np.complex128) for r in (rho_a, rho_b, rho_c)]
    n = rhos[0].shape[0]
    for r in rhos:
        if r.shape != (n, n):
            raise ValueError("circle inputs must share one square shape")
        tr = complex(np.trace(r))
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"circle inputs must have unit trace, got {tr}")
    target = 1.0 / (n + 1)
    devs = {
        (i, j): abs(complex(np.trace(rhos[i] @ rhos[j])) - target)
        for i, j in ((0, 1), (0, 2), (1, 2))
    }
    worst = max(devs.values())
    if worst > 1e-8:
        raise ValueError(
            f"inputs are not equiangular at 1/(n+1) = {target}: deviations {devs}"
        )

    triple = complex(np.trace(rhos[0] @ rhos[1] @ rhos[2]))
    if abs(triple) < 1e-15:
        raise ValueError("triple product vanishes; phase is undefined")
    alpha = triple.real / abs(triple)

    thetas = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    eye = np.eye(n, dtype=np.complex128)
    traces = np.empty(samples)
    for t, theta in enumerate(thetas):
        ca = 2.0 / 3.0 * np.cos(theta) + 1.0 / 3.0
        cb = -np.cos(theta) / 3.0 + np.sin(theta) / np.sqrt(3.0) + 1.0 / 3.0
        cc = -np.cos(theta) / 3.0 - np.sin(theta) / np.sqrt(3.0) + 1.0 / 3.0
        omega = ca * rhos[0] + cb * rhos[1] + cc * rhos[2] - eye / n
        m = eye / n + omega
        val = complex(np.trace(m @ m @ m))
        if abs(val.imag) > 1e-10:
            raise ValueError(f"circle trace has imaginary residue {val.imag:.3e}")
        traces[t] = val.real

    design = np.column_stack([np.ones(samples), np.cos(3.0 * thetas)])
    coeffs, *_ = np.linalg.lstsq(design, traces, rcond=None)
    residual = float(np.max(np.abs(design @ coeffs - traces)))
    return CircleProfile(
        dim=n,
        theta_samples=thetas,
        trace_values=traces,
        fitted_constant=float(coeffs[0]),
        fitted_cos3_coefficient=float(coeffs[1]),
        alpha=float(alpha),
        fit_residual=residual,
    )


def circle_cos3_coefficient(n: int, alpha: float) -> float:
    """Predicted cos(3 theta) coefficient for a pure equiangular triple."""
    root = np.sqrt(n + 1.0)
    return 2.0 * (2.0 * alpha + root * n - 2.0 * root) / (9.0 * (n + 1.0) ** 1.5)


def _point(theta: float) -> np.ndarray:
    return np.array([np.cos(theta), np.sin(theta)])


def knaster_s1(
    fn,
    points: int,
    tol: float = 1e-12,
    separation: float = 2.0 * np.pi / 3.0,
    sweep_samples: int = 720,
    max_iters: int = 200,
) -> KnasterS1Result:
    """Find a rigid 2- or 3-point configuration on the circle with equal values.

    fn maps a unit vector (x, y) to a real number.  The 2-point search
    bisects the value gap along a sweep between extremal orientations; the
    3-point search minimizes the spread of an equilateral triple by grid
    search plus golden-section refinement and fails if the spread cannot
    reach tol.
    """
    if points == 2:
        return _knaster_pair(fn, tol, separation, sweep_samples, max_iters)
    if points == 3:
        return _knaster_triple(fn, tol, sweep_samples, max_iters)
    raise ValueError(f"points must be 2 or 3, got {points}")


def _knaster_pair(fn, tol, separation, sweep_samples, max_iters):
    def gap(theta: float) -> float:
        return fn(_point(theta)) - fn(_point(theta + separation))

    thetas = np.linspace(0.0, 2.0 * np.pi, sweep_samples, endpoint=False)
    values = np.array([fn(_point(t)) for t in thetas])
    lo = float(thetas[np.argmin(values)])
    hi = float(thetas[np.argmax(values)])

    bracket = _gap_bracket(gap, lo, hi, tol)
    if bracket is None:
        # sweep the full circle: the gap integrates to zero, so it changes sign
        bracket = _gap_bracket(gap, 0.0, 2.0 * np.pi, tol)
    if bracket is None:
        raise ValueError("no equal-value orientation found on the sampling grid")
    a, b = bracket
    iterations = 0
    ga = gap(a)
    while iterations < max_iters:
        mid = 0.5 * (a + b)
        gm = gap(mid)
        if abs(gm) <= tol or abs(b - a) < 1e-15:
            a = b = mid
            break
        if (ga <= 0) == (gm <= 0):
            a, ga = mid, gm
        else:
            b = mid
        iterations += 1
    theta = 0.5 * (a + b)
    final = abs(gap(theta))
    if final > tol:
        raise ValueError(f"pair gap {final:.3e} did not reach tolerance {tol:.0e}")
    angles = np.array([theta, theta + separation]) % (2.0 * np.pi)
    vals = np.array([fn(_point(t)) for t in angles])
    return KnasterS1Result(
        angles=angles,
        values=vals,
        common_value=float(np.mean(vals)),
        spread=float(np.max(vals) - np.min(vals)),
        iterations=iterations,
    )


def _gap_bracket(gap, lo, hi, tol):
    ts = np.linspace(lo, hi, 257)
    gs = np.array([gap(t) for t in ts])
    small = np.abs(gs) <= tol
    if np.any(small):
        idx = int(np.argmax(small))
        return float(ts[idx]), float(ts[idx])
    signs = np.sign(gs)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if len(flips) == 0:
        return None
    k = int(flips[0])
    return float(ts[k]), float(ts[k + 1])


def _knaster_triple(fn, tol, sweep_samples, max_iters):
    offsets = np.array([0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0])

    def spread(theta: float) -> float:
        vals = [fn(_point(theta + o)) for o in offsets]
        return max(vals) - min(vals)

    thetas = np.linspace(0.0, 2.0 * np.pi / 3.0, sweep_samples, endpoint=False)
    spreads = np.array([spread(t) for t in thetas])
    best = int(np.argmin(spreads))
    theta = float(thetas[best])
    iterations = 0
    if spreads[best] > tol:
        step = thetas[1] - thetas[0]
        theta, iterations = _golden_section(
            spread, theta - step, theta + step, tol, max_iters
        )
    final = spread(theta)
    if final > tol:
        raise ValueError(f"triple spread {final:.3e} did not reach tolerance {tol:.0e}")
    angles = (theta + offsets) % (2.0 * np.pi)
    vals = np.array([fn(_point(t)) for t in angles])
    return KnasterS1Result(
        angles=angles,
        values=vals,
        common_value=float(np.mean(vals)),
        spread=float(final),
        iterations=iterations,
    )


def _golden_section(f, a, b, tol, max_iters):
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    iterations = 0
    while iterations < max_iters:
        if min(fc, fd) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
        iterations += 1
    best = c if fc <= fd else d
    return float(best), iterations
