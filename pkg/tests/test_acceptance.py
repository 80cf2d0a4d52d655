"""Acceptance criteria, each at its pinned tolerance.

Every test prints one ``PASS``/``FAIL`` line before asserting, so the
summary is readable in ``pytest -v`` output even when a criterion fails.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from herdlab import (
    Frame,
    IntegratorSettings,
    PursuitParams,
    StabilityClass,
    classify,
    detect_convergence,
    eigenvalues_circular,
    equilibrium_region,
    integrate,
    lyapunov_seed,
    omega_for_radius,
    pi_roa,
    simulate,
    solve_circular,
    solve_spiral,
    stable_equilibrium,
)
from herdlab.cli import load_scenario, verify_pi_roa
from herdlab.dynamics import make_rhs
from herdlab.equilibria import circular_roots, equilibrium_residuals
from herdlab.model import CIRCULAR_RATIO_BOUND, convert_states, spiral_kappa_bound

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture
def verdict(capsys):
    """Print ``PASS``/``FAIL`` for a criterion, then assert it."""

    def emit(number, ok, detail, elapsed, budget):
        ok = bool(ok) and elapsed < budget
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail} "
                  f"({elapsed:.2f} s of {budget:g} s)")
        assert ok, detail

    return emit


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_1_spiral_golden(verdict):
    t0 = time.perf_counter()
    a = solve_spiral(PursuitParams(1.0, 1.0, 2.0, 2.0, 1.0))[0]
    b = solve_spiral(PursuitParams(1.0, 1.0, 2.0, 5.0, 1.0))[0]
    checks = [
        abs(a.r_star - 0.4458) < 1e-3, abs(a.R_star - 1.149) < 1e-3,
        abs(a.psi_star - 1.1728) < 1e-3,
        abs(b.r_star - 0.2434) < 1e-3, abs(b.R_star - 0.9385) < 1e-3,
    ]
    detail = (f"w=2: r*={a.r_star:.6f} R*={a.R_star:.6f} psi*={a.psi_star:.6f}; "
              f"w=5: r*={b.r_star:.6f} R*={b.R_star:.6f}")
    verdict(1, all(checks), detail, time.perf_counter() - t0, 1.0)


def test_criterion_2_circular_golden(verdict):
    t0 = time.perf_counter()
    p = PursuitParams.circular(1.0, 2.0, 1.0)
    roots, eq1, eq2 = solve_circular(p)
    cubic = lambda r: r ** 3 - 4.0 * r + 1.0  # noqa: E731
    r1_oracle = _bisect(cubic, 2.0 / math.sqrt(3.0), 2.0)
    ok = (abs(eq2.r_star - 0.2541) < 5e-4 and abs(eq2.psi_star - 1.4434) < 5e-4
          and abs(eq1.r_star - r1_oracle) < 5e-4 and abs(eq1.r_star - 1.8608) < 5e-4)
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(1000):
        R = rng.uniform(0.2, 10.0)
        k = rng.uniform(0.01, 10.0)
        ratio = rng.uniform(1e-4, 1.0 - 1e-9) * CIRCULAR_RATIO_BOUND
        q = PursuitParams.circular(k, R, k / (ratio * R ** 3))
        c = circular_roots(q)
        if not R > c.r_s1 > R / math.sqrt(3.0) > c.r_s2 > 0.0 > c.r_s3:
            bad += 1
    detail = (f"r_s2={eq2.r_star:.6f} psi_s2={eq2.psi_star:.6f} r_s1={eq1.r_star:.6f} "
              f"(bisection {r1_oracle:.6f}); ordering violations {bad}/1000")
    verdict(2, ok and bad == 0, detail, time.perf_counter() - t0, 5.0)


def test_criterion_3_stability(verdict):
    t0 = time.perf_counter()
    p = PursuitParams.circular(1.0, 2.0, 1.0)
    _, eq1, eq2 = solve_circular(p)
    key = lambda z: (z.real, z.imag)  # noqa: E731
    ok = True
    gaps = []
    for eq, expected_cls in ((eq2, StabilityClass.ASYMPTOTICALLY_STABLE),
                             (eq1, StabilityClass.SADDLE)):
        closed = sorted(eigenvalues_circular(p, eq.r_star), key=key)
        v = classify(p, eq)
        numeric = sorted(v.eigenvalues, key=key)
        gaps.append(max(abs(x - y) for x, y in zip(closed, numeric)))
        ok &= v.cls is expected_cls
    s2 = sorted(eigenvalues_circular(p, eq2.r_star), key=key)
    s1 = sorted(eigenvalues_circular(p, eq1.r_star), key=key)
    ok &= abs(s2[0] - complex(-0.0640, -0.9813)) < 1e-3
    ok &= abs(s2[1] - complex(-0.0640, 0.9813)) < 1e-3
    ok &= abs(s1[0] - (-4.9427)) < 1e-3 and abs(s1[1] - 2.4045) < 1e-3
    ok &= max(gaps) < 1e-5
    sp = PursuitParams(1.0, 1.0, 2.0, 2.0, 1.0)
    eq = stable_equilibrium(sp)
    margins = [classify(sp, eq, n).margin for n in (1, 2, 3)]
    ok &= all(m < 0 for m in margins)
    detail = (f"r_s2 {s2[1]:.5f}, r_s1 ({s1[1].real:.5f}, {s1[0].real:.5f}); "
              f"closed vs numeric gap {max(gaps):.1e}; spiral margins n=1..3 "
              + ", ".join(f"{m:.4f}" for m in margins))
    verdict(3, ok, detail, time.perf_counter() - t0, 10.0)


def _final_error(name, target):
    cfg = load_scenario(SCENARIOS / name)
    traj = simulate(cfg.params, cfg.initial_state(), cfg.integrator)
    final = traj.to_frame(Frame.ROTATING_POLAR).states[-1].reshape(-1, 2)
    return np.hypot(final[:, 0] - target[0], final[:, 1] - target[1]), final


def test_criterion_4_simulation(verdict):
    t0 = time.perf_counter()
    e1, _ = _final_error("spiral_single.yaml", (0.4458, 1.1728))
    e2, f2 = _final_error("spiral_two_evaders.yaml", (0.4458, 1.1728))
    e3, _ = _final_error("circular_three_evaders.yaml", (0.2541, 1.4434))
    spread = float(np.max(np.abs(f2[1] - f2[0])))
    ok = e1.max() < 1e-3 and e2.max() < 1e-3 and spread < 1e-3 and e3.max() < 1e-3
    detail = (f"single {e1.max():.1e}, two-evader {e2.max():.1e} (spread {spread:.1e}), "
              f"circular three-evader {e3.max():.1e}")
    verdict(4, ok, detail, time.perf_counter() - t0, 30.0)


def test_criterion_5_omega_sweep(verdict):
    t0 = time.perf_counter()
    base = PursuitParams.circular(1.0, 2.0, 1.0)
    s2, s1 = [], []
    for w in (10.0, 1e2, 1e3, 1e4):
        roots = circular_roots(base.replace(omega=w))
        s2.append(roots.r_s2)
        s1.append(roots.r_s1)
    ok = (all(np.diff(s2) < 0) and all(np.diff(s1) > 0) and s2[-1] < 1e-3 * base.R
          and base.R - s1[-1] < 1e-3 * base.R)
    worst = 0.0
    for target in (0.2, 0.1, 0.05, 0.01):
        w = omega_for_radius(base, target)
        back = solve_circular(base.replace(omega=w))[2].r_star
        worst = max(worst, abs(back - target) / target)
    ok &= worst < 1e-9
    detail = (f"r_s2(1e4)={s2[-1]:.3e}, R-r_s1(1e4)={base.R - s1[-1]:.3e}, "
              f"round-trip rel error {worst:.1e}")
    verdict(5, ok, detail, time.perf_counter() - t0, 1.0)


def test_criterion_6_roa(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        M = rng.normal(size=(2, 2))
        J = M - (np.max(np.linalg.eigvals(M).real) + rng.uniform(0.05, 2.0)) * np.eye(2)
        A = lyapunov_seed(J, normalize=False)
        worst = max(worst, np.linalg.norm(A @ J + J.T @ A + np.eye(2)))
    p = PursuitParams(1.0, 1.0, 2.0, 2.0, 1.0)
    eq = stable_equilibrium(p)
    region = equilibrium_region(p, eq)
    contains = region.contains_circle(1.0)
    settings = IntegratorSettings(t_end=80.0)
    converged = 0
    for psi in np.linspace(-math.pi, math.pi, 100, endpoint=False):
        traj = simulate(p, [math.cos(psi), math.sin(psi)], settings)
        rep = detect_convergence(traj, eq, 1e-3, 2 * p.period)
        converged += rep.converged
    ok = worst < 1e-10 and contains and converged == 100
    detail = (f"Lyapunov residual {worst:.1e}; certified area {region.area:.4f}, "
              f"contains r=1 circle: {contains}; circle starts converged {converged}/100")
    verdict(6, ok, detail, time.perf_counter() - t0, 300.0)


def test_criterion_7_pi_roa(verdict):
    t0 = time.perf_counter()
    p = PursuitParams.circular(1.0, 2.0, 1.0)
    res = pi_roa(p)
    check = verify_pi_roa(p, res.r_max, 32, 64)
    ok = res.r_max > 0 and check["all_converged"]
    detail = (f"r_max={res.r_max:.5f}; converged {check['converged']}/{check['total']}, "
              f"worst final error {check['worst_final_error']:.1e}")
    verdict(7, ok, detail, time.perf_counter() - t0, 600.0)


def test_criterion_8_properties(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    notes = []
    # equilibrium residuals and r* < R*
    worst_res, radius_ok = 0.0, True
    for _ in range(200):
        k1, R = rng.uniform(0.5, 3.0), rng.uniform(0.8, 5.0)
        if 2 * k1 * k1 * R * R <= 1.2:
            continue
        p = PursuitParams(rng.uniform(0.1, 3.0), k1, R, rng.uniform(0.5, 20.0),
                          rng.uniform(0.05, 0.95) * spiral_kappa_bound(k1, R))
        for eq in solve_spiral(p):
            worst_res = max(worst_res, *map(abs, equilibrium_residuals(p, eq.r_star,
                                                                        eq.psi_star)))
            radius_ok &= eq.r_star < eq.R_star
        q = PursuitParams.circular(p.k, R, p.k / (rng.uniform(0.01, 0.99)
                                                  * CIRCULAR_RATIO_BOUND * R ** 3))
        for eq in solve_circular(q)[1:]:
            worst_res = max(worst_res, *map(abs, equilibrium_residuals(q, eq.r_star,
                                                                        eq.psi_star)))
    notes.append(f"residual {worst_res:.1e}")
    ok = worst_res < 1e-9 and radius_ok

    # frame consistency
    rel = 1e-9
    st = IntegratorSettings(t_end=5.0, method="rk45", record_every=0.5, rel_tol=rel,
                            abs_tol=rel * 1e-3)
    xy0 = np.array([0.7071, 0.7071, -0.3535, 0.3535])
    p = PursuitParams(1.0, 1.0, 2.0, 2.0, float(np.hypot(*xy0[:2])))
    out = {}
    for frame in Frame:
        s0 = convert_states(xy0, 0.0, p.omega, Frame.FIXED_CARTESIAN, frame)
        traj = integrate(make_rhs(p, frame), s0, st, frame=frame, params=p)
        out[frame] = traj.to_frame(Frame.FIXED_CARTESIAN).states
    spread = max(np.max(np.abs(v - out[Frame.ROTATING_CARTESIAN])) for v in out.values())
    ok &= spread < 10 * rel
    notes.append(f"frame spread {spread:.1e}")

    # RK4 Richardson ratio on x'' = -x
    lin = lambda t, s: np.array([s[1], -s[0]])  # noqa: E731
    exact = np.array([math.cos(1.0), -math.sin(1.0)])
    errs = [np.linalg.norm(integrate(lin, [1.0, 0.0],
                                     IntegratorSettings(t_end=1.0, step=h)).states[-1] - exact)
            for h in (0.1, 0.05)]
    ratio = errs[0] / errs[1]
    ok &= abs(ratio - 16.0) <= 1.0
    notes.append(f"Richardson {ratio:.3f}")

    # index-0 independence
    st = IntegratorSettings(t_end=10.0)
    sp = PursuitParams(1.0, 1.0, 2.0, 2.0, 1.0)
    alone = simulate(sp, [0.7071, 0.7071], st)
    crowd = simulate(sp, [0.7071, 0.7071, -0.3535, 0.3535, 0.1, -0.6], st)
    exact_match = np.array_equal(alone.states, crowd.states[:, :2])
    ok &= exact_match
    notes.append(f"index-0 exact {exact_match}; r*<R* {radius_ok}")
    verdict(8, ok, "; ".join(notes), time.perf_counter() - t0, 60.0)
