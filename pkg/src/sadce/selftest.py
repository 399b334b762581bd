"""Built-in oracle suites: quick independent cross-checks runnable from the CLI.

Each check pits a production path against a brute-force or closed-form
reference.  These are smoke-level versions of the full pytest suite, meant
for users verifying an installation.
"""

from __future__ import annotations

import numpy as np

from .angles import build_anti_diagonal, dft2, find_peak, refine_angles
from .baselines import dft2_naive, oracle_distance_grid
from .distance import f_vector, fit_distance, solve_t_analytic, solve_t_dense
from .geometry import (
    ArrayGeometry,
    SourceTruth,
    element_distances,
    steering_exact,
    steering_fresnel,
    synthesize_channel,
)
from .pipeline import estimate_channel
from .signals import generate_pilots, transmit
from .util import nmse


def _check_exact_distance_oracle(rng) -> tuple[bool, str]:
    geom = ArrayGeometry.quarter_wave(21, 21, 0.03)
    u, v, r = 0.4, -0.3, 6.0
    w = np.sqrt(1.0 - u * u - v * v)
    user = r * np.array([w, v, u])
    m_y, m_z = geom.offsets()
    antennas = np.stack(
        [np.zeros(geom.element_count), m_y * geom.spacing, -m_z * geom.spacing], axis=1
    )
    reference = np.linalg.norm(antennas - user[None, :], axis=1)
    err = float(np.abs(reference - element_distances(geom, u, v, r)).max())
    return err < 1e-12, f"element distances vs 3-D coordinates, max err {err:.2e}"

def _check_fresnel_vs_exact(rng) -> tuple[bool, str]:
    geom = ArrayGeometry.quarter_wave(41, 41, 0.03)
    bf = steering_fresnel(geom, 0.5, 0.5, 3.0)
    be = steering_exact(geom, 0.5, 0.5, 3.0)
    err = float(np.abs(np.angle(bf * np.conj(be))).max())
    return err < 0.2, f"wavefront-model phase gap at 3 m, max {err:.3f} rad"


def _check_dft_oracle(rng) -> tuple[bool, str]:
    data = rng.standard_normal((41, 41)) + 1j * rng.standard_normal((41, 41))
    err = float(np.abs(dft2(data) - dft2_naive(data)).max())
    return err < 1e-9, f"fast vs direct 2-D DFT, max err {err:.2e}"


def _check_solver_equivalence(rng) -> tuple[bool, str]:
    geom = ArrayGeometry.quarter_wave(9, 9, 0.03)
    h = rng.standard_normal(81) + 1j * rng.standard_normal(81)
    analytic = solve_t_analytic(h, 0.2, -0.1, geom)
    dense = solve_t_dense(h, 0.2, -0.1, geom, ridge=1e-6)
    gap = nmse(dense, analytic)
    phase_gap = float(np.abs(np.angle(dense * np.conj(analytic))).max())
    ok = gap < 1e-6 and phase_gap < 1e-9
    return ok, f"analytic vs ridge solve, NMSE {gap:.2e}, phase gap {phase_gap:.2e}"


def _check_distance_oracle(rng) -> tuple[bool, str]:
    geom = ArrayGeometry.quarter_wave(41, 41, 0.03)
    src = SourceTruth(u=0.3, v=0.2, r=5.2, gain=np.exp(0.7j))
    h = synthesize_channel(geom, src)
    block = transmit(h, generate_pilots(1), 10.0 ** (-20.0 / 10.0), rng)
    from .signals import ls_channel_estimate

    t_hat = solve_t_analytic(ls_channel_estimate(block), src.u, src.v, geom)
    f = f_vector(geom, src.u, src.v)
    fitted = fit_distance(t_hat, f).r_hat
    gridded = oracle_distance_grid(t_hat, f)
    gap = abs(fitted - gridded)
    return gap <= 2e-3, f"closed-form vs gridded range fit, gap {gap * 1e3:.2f} mm"


def _check_pipeline_exactness(rng) -> tuple[bool, str]:
    geom = ArrayGeometry.quarter_wave(41, 41, 0.03)
    src = SourceTruth(u=8.0 / 41.0, v=-6.0 / 41.0, r=5.0, gain=0.8 - 0.4j)
    h = synthesize_channel(geom, src)
    block = transmit(h, generate_pilots(1), 0.0)
    est = estimate_channel(block, geom)
    err_db = 10.0 * np.log10(max(nmse(est.h_hat, h), 1e-300))
    ok = abs(est.u_hat - src.u) < 1e-9 and abs(est.r_hat - src.r) / src.r < 1e-6 and err_db <= -100.0
    return ok, f"noiseless on-grid pipeline, NMSE {err_db:.0f} dB"


def _check_angle_refinement(rng) -> tuple[bool, str]:
    geom = ArrayGeometry.quarter_wave(41, 41, 0.03)
    worst = 0.0
    for _ in range(20):
        while True:
            u, v = rng.uniform(-1.0, 1.0, size=2)
            if u * u + v * v <= 0.95:
                break
        src = SourceTruth(u=float(u), v=float(v), r=float(rng.uniform(4.0, 20.0)))
        r_a = build_anti_diagonal(synthesize_channel(geom, src), geom)
        est = refine_angles(r_a, find_peak(dft2(r_a)), geom)
        worst = max(worst, abs(est.u - src.u), abs(est.v - src.v))
    bound = 2.0 / (41 * 64)
    return worst <= bound, f"off-grid refinement, worst err {worst:.2e} vs bound {bound:.2e}"


CHECKS = (
    ("exact-distance-oracle", _check_exact_distance_oracle),
    ("fresnel-validity", _check_fresnel_vs_exact),
    ("dft-double-sum", _check_dft_oracle),
    ("range-solver-equivalence", _check_solver_equivalence),
    ("range-grid-oracle", _check_distance_oracle),
    ("noiseless-pipeline", _check_pipeline_exactness),
    ("angle-refinement", _check_angle_refinement),
)


def run(seed: int = 12345) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for name, check in CHECKS:
        ok, detail = check(rng)
        status = "ok " if ok else "FAIL"
        print(f"{status} {name}: {detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} of {len(CHECKS)} checks failed")
        return 1
    print(f"all {len(CHECKS)} checks passed")
    return 0
