"""Acceptance suite: the six release criteria, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they
complete; without -s pytest shows them for failing criteria only.
"""

import json
import time

from fockwarp.checks import (
    check_exact_suite,
    check_negative_controls,
    check_sector_scaling,
    run_convergence_suite,
)
from fockwarp.cli import parse_config
from fockwarp.quadrature import collapse_guard


def cfg(**kw):
    return parse_config(json.dumps(kw))


def _line(num, ok, text):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} — {text}")
    return ok


def _exact_instances(m):
    t0 = time.perf_counter()
    res1 = check_exact_suite(cfg(n=1, M=8, N_max=2, m=m))
    res2 = check_exact_suite(cfg(n=2, M=4, N_max=2, m=m))
    dt = time.perf_counter() - t0
    bad = [r["name"] for r in res1 + res2 if not r["pass"]]
    return res1 + res2, bad, dt


def test_criterion_1_exact_suite():
    results, bad, dt = _exact_instances(m=0.0)
    worst = max(r["residual"] / r["tol"] for r in results)
    ok = not bad and dt < 30.0
    assert _line(
        1, ok,
        f"exact identity suite: {len(results)} identities on (n=1,M=8) and "
        f"(n=2,M=4), worst residual {worst:.2e} of its tolerance, {dt:.1f}s",
    ), f"failing items: {bad}, runtime {dt:.1f}s"


def test_criterion_2_quadrature_guard():
    t0 = time.perf_counter()
    out = collapse_guard()
    dt = time.perf_counter() - t0
    ok = out["max_error"] <= 1e-3 and dt < 60.0
    assert _line(
        2, ok,
        f"oscillatory-quadrature guard: max error {out['max_error']:.3e} "
        f"<= 1e-3 over {out['grid_points']} nodes, {dt:.1f}s",
    ), out


def _convergence(m):
    t0 = time.perf_counter()
    results = run_convergence_suite(cfg(m=m))
    dt = time.perf_counter() - t0
    bad = [r["name"] for r in results if not r["pass"]]
    return results, bad, dt


def _order_text(results):
    parts = []
    for r in results:
        o = r["fitted_order"]
        parts.append(f"{r['name'].replace('check_', '')}={o if o == 'exact' else f'{o:+.2f}'}")
    return ", ".join(parts)


def test_criterion_3_convergence_suite():
    results, bad, dt = _convergence(m=0.0)
    ok = not bad and len(results) == 6 and dt < 300.0
    assert _line(
        3, ok,
        f"six refinement studies decrease with orders {_order_text(results)}, {dt:.1f}s",
    ), f"failing checks: {bad}, runtime {dt:.1f}s"


def test_criterion_4_sector_scaling():
    out = check_sector_scaling(cfg())
    ok = out["pass"] and out["target_ratio"] == 4.0
    assert _line(
        4, ok,
        f"two-particle/one-particle sector ratio {out['sector_ratio']:.4f} "
        f"vs exact target 4 (tolerance 10%)",
    ), out


def test_criterion_5_massive_reruns():
    results, bad_e, dt_e = _exact_instances(m=0.5)
    conv, bad_c, dt_c = _convergence(m=0.5)
    ok = not bad_e and not bad_c and dt_e < 30.0 and dt_c < 300.0
    assert _line(
        5, ok,
        f"criteria 1 and 3 rerun at m=0.5: {len(results)} exact identities "
        f"({dt_e:.1f}s); orders {_order_text(conv)} ({dt_c:.1f}s)",
    ), f"failing: exact {bad_e}, convergence {bad_c}"


def test_criterion_6_negative_controls():
    out = check_negative_controls(cfg())
    ok = out["pass"] and out["twist_drop_defect"] >= 1e-3
    assert _line(
        6, ok,
        f"controls: twist-dropped product law defect {out['twist_drop_defect']:.3f} "
        f">= 1e-3; corrupted theta rejected ({out['rejection_message'][:42]}...)",
    ), out
