"""Acceptance suite: one PASS/FAIL line per criterion, printed in the terminal summary.

Every comparison is exact (residue or integer equality).  Runtime budgets are
pinned below.  Cases whose hypotheses fail are strict xfails that still print
a FAIL line, so the outcome stays visible.
"""

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from arithlc.conformal import (det_compat, det_perp_commutator, horizontality_biconditional, restriction_agrees,
                               solve_conformal)
from arithlc.coordring import gl_ring
from arithlc.curvature import curvature, phi12_residue_check, phi12_residue_expected, point_riemann_suite, riemann, riemann_checks
from arithlc.errors import NotAUnit
from arithlc.mixed import (d_determinant, etale_presentation, star_congruence_check, identity_y, n2_factored, odd_part,
                           random_y, section_check, star_curvature_traces)
from arithlc.padic import CyclotomicInt, GaloisElement, make_context
from arithlc.solver import (MetricTuple, closed_form_n1, identity_point, point_context, random_metric,
                            random_metric_tuple,
                            random_point, solve, solve_at_point, solve_for, verify_congruence_christoffel,
                            verify_vertical_congruences)

# pinned tolerances and budgets
EXACT = "exact"
N_GRID = 3
METRICS_PER_CELL = 5
POINTS_PER_METRIC_N3 = 10
BUDGET_N_LE_2_S = 60.0
BUDGET_N3_S = 600.0
BUDGET_MIXED_S = 300.0
N1_UNITS = 20
RIEMANN_POINTS_N3 = 50
FACTORED_POINTS = 20
GRID = [(n, p) for n in (1, 2, 3) for p in (3, 5, 7)]
ROOT = Path(__file__).resolve().parent.parent


def _metrics(n, p):
    rng = random.Random(f"grid:{n}:{p}")
    return [random_metric_tuple(n, p, rng) for _ in range(METRICS_PER_CELL)]


@pytest.fixture(scope="module")
def grid_solutions():
    """Symbolic solutions for n <= 2 and per-point solutions for n = 3, with timings."""
    sols, timing = {}, {"le2": 0.0, "n3": 0.0}
    for n, p in GRID:
        start = time.perf_counter()
        cell = []
        for metric in _metrics(n, p):
            if n <= 2:
                conn = solve_for(metric, p, N_GRID)
                cell.append((metric, conn, conn.verify_metric() and conn.verify_torsion()))
            else:
                rng = random.Random(f"points:{metric.describe()}:{p}")
                ctx = point_context(p, N_GRID)
                pts = [solve_at_point(metric, random_point(ctx, n, rng), N_GRID) for _ in range(POINTS_PER_METRIC_N3)]
                ok = all(c.verify_metric() and c.verify_torsion() for c in pts)
                ident = solve_at_point(metric, identity_point(ctx, n), N_GRID)
                cell.append((metric, (pts, ident), ok))
        timing["le2" if n <= 2 else "n3"] += time.perf_counter() - start
        sols[(n, p)] = cell
    return sols, timing


def test_c01_solver_fixed_point(grid_solutions, criterion_log):
    sols, timing = grid_solutions
    bad = [(n, p, i) for (n, p), cell in sols.items() for i, (_, _, ok) in enumerate(cell) if not ok]
    ok = not bad and timing["le2"] < BUDGET_N_LE_2_S and timing["n3"] < BUDGET_N3_S
    criterion_log("C1 solver fixed point (metric + torsion, mod p^3, 45 metrics)", ok,
                  f"tol={EXACT}; failures={bad}; n<=2 {timing['le2']:.1f}s/{BUDGET_N_LE_2_S:.0f}s; "
                  f"n=3 {timing['n3']:.1f}s/{BUDGET_N3_S:.0f}s")
    assert ok


def test_c02_precision_stability(criterion_log):
    bad = []
    for n, p in GRID:
        for k, metric in enumerate(_metrics(n, p)):
            if n <= 2:
                R = gl_ring(make_context(p, N_GRID + 1), n)
                hi, lo = solve(metric, N_GRID + 1, R), solve(metric, N_GRID, R)
                same = all(a.truncate(N_GRID).equals(b) for a, b in zip(hi.lams, lo.lams))
            else:
                rng = random.Random(f"stab:{metric.describe()}:{p}")
                ctx = point_context(p, N_GRID + 1)
                same = True
                for _ in range(POINTS_PER_METRIC_N3):
                    X = random_point(ctx, n, rng)
                    hi, lo = solve_at_point(metric, X, N_GRID + 1), solve_at_point(metric, X, N_GRID)
                    same &= all((a.truncate(N_GRID) - b).is_zero() for a, b in zip(hi.lams, lo.lams))
            if not same:
                bad.append((n, p, k))
    ok = not bad
    criterion_log("C2 solve at N+1 truncated to N equals solve at N", ok, f"tol=bit-exact; failures={bad}")
    assert ok


def test_c03_n1_closed_form(criterion_log):
    rng = random.Random("units")
    bad = []
    for k in range(N1_UNITS):
        p = (3, 5, 7)[k % 3]
        d = rng.choice([v for v in range(-500, 500) if v % p])
        conn = solve_for(MetricTuple.constant(((d,),)), p, N_GRID)
        lam = conn.lams[0][0, 0].evaluate([1])
        if lam != closed_form_n1(d, p, N_GRID) or not (lam - 1).truncate(1).is_zero():
            bad.append((d, p))
    value = solve_for(MetricTuple.constant(((2,),)), 7, 2).lams[0][0, 0].evaluate([1])
    ok = not bad and value == make_context(7, 2).scalar(8)
    criterion_log("C3 n=1 closed form, 20 units; d=2 p=7 N=2 gives 8 mod 49", ok,
                  f"tol={EXACT}; got {value.coeffs[0]} mod 49; failures={bad}")
    assert ok


def test_c04_christoffel_congruences(grid_solutions, criterion_log):
    sols, _ = grid_solutions
    bad = []
    for (n, p), cell in sols.items():
        for k, (_, sol, _) in enumerate(cell):
            if n <= 2:
                reports = verify_congruence_christoffel(sol)
            else:
                pts, ident = sol
                reports = [r for c in pts for r in verify_congruence_christoffel(c, ident)]
            names = {r.name for r in reports}
            if names != {"christoffel_mod_p", "christoffel_mod_p_x1"} or not all(r.passed for r in reports):
                bad.append((n, p, k))
    ok = not bad
    criterion_log("C4 Christoffel congruences mod p and mod (p, x-1)", ok, f"tol={EXACT}; failures={bad}")
    assert ok


def _gaussian_metric():
    i = CyclotomicInt.zeta(4)
    one = CyclotomicInt.from_list(4, [1])
    return ((one * 2, one + i), (one + i, one * 3)), [GaloisElement(1, 4), GaloisElement(3, 4)]


def test_c05_vertical_congruences_inert(criterion_log):
    q, gauge = _gaussian_metric()
    ok = all(r.passed for r in verify_vertical_congruences(q, gauge, 3))
    criterion_log("C5 vertical congruences over Q(i), p=3 (inert)", ok, f"tol={EXACT}")
    assert ok


@pytest.mark.xfail(strict=True, raises=NotAUnit,
                   reason="the conjugate twist of q has determinant 6+2i, which lies over 5")
def test_c05_vertical_congruences_split(criterion_log):
    q, gauge = _gaussian_metric()
    criterion_log("C5 vertical congruences over Q(i), p=5 (split)", False,
                  "hypothesis fails: det of the twisted metric is not a unit at 5")
    verify_vertical_congruences(q, gauge, 5)


def test_c05_vertical_congruences_split_unit_metric(criterion_log):
    i = CyclotomicInt.zeta(4)
    one = CyclotomicInt.from_list(4, [1])
    q = ((one * 2, i), (i, one * 3))
    ok = all(r.passed for r in verify_vertical_congruences(q, [GaloisElement(1, 4), GaloisElement(3, 4)], 5))
    criterion_log("C5 (supplement) vertical congruences over Q(i), p=5, q=[[2,i],[i,3]]", ok, f"tol={EXACT}")
    assert ok


def test_c06_riemann_symmetries(criterion_log):
    conn = solve_for(MetricTuple.constant(((1, 0), (0, 2))), 3, 2)
    ct = riemann(curvature(conn), conn)
    reports = riemann_checks(ct, conn)
    sym_ok = all(r.passed for r in reports)
    rng = random.Random("riemann-n3")
    suites = {
        "diag(1,2,5)": point_riemann_suite(MetricTuple.constant(((1, 0, 0), (0, 2, 0), (0, 0, 5))), 3,
                                           RIEMANN_POINTS_N3, rng),
        "random p=5": point_riemann_suite(MetricTuple.constant(random_metric(3, 5, random.Random("m3"))), 5,
                                          RIEMANN_POINTS_N3, rng),
    }
    pts_ok = all(ok and count >= RIEMANN_POINTS_N3 for s in suites.values() for ok, count in s.values())
    ok = sym_ok and pts_ok
    criterion_log("C6 Riemann symmetries mod p (n=2 symbolic, n=3 at 50 points)", ok,
                  f"tol={EXACT}; n=2 checks={sorted(r.name for r in reports)}; "
                  f"n=3 {{{', '.join(f'{k}: {all(v[0] for v in s.values())}' for k, s in suites.items())}}}")
    assert ok


def test_c07_conformal_pipeline(criterion_log):
    cd = solve_conformal(2, 2, 3, 2)
    agree = restriction_agrees(cd)
    conn = solve_for(MetricTuple.constant(((2, 0), (0, 2))), 3, 2)
    residue = phi12_residue_check(curvature(conn), conn)
    entry = phi12_residue_expected(2, 3).coeffs[0]
    grid = horizontality_biconditional([(1, 1), (1, 2), (2, 1), (2, 2), (-1, 1), (4, 4), (1, 10), (-2, 4)], 3, 2)
    iff = all(m for _, _, m in grid.values())
    ok = agree and residue.passed and entry == 2 and iff
    criterion_log("C7 conformal: closed form = restricted solver (2,2); Phi_12 residue; horizontality iff", ok,
                  f"tol={EXACT}; Phi_12 entry {entry} mod 3; grid size {len(grid)}")
    assert ok


@pytest.mark.xfail(strict=True, raises=NotAUnit, reason="d2 = 3 is not a unit at p = 3")
def test_c07_conformal_pair_2_3_at_3(criterion_log):
    criterion_log("C7 conformal pair (2,3) at p=3", False, "hypothesis fails: 3 divides d2")
    solve_conformal(2, 3, 3, 2)


def test_c07_conformal_pair_2_3_at_5(criterion_log):
    ok = restriction_agrees(solve_conformal(2, 3, 5, 2))
    criterion_log("C7 (supplement) conformal pair (2,3) at p=5", ok, f"tol={EXACT}")
    assert ok


def test_c08_det_and_det_perp(criterion_log):
    table, factor = det_compat(solve_conformal(2, 2, 3, 2))
    rep = det_perp_commutator(solve_conformal(2, 2, 5, 2))
    ok = all(table.values()) and not rep.commutator_zero and rep.consistent
    criterion_log("C8 det identity exact; det-perp commutator nonzero at d=2 p=5", ok,
                  f"tol={EXACT}; det factor {factor.coeffs[0]}; commutator zero={rep.commutator_zero}")
    assert ok


def test_c09_mixed_traces(criterion_log):
    bad, slowest = [], 0.0
    for p, p2 in [(3, 3), (3, 5), (5, 3), (5, 7)]:
        for d in (1, 2):
            start = time.perf_counter()
            sc = star_curvature_traces(d, p, p2)
            slowest = max(slowest, time.perf_counter() - start)
            if not (sc.routes_agree and all(star_congruence_check(sc).values())
                    and not sc.value_alpha.is_zero() and not sc.value_beta.is_zero()):
                bad.append((p, p2, d))
    ok = not bad and slowest < BUDGET_MIXED_S
    criterion_log("C9 star-curvature congruence mod p and p', values nonzero", ok,
                  f"tol={EXACT}; failures={bad}; slowest {slowest:.1f}s/{BUDGET_MIXED_S:.0f}s")
    assert ok


def test_c10_determinant_n2(criterion_log):
    d2 = d_determinant(2, identity_y(2))
    rng = random.Random("d-factored")
    signs = set()
    for _ in range(FACTORED_POINTS):
        y = random_y(2, rng)
        D, F = d_determinant(2, y), n2_factored(y)
        if F == 0:
            signs.add(0 if D == 0 else None)
        else:
            signs.add(D // F if D % F == 0 and abs(D) == abs(F) else None)
    signs.discard(0)
    ok = d2 % 2 == 1 and len(signs) == 1 and None not in signs
    criterion_log("C10 D(1,1) odd; n=2 factored form up to one global sign", ok,
                  f"tol={EXACT}; D(1,1)={d2}; signs={sorted(s for s in signs if s is not None)}")
    assert ok


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="D(1,1,1) = 2 under every scaling of the system")
def test_c10_determinant_n3_odd(criterion_log):
    d3 = d_determinant(3, identity_y(3))
    criterion_log("C10 D(1,1,1) odd", d3 % 2 == 1, f"tol={EXACT}; D(1,1,1)={d3}")
    assert d3 % 2 == 1


def test_c10_determinant_no_odd_prime(criterion_log):
    vals = {n: d_determinant(n, identity_y(n)) for n in (2, 3)}
    ok = all(odd_part(v) == 1 for v in vals.values())
    criterion_log("C10 (supplement) D(1,...,1) = +-2^k for n=2,3", ok, f"tol={EXACT}; values={vals}")
    assert ok


def test_c11_etale_section(criterion_log):
    bad = []
    for p in (3, 5, 7):
        for k, metric in enumerate(_metrics(2, p)):
            out = section_check(etale_presentation(metric.qs, p))
            if not (out["metric_mod_p"] and out["torsion_exact"]):
                bad.append((p, k))
    ok = not bad
    criterion_log("C11 etale section: generators vanish mod p at y = 1 (n=2 grid)", ok, f"tol={EXACT}; failures={bad}")
    assert ok


def test_c12_determinism(tmp_path, criterion_log):
    config = ROOT / "scripts" / "configs" / "full.ini"
    outs = []
    for k in range(2):
        path = tmp_path / f"report{k}.json"
        proc = subprocess.run([sys.executable, "-m", "arithlc.cli", "--config", str(config), "--report", str(path),
                               "--seed", "11"], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1]
    criterion_log("C12 two runs with the same seed give byte-identical reports", ok,
                  f"tol=byte-exact; {len(outs[0])} bytes")
    assert ok
