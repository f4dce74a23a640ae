"""The eleven acceptance criteria, each at its stated tolerance and size.

Every test records a one-line verdict (also printed) before asserting, so a
failing criterion still shows up in the summary with its numbers.
"""

import time

from oscillate.verify import WEIERSTRASS_PILOT, run_suite

from conftest import ACCEPTANCE_LINES


def report(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def timed(name, **kw):
    t0 = time.perf_counter()
    result = run_suite(name, **kw)
    return result, time.perf_counter() - t0


def test_criterion_01_factor2():
    r, secs = timed("factor2", trials=200, N=32, seed=0)
    c = r.check("lhs<=2*rhs per cell")
    ok = r.passed and secs < 5.0
    report(1, ok, f"factor-2 inequality, 200 f x 20 alpha, worst margin {c.worst_margin:.3g}, {secs:.2f}s (< 5s)")
    assert ok


def test_criterion_02_sandwich():
    r, _ = timed("sandwich", trials=200, N=32, seed=0)
    ident = r.check("star==weak (literal centering)")
    report(2, r.passed, f"sandwich weak <= star <= 2 weak; identity |star - weak| <= {-ident.worst_margin:.3g}")
    assert r.passed


def test_criterion_03_norm_axioms():
    r, _ = timed("norm-axioms", trials=100, N=32, seed=0)
    counter = r.check("homogeneity c=-1")
    report(3, r.passed, "zero, c >= 0 homogeneity, triangle on 100 pairs (1e-10); "
                        f"c=-1 counterexample (informational): {counter.witness['norm_f']} vs "
                        f"{counter.witness['norm_neg_f']}")
    assert r.passed
    assert not counter.passed


def test_criterion_04_holder():
    r, _ = timed("holder", trials=100, N=32, seed=0)
    worst = min(c.worst_margin for c in r.checks)
    report(4, r.passed, f"Holder bound with greedy and LP decompositions, worst margin {worst:.3g} (>= -1e-9)")
    assert r.passed


def test_criterion_05_bridge():
    r, secs = timed("bridge", trials=20, N=256, seed=0)
    worst = 1e-12 - r.checks[0].worst_margin
    ok = r.passed and secs < 2.0
    report(5, ok, f"bridge identity at N=256, max discrepancy {worst:.3g} (<= 1e-12), {secs:.2f}s (< 2s)")
    assert ok


def test_criterion_06_dualnorm():
    r, _ = timed("dualnorm", trials=200, N=32, seed=0)
    i = r.informational
    report(6, r.passed, f"atomic dual norm <= weak BMO on 200 g; ratio min/mean/max "
                        f"{i['ratio_min']:.3f}/{i['ratio_mean']:.3f}/{i['ratio_max']:.3f} (informational)")
    assert r.passed


def test_criterion_07_lp():
    r, _ = timed("lp", trials=100, N=16, seed=0)
    report(7, r.passed, f"LP == sparse brute force on {r.informational['brute_force_feasible']} feasible N=8 "
                        "instances; LP <= greedy on 100 N=16 instances")
    assert r.passed
    assert r.informational["brute_force_feasible"] > 0


def test_criterion_08_weierstrass():
    r, _ = timed("zygmund", N=64)
    w = r.check("zygmund ratio < 1.5").witness
    pilot_ok = all(abs(z - WEIERSTRASS_PILOT[n][0]) < 1e-3 and abs(l - WEIERSTRASS_PILOT[n][1]) < 1e-2
                   for n, z, l in zip(w["N"], w["zygmund"], w["lipschitz"]))
    ok = r.passed and pilot_ok
    report(8, ok, f"Zygmund ratio {w['ratio']:.3f} (< 1.5); Lipschitz "
                  f"{', '.join(f'{x:.2f}' for x in w['lipschitz'])} strictly increasing; matches pilot fixture")
    assert ok


def test_criterion_09_poisson():
    r, _ = timed("poisson")
    kn, modes, b1 = r.checks
    detail = (f"normalization err {1e-9 - kn.worst_margin:.2g}, mode err "
              f"{modes.witness['error']:.2g}, b1a rel err {0.01 - b1.worst_margin:.2g}")
    report(9, r.passed, detail)
    assert r.passed


def test_criterion_10_rotation():
    r, _ = timed("rotation", N=256)
    mono = r.check("nonincreasing as eps halves")
    final = r.check("final < 0.05 norm (degree <= 2)")
    high = r.check("final < 0.05 norm (degree > 2)")
    report(10, r.passed, f"monotone for degree <= 4; final ratio <= {final.witness['ratio']:.4f} for degree <= 2; "
                         f"degree 3-4 reach {high.witness['ratio']:.4f} (informational, ~2 sin(pi k/N))")
    assert mono.passed and final.passed


def test_criterion_11_vmo():
    r, _ = timed("vmo", N=64)
    shrink = r.check("strong omega shrinks >= 2x")
    report(11, r.passed, "omega monotone for every generator and flavor; strong omega shrinks >= 2x under N -> 4N "
                         f"for continuous generators (worst margin {shrink.worst_margin:.3g})")
    assert r.passed
