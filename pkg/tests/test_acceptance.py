"""End-to-end acceptance gate: eight checks, each with a runtime budget.

Every check prints one ``PASS``/``FAIL`` line with its core runtime.  Under
pytest the lines are captured unless ``-s`` is given; running this file
directly (``python3 tests/test_acceptance.py``) always shows them.

The checks cover: the forcing-parameter classification sweep, witness
completeness with index reduction over the six standard rings, the
equality between window-filtered enumeration and conjugated generation
witnesses, greedy-expansion round trips on coordinate grids, the
divisibility filter over depth-6 closures plus a non-membership
certificate, binomial pinching of single-parameter witnesses, the exact
arithmetic layer against high-precision floats, and random enumeration
cross-checked against brute-force box scans.
"""

import random
import time
from fractions import Fraction
from math import comb, sqrt

import mpmath

from qcx import (
    Divisibility,
    Interval,
    LEAF_ONE,
    LEAF_ZERO,
    Leaf,
    Node,
    NotFiniteError,
    QuadRat,
    Witness,
    apply_op,
    closure_bfs,
    divisibility_filter,
    enumerate_model_set,
    expand_greedy,
    find_rewrite_template,
    flatten_to_binomial,
    forcing_sweep,
    index_cap,
    is_admissible,
    iter_admissible,
    reduce_witness,
    ring_make,
    scan_witness_completeness,
    verify_witness,
    witness_for,
)

SIX_RINGS = ((1, 1), (2, 1), (3, 1), (4, -1), (5, -1), (7, -1))


def _report(num: int, ok: bool, detail: str, elapsed: float, budget: float) -> None:
    in_budget = elapsed < budget
    status = "PASS" if ok and in_budget else "FAIL"
    print(f"{status} criterion {num}: {detail} ({elapsed:.2f}s, budget {budget:.0f}s)")
    assert ok, f"criterion {num}: {detail}"
    assert in_budget, f"criterion {num} took {elapsed:.2f}s, budget {budget:.0f}s"


def _digits_value(ring, digits):
    """Value of a fractional digit string: sum of d_k / beta^k, k = 1.."""
    value = ring.zero
    power = ring.one
    for d in digits:
        power = power * ring.inv_beta
        value = value + d * power
    return value


def test_criterion_1_forcing_classification():
    t0 = time.perf_counter()
    rows = forcing_sweep(30)
    forcing = [r for r in rows if r.forcing]
    expected_direct = {
        (1, 1): {(0, -1), (1, 1)},    # -tau and tau^2
        (2, 1): {(0, -1), (1, 1)},    # -(1+sqrt2) and 2+sqrt2
        (4, -1): {(0, 1), (1, -1)},   # 2+sqrt3 and -1-sqrt3
    }
    ok = len(rows) == 57 and {(r.ring.m, r.ring.eps) for r in forcing} == set(
        expected_direct
    )
    for row in forcing:
        key = (row.ring.m, row.ring.eps)
        direct = {(s.a, s.b) for s in row.direct_side}
        ok = ok and direct == expected_direct[key]
        # the two parameters are an s, 1-s pair and the window side is
        # exactly their conjugate pair
        s, t = row.direct_side
        ok = ok and s + t == row.ring.one
        ok = ok and {(w.a, w.b) for w in row.window_side} == {
            (s.conj().a, s.conj().b),
            (t.conj().a, t.conj().b),
        }
    elapsed = time.perf_counter() - t0
    _report(
        1,
        ok,
        f"{len(rows)} rings swept, forcing exactly (1,+1),(2,+1),(4,-1) "
        "with exact parameter pairs",
        elapsed,
        1.0,
    )


def test_criterion_2_witness_completeness():
    t0 = time.perf_counter()
    rng = random.Random(20250825)
    ok = True
    total_targets = 0
    total_complements = 0
    for m, eps in SIX_RINGS:
        ring = ring_make(m, eps)
        cap = index_cap(ring)
        ok = ok and cap == (m + eps) // 2
        report = scan_witness_completeness(ring, 6)
        strings = list(iter_admissible(ring, 6))
        # distinct targets: every admissible string modulo trailing zeros,
        # i.e. all strings minus the all-zero one, plus the two endpoints
        ok = ok and report.failures == 0
        ok = ok and report.targets == len(strings) - 1 + 2
        ok = ok and report.complements == (report.targets - 2 if eps == -1 else 0)
        ok = ok and report.cap == cap
        total_targets += report.targets
        total_complements += report.complements
        # spot-check the per-element pipeline on a random sample
        for digits in rng.sample(strings, min(30, len(strings))):
            y = _digits_value(ring, digits)
            w = witness_for(ring, y)
            ok = ok and verify_witness(w, y)
            r = reduce_witness(w)
            ok = ok and verify_witness(r, y)
            ok = ok and max(r.op_indices(), default=0) <= cap
            if eps == -1:
                c = ring.one - y
                rc = reduce_witness(witness_for(ring, c))
                ok = ok and verify_witness(rc, c)
                ok = ok and max(rc.op_indices(), default=0) <= cap
    # the even minus-family middle index has no closed-form rewrite; report
    # whatever the bounded search finds without passing or failing on it
    template = find_rewrite_template(ring_make(6, -1), 3, max_depth=8)
    if template is not None:
        w = Witness(ring_make(6, -1), template)
        ok = ok and w.evaluate() == 3 * ring_make(6, -1).inv_beta
        ok = ok and max(w.op_indices()) <= index_cap(ring_make(6, -1))
        info = "found"
    else:
        info = "not found"
    print(f"INFO criterion 2: ring (6,-1) index-3 template {info} at depth <= 8")
    elapsed = time.perf_counter() - t0
    _report(
        2,
        ok,
        f"{total_targets} targets (+{total_complements} complements) witnessed, "
        "verified, and reduced within the index cap across six rings",
        elapsed,
        10.0,
    )


def test_criterion_3_enumeration_equals_witness_targets():
    t0 = time.perf_counter()
    ring = ring_make(1, 1)
    beta6 = ring.element(5, 8)  # beta^6 for beta^2 = beta + 1
    unit = Interval.closed(0, 1, ring)
    span = Interval.closed(ring.zero, beta6)

    direct = list(enumerate_model_set(ring, unit, span))
    # window-side targets, enumerated independently with the roles swapped
    targets = list(enumerate_model_set(ring, Interval.closed(ring.zero, beta6), unit))
    key = lambda q: (q.a, q.b)
    ok = sorted((y.conj() for y in targets), key=key) == sorted(direct, key=key)

    neg_tau = ring.element(0, -1)  # conjugate of 1/beta
    rebuilt = []
    for y in targets:
        w = witness_for(ring, y)
        ok = ok and verify_witness(w, y)
        r = reduce_witness(w)
        ok = ok and verify_witness(r, y) and r.op_indices() <= {1}
        # independent structural evaluation on the direct side: conjugating
        # s*l + (1-s)*r turns every op-1 node into apply_op(-tau, ., .)
        memo = {}

        def ev(node):
            if isinstance(node, Leaf):
                return ring.element(node.idx, 0)
            got = memo.get(id(node))
            if got is None:
                got = apply_op(neg_tau, ev(node.left), ev(node.right))
                memo[id(node)] = got
            return got

        rebuilt.append(ev(r.root) + r.offset.conj())
    ok = ok and sorted(rebuilt, key=key) == sorted(direct, key=key)

    closure = closure_bfs([ring.zero, ring.one], neg_tau, 6)
    ok = ok and all(unit.contains(z.conj()) for z in closure)
    elapsed = time.perf_counter() - t0
    _report(
        3,
        ok,
        f"{len(direct)} enumerated points equal the conjugated witness targets; "
        f"all {len(closure)} closure points pass the exact window test",
        elapsed,
        5.0,
    )


def test_criterion_4_expansion_round_trip_grids():
    t0 = time.perf_counter()
    ok = True
    round_trips = 0
    non_finite = 0
    for m, eps in ((1, 1), (2, 1), (3, 1), (4, -1), (5, -1)):
        ring = ring_make(m, eps)
        for a in range(-30, 31):
            for b in range(-30, 31):
                x = ring.element(a, b)
                if x.sign() <= 0:
                    continue
                if eps == 1 or x.norm() >= 0:
                    digits = expand_greedy(x)
                    ok = ok and digits.value() == x and is_admissible(digits)
                    round_trips += 1
                else:
                    try:
                        expand_greedy(x)
                    except NotFiniteError as exc:
                        ok = ok and exc.norm == x.norm() < 0
                        non_finite += 1
                    else:
                        ok = False
    elapsed = time.perf_counter() - t0
    _report(
        4,
        ok,
        f"{round_trips} exact admissible round trips, "
        f"{non_finite} negative-norm rejections at depth 64",
        elapsed,
        10.0,
    )


def test_criterion_5_divisibility_filter_on_closures():
    t0 = time.perf_counter()
    ok = True
    total = 0
    for m, eps in ((1, 1), (3, 1), (4, -1)):
        ring = ring_make(m, eps)
        closure_high = None
        for s in (ring.inv_beta, ring.one - ring.inv_beta):
            points = closure_bfs([ring.zero, ring.one], s, 6)
            for y in points:
                verdict = divisibility_filter(y, s)
                ok = ok and verdict is not Divisibility.NEITHER
            total += len(points)
            closure_high = points
        if (m, eps) == (3, 1):
            # non-membership certificate: 2/beta^2 sits in [0, 1] but is not
            # generated from {0, 1} under s = 4 - beta, and the filter proves
            # it without enumerating anything
            y0 = ring.element(20, -6)  # 2/beta^2 for beta^2 = 3*beta + 1
            ok = ok and divisibility_filter(y0, ring.element(4, -1)) is Divisibility.NEITHER
            ok = ok and y0 not in closure_high  # closure_high used s = 4 - beta
    elapsed = time.perf_counter() - t0
    _report(
        5,
        ok,
        f"{total} closure points all classify divisible; "
        "2/beta^2 vs 4-beta certified Neither",
        elapsed,
        5.0,
    )


def test_criterion_6_binomial_pinching():
    t0 = time.perf_counter()
    rng = random.Random(20250806)
    rings = [ring_make(*p) for p in SIX_RINGS]
    ok = True
    for _ in range(500):
        ring = rings[rng.randrange(len(rings))]
        i = rng.randint(1, ring.digit_max)

        def build(d):
            if d == 0 or rng.random() < 0.3:
                return LEAF_ONE if rng.random() < 0.5 else LEAF_ZERO
            return Node(i, build(d - 1), build(d - 1))

        root = Node(i, build(rng.randint(0, 7)), build(rng.randint(0, 7)))
        w = Witness(ring, root)
        n = w.depth() + rng.randint(0, 2)
        coeffs = flatten_to_binomial(w, n)
        ok = ok and len(coeffs) == n + 1
        ok = ok and all(0 <= c <= comb(n, k) for k, c in enumerate(coeffs))
        s = i * ring.inv_beta
        total = ring.zero
        for k, c in enumerate(coeffs):
            total = total + c * s ** k * (1 - s) ** (n - k)
        ok = ok and total == w.evaluate()
    elapsed = time.perf_counter() - t0
    _report(
        6,
        ok,
        "500 random single-parameter witnesses flatten within binomial "
        "bounds and re-evaluate exactly",
        elapsed,
        5.0,
    )


def test_criterion_7_exact_arithmetic_suite():
    t0 = time.perf_counter()
    rng = random.Random(20250807)
    rings = [ring_make(*p) for p in SIX_RINGS]
    ok = True
    # ring automorphism and norm multiplicativity
    for ring in rings:
        for _ in range(2000):
            x = ring.element(rng.randint(-50, 50), rng.randint(-50, 50))
            y = ring.element(rng.randint(-50, 50), rng.randint(-50, 50))
            ok = ok and (x * y).conj() == x.conj() * y.conj()
            ok = ok and (x + y).conj() == x.conj() + y.conj()
            ok = ok and x.conj().conj() == x
            ok = ok and (x * y).norm() == x.norm() * y.norm()
            ok = ok and x * x.conj() == ring.element(x.norm(), 0)
    # exact sign against 50-digit floats
    mpmath.mp.dps = 50
    betas = [(r.m + mpmath.sqrt(r.m * r.m + 4 * r.eps)) / 2 for r in rings]
    checked = 0
    per_ring = 100000 // len(rings) + 1
    for ring, beta in zip(rings, betas):
        for _ in range(per_ring):
            a = rng.randint(-(10 ** 6), 10 ** 6)
            b = rng.randint(-(10 ** 6), 10 ** 6)
            f = a + b * beta
            if abs(f) > 1e-9:
                ok = ok and (f > 0) == (ring.element(a, b).sign() > 0)
                checked += 1
    ok = ok and checked >= 100000 - 10
    # floor certification: n = floor(x) satisfies n <= x < n + 1 exactly
    floors = 0
    for _ in range(10000):
        ring = rings[rng.randrange(len(rings))]
        x = ring.element(rng.randint(-1000, 1000), rng.randint(-1000, 1000))
        n = x.floor()
        ok = ok and (x - n).sign() >= 0 and (n + 1 - x).sign() > 0
        floors += 1
    elapsed = time.perf_counter() - t0
    _report(
        7,
        ok,
        f"automorphism/norm on 12000 pairs, {checked} sign-vs-float "
        f"agreements, {floors} floors certified",
        elapsed,
        10.0,
    )


def test_criterion_8_enumeration_vs_box_scan():
    t0 = time.perf_counter()
    rng = random.Random(20250808)
    ok = True
    trials = 0
    for m, eps in SIX_RINGS:
        ring = ring_make(m, eps)
        beta_f = ring.beta_float
        disc_root = sqrt(ring.disc)
        done = 0
        while done < 50:
            den = rng.randint(1, 4)
            ends = []
            for _ in range(2):
                nb = rng.randint(-den, den)
                na = rng.randint(-2 * den, 2 * den)
                ends.append(QuadRat(ring.element(na, nb), den))
            lo, hi = ends
            if hi < lo:
                lo, hi = hi, lo
            lo_closed = rng.random() < 0.7
            hi_closed = rng.random() < 0.7
            if lo == hi:
                lo_closed = hi_closed = True
            window = Interval(lo, hi, lo_closed, hi_closed)
            s1, s2 = sorted((rng.randint(-12, 12), rng.randint(-12, 12)))
            s1_closed = rng.random() < 0.8
            s2_closed = rng.random() < 0.8
            if s1 == s2:
                s1_closed = s2_closed = True
            span = Interval(
                QuadRat(ring.element(s1, 0)),
                QuadRat(ring.element(s2, 0)),
                s1_closed,
                s2_closed,
            )
            got = sorted((x.a, x.b) for x in enumerate_model_set(ring, window, span))
            # every point has |b| * sqrt(disc) <= |x| + |conj(x)|, which the
            # span and window bound; the box adds a safety margin of 2
            w_bound = (
                max(
                    abs((lo.num.a + lo.num.b * beta_f) / lo.den),
                    abs((hi.num.a + hi.num.b * beta_f) / hi.den),
                )
                + 0.01
            )
            b_max = int((12 + w_bound) / disc_root) + 2
            a_max = int(12 + b_max * beta_f) + 2
            want = []
            for b in range(-b_max, b_max + 1):
                for a in range(-a_max, a_max + 1):
                    x = ring.element(a, b)
                    if span.contains(x) and window.contains(x.conj()):
                        want.append((a, b))
            ok = ok and got == sorted(want)
            done += 1
            trials += 1
    elapsed = time.perf_counter() - t0
    _report(
        8,
        ok,
        f"{trials} random window/range pairs match brute-force box scans exactly",
        elapsed,
        10.0,
    )


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError as exc:
                failures += 1
                print(f"  -> {exc}")
    raise SystemExit(1 if failures else 0)
