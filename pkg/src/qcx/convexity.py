"""Two-point convex combinations over Z[beta]: closures, witnesses, certificates.

The binary operation with parameter s is  x, y -> s*x + (1-s)*y.  On the
window side the useful parameters are s' = i/beta for 1 <= i <= floor(beta);
each such operation is a genuine convex combination, so iterating it from the
seed pair {c, c+1} can only produce points of the interval [c, c+1].  The
central construction of this module proves the converse: every ring element
of [0, 1] is reachable, and the reachability certificate is a *witness tree*
whose leaves name the two seeds and whose internal nodes carry op indices.

Main entry points
-----------------
- ``apply_op`` / ``closure_bfs``: forward generation.
- ``witness_for`` / ``verify_witness``: certificate construction and checking.
- ``reduce_witness`` / ``find_rewrite_template``: rewriting all op indices
  below the cap floor((m+-1)/2) using exact operator identities.
- ``flatten_to_binomial``: the normal form sum b_i s^i (1-s)^(n-i) with
  0 <= b_i <= C(n, i) for single-parameter witnesses.
- ``divisibility_filter`` / ``classify_forcing`` / ``forcing_sweep`` /
  ``characterizing_params``: arithmetic certificates deciding which
  parameters can force or characterize model sets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import islice
from math import comb
from typing import Iterable, Sequence, Union

from .betanum import expand_greedy, has_finite_expansion
from .errors import (
    BudgetExceededError,
    DepthTooSmallError,
    DigitRangeError,
    MissingSeedsError,
    MixedParameterError,
    NoRewriteError,
    NotInRingError,
    OutOfRangeError,
    OutOfWindowError,
    RingMismatchError,
)
from .modelset import Interval, PointSet
from .quadring import QuadInt, QuadRat, RingSpec

log = logging.getLogger("qcx.convexity")

Scalar = Union[QuadInt, QuadRat, int]


# ---------------------------------------------------------------------------
# witness trees
# ---------------------------------------------------------------------------


class Leaf:
    """A seed reference: index 0 or 1 into the witness seed pair."""

    __slots__ = ("idx",)

    def __init__(self, idx: int):
        self.idx = idx

    def __repr__(self) -> str:
        return f"Leaf({self.idx})"


class Node:
    """left ⊢ right with weight op/beta on the left operand."""

    __slots__ = ("op", "left", "right")

    def __init__(self, op: int, left, right):
        self.op = op
        self.left = left
        self.right = right

    def __repr__(self) -> str:
        return f"Node({self.op}, {self.left!r}, {self.right!r})"


LEAF_ZERO = Leaf(0)
LEAF_ONE = Leaf(1)

TreeNode = Union[Leaf, Node]


def same_tree(a: TreeNode, b: TreeNode) -> bool:
    """Structural equality of two witness trees."""
    if isinstance(a, Leaf) and isinstance(b, Leaf):
        return a.idx == b.idx
    if isinstance(a, Node) and isinstance(b, Node):
        return a.op == b.op and same_tree(a.left, b.left) and same_tree(a.right, b.right)
    return False


def _pair_shift_down(m: int, eps: int, a: int, b: int) -> tuple[int, int]:
    # (a + b*beta)/beta, exact because beta is a unit
    return b - eps * m * a, eps * a


def _eval_tree(ring: RingSpec, root: TreeNode, leaf0: tuple[int, int], leaf1: tuple[int, int],
               memo: dict | None = None) -> tuple[int, int]:
    """Exact value of a tree as an (a, b) pair; node = right + op*(left-right)/beta."""
    m, eps = ring.m, ring.eps
    if memo is None:
        memo = {}

    def rec(n) -> tuple[int, int]:
        v = memo.get(n)
        if v is not None:
            return v
        if isinstance(n, Leaf):
            v = leaf1 if n.idx else leaf0
        else:
            la, lb = rec(n.left)
            ra, rb = rec(n.right)
            da, db = n.op * (la - ra), n.op * (lb - rb)
            sa, sb = db - eps * m * da, eps * da
            v = (ra + sa, rb + sb)
        memo[n] = v
        return v

    return rec(root)


@dataclass(frozen=True, eq=False)
class Witness:
    """A generation certificate over the translated seed pair {c, c+1}.

    ``seeds`` is the base pair (normally 0 and 1); ``offset`` is c.  A leaf
    with index k denotes the value seeds[k] + offset.
    """

    ring: RingSpec
    root: TreeNode
    seeds: tuple[QuadInt, QuadInt] = None  # type: ignore[assignment]
    offset: QuadInt = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.seeds is None:
            object.__setattr__(self, "seeds", (self.ring.zero, self.ring.one))
        if self.offset is None:
            object.__setattr__(self, "offset", self.ring.zero)

    def _leaf_pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        s0 = self.seeds[0] + self.offset
        s1 = self.seeds[1] + self.offset
        return (s0.a, s0.b), (s1.a, s1.b)

    def evaluate(self) -> QuadInt:
        l0, l1 = self._leaf_pairs()
        a, b = _eval_tree(self.ring, self.root, l0, l1)
        return self.ring.element(a, b)

    def evaluate_conj(self) -> QuadInt:
        """Direct-side value: the Galois conjugate of the window-side value."""
        return self.evaluate().conj()

    def op_indices(self) -> set[int]:
        seen: set[int] = set()
        visited: set[int] = set()

        def rec(n) -> None:
            if isinstance(n, Leaf) or id(n) in visited:
                return
            visited.add(id(n))
            seen.add(n.op)
            rec(n.left)
            rec(n.right)

        rec(self.root)
        return seen

    def depth(self) -> int:
        memo: dict = {}

        def rec(n) -> int:
            if isinstance(n, Leaf):
                return 0
            d = memo.get(n)
            if d is None:
                d = 1 + max(rec(n.left), rec(n.right))
                memo[n] = d
            return d

        return rec(self.root)

    def tree_size(self) -> int:
        """Number of nodes when the internal DAG is unrolled to a tree."""
        memo: dict = {}

        def rec(n) -> int:
            if isinstance(n, Leaf):
                return 1
            c = memo.get(n)
            if c is None:
                c = 1 + rec(n.left) + rec(n.right)
                memo[n] = c
            return c

        return rec(self.root)

    # -- serialization ----------------------------------------------------

    def to_dict(self, size_limit: int = 200_000) -> dict:
        if self.tree_size() > size_limit:
            raise OutOfRangeError(
                f"witness unrolls to more than {size_limit} nodes; refusing to serialize"
            )

        def rec(n) -> dict:
            if isinstance(n, Leaf):
                return {"leaf": n.idx}
            return {"op": n.op, "left": rec(n.left), "right": rec(n.right)}

        return {
            "ring": {"m": self.ring.m, "sign": "+" if self.ring.eps == 1 else "-"},
            "seeds": [{"a": s.a, "b": s.b} for s in self.seeds],
            "offset": {"a": self.offset.a, "b": self.offset.b},
            "root": rec(self.root),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Witness":
        ring = RingSpec.make(int(data["ring"]["m"]), data["ring"]["sign"])

        def rec(d) -> TreeNode:
            if "leaf" in d:
                idx = int(d["leaf"])
                if idx not in (0, 1):
                    raise DigitRangeError(f"leaf index {idx} must be 0 or 1")
                return LEAF_ONE if idx else LEAF_ZERO
            return Node(int(d["op"]), rec(d["left"]), rec(d["right"]))

        seeds = tuple(ring.element(int(s["a"]), int(s["b"])) for s in data["seeds"])
        if len(seeds) != 2:
            raise MissingSeedsError("witness needs exactly two seeds")
        offset = ring.element(int(data["offset"]["a"]), int(data["offset"]["b"]))
        return cls(ring, rec(data["root"]), seeds, offset)


# ---------------------------------------------------------------------------
# forward generation
# ---------------------------------------------------------------------------


def apply_op(s: Scalar, x: Scalar, y: Scalar):
    """The combination s*x + (1-s)*y, exact in whatever ring the operands share."""
    return s * x + (1 - s) * y


@dataclass(frozen=True)
class ParamSet:
    """A finite family of direct-side parameters s (window side: conj(s))."""

    ring: RingSpec
    params: tuple[QuadInt, ...]

    def __post_init__(self) -> None:
        if not self.params:
            raise MissingSeedsError("parameter set must be nonempty")
        for p in self.params:
            if p.ring != self.ring:
                raise RingMismatchError("parameter from a different ring")

    def window_values(self) -> tuple[QuadInt, ...]:
        return tuple(p.conj() for p in self.params)


def closure_bfs(
    seeds: Iterable[QuadInt],
    params: Union[ParamSet, QuadInt, Iterable[QuadInt]],
    depth: int,
    span: Interval | None = None,
    node_cap: int = 1_000_000,
) -> PointSet:
    """Iterate all parameters over all ordered pairs for ``depth`` rounds.

    Intermediate values are never discarded (they keep generating) and the
    optional ``span`` filter applies to the returned set only.  Raises
    BudgetExceededError when the accumulated set outgrows ``node_cap``.
    """
    seed_list = list(seeds)
    if not seed_list:
        raise MissingSeedsError("closure needs at least one seed")
    if depth < 0:
        raise OutOfRangeError("depth must be nonnegative")
    ring = seed_list[0].ring
    if isinstance(params, ParamSet):
        param_list = list(params.params)
    elif isinstance(params, QuadInt):
        param_list = [params]
    else:
        param_list = list(params)
    if not param_list:
        raise MissingSeedsError("closure needs at least one parameter")
    for v in seed_list + param_list:
        if v.ring != ring:
            raise RingMismatchError("seeds and parameters must share one ring")

    m, eps = ring.m, ring.eps
    param_pairs = [(p.a, p.b) for p in param_list]

    # Dedup keys are a*stride + b with stride a power of two chosen so that
    # no coordinate reachable within ``depth`` rounds can wrap: each round
    # multiplies the largest coordinate magnitude by at most ``growth``.
    mag = 1
    for s in seed_list:
        mag = max(mag, abs(s.a), abs(s.b))
    growth = 3
    for pa, pb in param_pairs:
        growth = max(growth, 1 + 2 * (abs(pa) + (m + 1) * abs(pb)))
    bits = (mag + 2).bit_length() + depth * growth.bit_length() + 4
    stride = 1 << bits
    half = stride >> 1
    mask = stride - 1

    order: list[tuple[int, int]] = []
    seen: set[int] = set()
    for s in seed_list:
        key = s.a * stride + s.b
        if key not in seen:
            seen.add(key)
            order.append((s.a, s.b))
    frontier = list(order)

    def scaled(pa: int, pb: int, pts: list[tuple[int, int]]) -> list[tuple[int, int]]:
        # (pa + pb*beta) * (a + b*beta) as plain pairs
        return [
            (pa * a + eps * pb * b, pa * b + pb * a + m * pb * b) for a, b in pts
        ]

    for round_no in range(depth):
        if not frontier:
            break
        base = len(order) - len(frontier)  # order[:base] predates this frontier
        new_keys: list[int] = []
        seen_add = seen.add
        new_append = new_keys.append
        for pa, pb in param_pairs:
            qa, qb = 1 - pa, -pb  # 1 - p
            # z = p*x + (1-p)*y and its reflection w = (1-p)*x + p*y; one pass
            # over unordered pairs covers both orders of x |- y.  Keys are
            # linear in the coordinates, so key(z) = key(p*x) + key((1-p)*y)
            # and each candidate costs one integer add.
            kx_u = [a * stride + b for a, b in scaled(pa, pb, frontier)]
            kx_v = [a * stride + b for a, b in scaled(qa, qb, frontier)]
            ky = list(
                zip(
                    (a * stride + b for a, b in scaled(qa, qb, order)),
                    (a * stride + b for a, b in scaled(pa, pb, order)),
                )
            )
            for i in range(len(frontier)):
                ku = kx_u[i]
                kv = kx_v[i]
                for kw, kp in islice(ky, base + i):
                    key = ku + kw
                    if key not in seen:
                        seen_add(key)
                        new_append(key)
                    key = kv + kp
                    if key not in seen:
                        seen_add(key)
                        new_append(key)
                if len(seen) > node_cap:
                    raise BudgetExceededError(
                        f"closure exceeded {node_cap} points at round {round_no + 1}"
                    )
                # pairs against points discovered later this round are handled
                # when those points join the order; ky only covers order
        fresh = []
        for key in new_keys:
            b = key & mask
            if b >= half:
                b -= stride
            fresh.append(((key - b) >> bits, b))
        order.extend(fresh)
        frontier = fresh
        log.debug("closure round %d: %d new, %d total", round_no + 1, len(fresh), len(order))

    points = [ring.element(a, b) for a, b in order]
    if span is not None:
        points = [p for p in points if span.contains(p)]
    points.sort()
    if span is None:
        if points:
            span = Interval.closed(points[0], points[-1])
        else:  # pragma: no cover - seeds are never empty
            span = Interval.closed(0, 0, ring)
    return PointSet(ring, tuple(points), span)


# ---------------------------------------------------------------------------
# witness construction
# ---------------------------------------------------------------------------


def _tree_from_digits(ring: RingSpec, digits: Sequence[int]) -> TreeNode:
    """Witness tree for sum digits[i]/beta^(i+1) from an admissible string.

    Walks the digit string once, composing the affine maps that send the seed
    pair into ever finer subintervals.  ``m0`` and ``m1`` are the current
    images of the seeds 0 and 1; consuming digit d refines them so that after
    the whole string ``m0`` evaluates to the truncated sum.  The minus family
    digit m-1 cannot be expressed directly (its op index would need to exceed
    floor(beta)); it is absorbed by rewriting x = (m-1)/beta + z/beta as
    1/beta * z' + (1 - 1/beta) * 1 with z' the tail bumped by one, which
    surfaces as a wrapper node applied at the end.
    """
    m, eps = ring.m, ring.eps
    ds = list(digits)
    if not ds or ds[-1] == 0:
        raise DigitRangeError("digit string must be nonempty with nonzero last digit")
    wraps: list[TreeNode] = []
    m0: TreeNode = LEAF_ZERO
    m1: TreeNode = LEAF_ONE
    i = 0
    n = len(ds)
    while True:
        c = ds[i]
        if not 0 <= c <= ring.digit_max:
            raise DigitRangeError(f"digit {c} outside 0..{ring.digit_max}")
        if i == n - 1:
            node: TreeNode = Node(c, m1, m0)
            break
        if eps == 1 and c == m:
            # admissible strings follow a top digit with 0; consume both
            if ds[i + 1] != 0:
                raise DigitRangeError("digit m must be followed by 0")
            m0 = Node(m, m1, m0)
            i += 2
            continue
        if eps == -1 and c == m - 1:
            wraps.append(m1)
            if ds[i + 1] >= m - 1:
                raise DigitRangeError("digit m-1 directly followed by m-1")
            ds[i + 1] += 1
            i += 1
            continue
        if c:
            m0, m1 = Node(c, m1, m0), Node(c + 1, m1, m0)
        else:
            m1 = Node(1, m1, m0)
        i += 1
    while wraps:
        node = Node(1, node, wraps.pop())
    return node


def _swap_leaves(root: TreeNode, memo: dict | None = None) -> TreeNode:
    """Exchange the two seed references; maps value v to 1 - v on seeds {0, 1}."""
    if memo is None:
        memo = {}

    def rec(n) -> TreeNode:
        if isinstance(n, Leaf):
            return LEAF_ZERO if n.idx else LEAF_ONE
        r = memo.get(n)
        if r is None:
            r = Node(n.op, rec(n.left), rec(n.right))
            memo[n] = r
        return r

    return rec(root)


def _as_ring_element(ring: RingSpec, x) -> QuadInt:
    if isinstance(x, QuadInt):
        if x.ring != ring:
            raise RingMismatchError("value from a different ring")
        return x
    if isinstance(x, QuadRat):
        if not x.is_integral():
            raise NotInRingError(f"{x} is not a ring integer")
        if x.ring != ring:
            raise RingMismatchError("value from a different ring")
        return x.num
    if isinstance(x, int):
        return ring.element(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a ring element")


def witness_for(ring: RingSpec, target, offset=None) -> Witness:
    """Construct a verified witness generating ``target`` from {c, c+1}.

    ``offset`` is the translation c (default: floor of the target, clamped so
    the target lies in [c, c+1]).  In the minus family a target whose
    fractional part has no finite expansion is certified through its
    complement: the complement always has one, and swapping the two leaf
    references turns a witness for 1 - x into a witness for x.
    """
    t = _as_ring_element(ring, target)
    if offset is None:
        off = t.floor()
        # put targets that are exact integers at the left end of their pair
        c = ring.element(off)
    else:
        c = _as_ring_element(ring, offset)
    frac = t - c
    sl = frac.sign() if (frac.a, frac.b) != (0, 0) else 0
    one_minus = 1 - frac
    sr = one_minus.sign() if (one_minus.a, one_minus.b) != (0, 0) else 0
    if sl < 0 or sr < 0:
        raise OutOfWindowError(f"target {t} outside [{c} .. {c + 1}]")
    if sl == 0:
        root: TreeNode = LEAF_ZERO
    elif sr == 0:
        root = LEAF_ONE
    elif has_finite_expansion(frac):
        digits = list(expand_greedy(frac).fraction_digits())
        root = _tree_from_digits(ring, digits)
    else:
        digits = list(expand_greedy(one_minus).fraction_digits())
        root = _swap_leaves(_tree_from_digits(ring, digits))
    w = Witness(ring, root, (ring.zero, ring.one), c)
    if not verify_witness(w, t):  # pragma: no cover - construction invariant
        raise AssertionError(f"constructed witness failed verification for {t}")
    return w


def verify_witness(w: Witness, claimed) -> bool:
    """Exact check: the witness evaluates to ``claimed`` and every
    intermediate value stays inside the convex hull of its seed pair."""
    ring = w.ring
    t = _as_ring_element(ring, claimed)
    l0, l1 = w._leaf_pairs()
    m, eps = ring.m, ring.eps
    lo = min(ring.element(*l0), ring.element(*l1))
    hi = max(ring.element(*l0), ring.element(*l1))
    dmax = ring.digit_max
    memo: dict = {}
    ok = True

    def rec(n) -> tuple[int, int]:
        nonlocal ok
        v = memo.get(n)
        if v is not None:
            return v
        if isinstance(n, Leaf):
            if n.idx not in (0, 1):
                raise DigitRangeError(f"leaf index {n.idx} must be 0 or 1")
            v = l1 if n.idx else l0
        else:
            if not 1 <= n.op <= dmax:
                raise DigitRangeError(f"op index {n.op} outside 1..{dmax}")
            la, lb = rec(n.left)
            ra, rb = rec(n.right)
            da, db = n.op * (la - ra), n.op * (lb - rb)
            sa, sb = db - eps * m * da, eps * da
            v = (ra + sa, rb + sb)
            val = ring.element(*v)
            if val < lo or hi < val:
                ok = False
        memo[n] = v
        return v

    a, b = rec(w.root)
    return ok and (a, b) == (t.a, t.b)


# ---------------------------------------------------------------------------
# op index reduction
# ---------------------------------------------------------------------------


def index_cap(ring: RingSpec) -> int:
    """Largest op index i with i/beta <= 1/2: every index can be rewritten
    down to this cap (minus family rings with even m also need a searched
    template for the middle index)."""
    if ring.eps == 1:
        return (ring.m + 1) // 2
    return (ring.m - 1) // 2


def _op_coeff_pair(ring: RingSpec, i: int) -> tuple[int, int]:
    # i/beta as an (a, b) pair
    return _pair_shift_down(ring.m, ring.eps, i, 0)


def _formal_coefficient(ring: RingSpec, root: TreeNode) -> tuple[int, int]:
    """Left-leaf coefficient of a tree over formal seeds: value with
    leaf1 -> 1, leaf0 -> 0.  A tree computes c*x + (1-c)*y; this returns c."""
    return _eval_tree(ring, root, (0, 0), (1, 0))


def _instantiate(tmpl: TreeNode, for_one: TreeNode, for_zero: TreeNode) -> TreeNode:
    memo: dict = {}

    def rec(n) -> TreeNode:
        if isinstance(n, Leaf):
            return for_one if n.idx else for_zero
        r = memo.get(n)
        if r is None:
            r = Node(n.op, rec(n.left), rec(n.right))
            memo[n] = r
        return r

    return rec(tmpl)


@lru_cache(maxsize=None)
def _template_search(
    ring: RingSpec, j: int, cap: int, max_depth: int, state_cap: int, work_budget: int
) -> TreeNode | None:
    """Bounded BFS in coefficient space for a tree over ops 1..cap whose
    left-leaf coefficient equals j/beta.  Deterministic; returns None when
    the budgets run out before the coefficient is reached."""
    m, eps = ring.m, ring.eps
    target = _op_coeff_pair(ring, j)
    states: dict[tuple[int, int], TreeNode] = {
        (1, 0): LEAF_ONE,
        (0, 0): LEAF_ZERO,
    }
    if target in states:
        return states[target]
    order = [(1, 0), (0, 0)]
    frontier = list(order)
    work = 0
    for depth in range(max_depth):
        new: list[tuple[int, int]] = []
        for xa, xb in frontier:
            for ya, yb in order:
                for pair in ((xa, xb, ya, yb), (ya, yb, xa, xb)):
                    ca, cb, da_, db_ = pair
                    for i in range(1, cap + 1):
                        work += 1
                        if work > work_budget:
                            log.debug("template search for %d/beta: work budget out", j)
                            return None
                        # c = y + i*(x - y)/beta in coefficient space
                        dqa, dqb = ca - da_, cb - db_
                        ta = i * dqa
                        tb = i * dqb
                        sa, sb = tb - eps * m * ta, eps * ta
                        z = (da_ + sa, db_ + sb)
                        if z in states:
                            continue
                        node = Node(i, states[(ca, cb)], states[(da_, db_)])
                        if z == target:
                            return node
                        states[z] = node
                        new.append(z)
                        if len(states) > state_cap:
                            log.debug("template search for %d/beta: state cap out", j)
                            return None
        if not new:
            return None
        order.extend(new)
        frontier = new
    return None


def find_rewrite_template(
    ring: RingSpec,
    j: int,
    max_index: int | None = None,
    max_depth: int = 8,
    state_cap: int = 20_000,
    work_budget: int = 2_000_000,
) -> TreeNode | None:
    """Search for a tree computing x ⊢_j y using only op indices <= cap.

    Returns the template (leaves: leaf1 = x, leaf0 = y) or None when the
    bounded search exhausts its budgets.  Found templates are verified
    exactly before being returned.
    """
    if not 1 <= j <= ring.digit_max:
        raise OutOfRangeError(f"op index {j} outside 1..{ring.digit_max}")
    cap = index_cap(ring) if max_index is None else max_index
    if cap < 1:
        raise OutOfRangeError("index cap must be at least 1")
    tmpl = _template_search(ring, j, cap, max_depth, state_cap, work_budget)
    if tmpl is not None and _formal_coefficient(ring, tmpl) != _op_coeff_pair(ring, j):
        raise AssertionError("template search returned an unverified tree")
    return tmpl


@lru_cache(maxsize=None)
def _checked_rewrite(ring: RingSpec, cap: int, i: int) -> tuple:
    """Verified rewrite rule for op index i under the given cap.

    Returns a descriptor consumed by ``_apply_rewrite``:
      ("direct",)          i <= cap, keep as is;
      ("pair_plus", k)     plus family, via (x ⊢_{k+1} y) ⊢_1 (x ⊢_k y) = y ⊢_{m-k} x;
      ("pair_minus", k)    minus family, via (x ⊢_k y) ⊢_1 (x ⊢_{k+1} y) = y ⊢_{m-1-k} x;
      ("template", tree)   searched template.
    Each rule is checked once, symbolically, before being cached.
    """
    if i <= cap:
        return ("direct",)
    kind: tuple | None = None
    if ring.eps == 1:
        k = ring.m - i
        if 0 <= k and k + 1 <= cap:
            kind = ("pair_plus", k)
    else:
        k = ring.m - 1 - i
        if 0 <= k and k + 1 <= cap:
            kind = ("pair_minus", k)
    if kind is None:
        tmpl = find_rewrite_template(ring, i, cap)
        if tmpl is None:
            raise NoRewriteError(
                f"no rewrite found for op index {i} under cap {cap}", index=i
            )
        kind = ("template", tmpl)
    built = _apply_rewrite(kind, LEAF_ONE, LEAF_ZERO)
    if _formal_coefficient(ring, built) != _op_coeff_pair(ring, i):
        raise AssertionError(f"rewrite rule for index {i} failed symbolic check")
    return kind


def _apply_rewrite(kind: tuple, left: TreeNode, right: TreeNode) -> TreeNode:
    tag = kind[0]
    if tag == "pair_plus":
        k = kind[1]
        inner = left if k == 0 else Node(k, right, left)
        return Node(1, Node(k + 1, right, left), inner)
    if tag == "pair_minus":
        k = kind[1]
        inner = left if k == 0 else Node(k, right, left)
        return Node(1, inner, Node(k + 1, right, left))
    if tag == "template":
        return _instantiate(kind[1], left, right)
    raise AssertionError(f"unknown rewrite tag {tag!r}")  # pragma: no cover


def reduce_witness(w: Witness, max_index: int | None = None) -> Witness:
    """Rewrite every op index above the cap, preserving the exact value.

    Raises NoRewriteError when an index admits neither a closed-form rule
    nor a searched template within the default budgets.
    """
    ring = w.ring
    cap = index_cap(ring) if max_index is None else max_index
    if cap < 1:
        raise OutOfRangeError("index cap must be at least 1")
    memo: dict = {}

    def rec(n) -> TreeNode:
        if isinstance(n, Leaf):
            return n
        r = memo.get(n)
        if r is None:
            kind = _checked_rewrite(ring, cap, n.op)
            if kind[0] == "direct":
                nl, nr = rec(n.left), rec(n.right)
                r = n if nl is n.left and nr is n.right else Node(n.op, nl, nr)
            else:
                r = _apply_rewrite(kind, rec(n.left), rec(n.right))
            memo[n] = r
        return r

    reduced = Witness(ring, rec(w.root), w.seeds, w.offset)
    if not verify_witness(reduced, w.evaluate()):  # pragma: no cover - rewrite invariant
        raise AssertionError("reduced witness failed verification")
    return reduced


# ---------------------------------------------------------------------------
# binomial normal form
# ---------------------------------------------------------------------------


def flatten_to_binomial(w: Witness, n: int) -> list[int]:
    """Coefficients b_0..b_n with value = sum b_k s^k (1-s)^(n-k).

    Only defined for witnesses using a single op index i0 (s = i0/beta).
    Each b_k counts seed-1 leaves weighted by path multiplicities, so
    0 <= b_k <= C(n, k) automatically; the expansion is re-evaluated
    exactly against the witness value before returning.
    """
    if n < 0:
        raise OutOfRangeError("exponent must be nonnegative")
    ops = w.op_indices()
    if len(ops) > 1:
        raise MixedParameterError(
            f"witness mixes op indices {sorted(ops)}; binomial form needs one"
        )
    d = w.depth()
    if n < d:
        raise DepthTooSmallError(f"exponent {n} below witness depth {d}")
    i0 = next(iter(ops)) if ops else 1

    # node -> {(s_exp, t_exp): count of seed-1 leaves}, t tracking (1-s)
    memo: dict = {}

    def rec(node) -> dict[tuple[int, int], int]:
        if isinstance(node, Leaf):
            return {(0, 0): 1} if node.idx else {}
        poly = memo.get(node)
        if poly is None:
            poly = {}
            for (a, b), cnt in rec(node.left).items():
                key = (a + 1, b)
                poly[key] = poly.get(key, 0) + cnt
            for (a, b), cnt in rec(node.right).items():
                key = (a, b + 1)
                poly[key] = poly.get(key, 0) + cnt
            memo[node] = poly
        return poly

    coeffs = [0] * (n + 1)
    for (a, b), cnt in rec(w.root).items():
        # pad s^a (1-s)^b with (s + (1-s))^(n-a-b)
        rest = n - a - b
        for k in range(a, a + rest + 1):
            coeffs[k] += cnt * comb(rest, k - a)
    for k, c in enumerate(coeffs):
        if not 0 <= c <= comb(n, k):  # pragma: no cover - structural invariant
            raise AssertionError(f"binomial coefficient b_{k} = {c} out of bounds")

    ring = w.ring
    s = ring.element(i0).mul_beta_pow(-1)
    t = 1 - s
    total = ring.zero
    spow = [ring.one]
    tpow = [ring.one]
    for _ in range(n):
        spow.append(spow[-1] * s)
        tpow.append(tpow[-1] * t)
    for k, c in enumerate(coeffs):
        if c:
            total = total + c * spow[k] * tpow[n - k]
    if total != w.evaluate() - w.offset:  # pragma: no cover - structural invariant
        raise AssertionError("binomial form does not re-evaluate to the witness value")
    return coeffs


# ---------------------------------------------------------------------------
# divisibility certificates and forcing classification
# ---------------------------------------------------------------------------


class Divisibility(Enum):
    """Outcome of the two-sided divisibility test used to pinch closures."""

    DIVIDES_Y = "DividesY"
    DIVIDES_Y_MINUS_1 = "DividesYMinus1"
    BOTH = "Both"
    NEITHER = "Neither"


def divisibility_filter(y: QuadInt, s_w: QuadInt) -> Divisibility:
    """Which of y, y-1 the window parameter s_w divides in Z[beta].

    Every point of the closure of {0, 1} under a single parameter s_w
    satisfies s_w | y or s_w | y - 1 when s_w in {1/beta, 1 - 1/beta}
    generates a forcing pair; NEITHER certifies non-membership.
    """
    if y.ring != s_w.ring:
        raise RingMismatchError("value and parameter must share one ring")
    dy = s_w.divides(y) is not None
    dy1 = s_w.divides(y - 1) is not None
    if dy and dy1:
        return Divisibility.BOTH
    if dy:
        return Divisibility.DIVIDES_Y
    if dy1:
        return Divisibility.DIVIDES_Y_MINUS_1
    return Divisibility.NEITHER


def classify_forcing(ring: RingSpec) -> list[QuadInt]:
    """Window parameters s_w in {1/beta, 1 - 1/beta} with s_w | 2 and
    (1 - s_w) | 2: exactly these force interval model sets from two seeds."""
    inv = ring.inv_beta
    out = []
    for cand in (inv, 1 - inv):
        if cand.divides(2) is not None and (1 - cand).divides(2) is not None:
            out.append(cand)
    return out


@dataclass(frozen=True)
class SweepRow:
    """One ring's forcing verdict with the parameters on both sides."""

    ring: RingSpec
    window_side: tuple[QuadInt, ...]
    direct_side: tuple[QuadInt, ...]

    @property
    def forcing(self) -> bool:
        return bool(self.window_side)


def forcing_sweep(max_m: int) -> list[SweepRow]:
    """Classify every admitted ring with m <= max_m; plus family first."""
    if max_m < 4:
        raise OutOfRangeError("sweep needs max_m >= 4 to cover both families")
    rows = []
    for eps in (1, -1):
        lo = 1 if eps == 1 else 4
        for m in range(lo, max_m + 1):
            ring = RingSpec(m, eps)
            window = tuple(classify_forcing(ring))
            rows.append(SweepRow(ring, window, tuple(p.conj() for p in window)))
    return rows


def characterizing_params(ring: RingSpec) -> ParamSet:
    """The direct-side family conj(i/beta), i = 1..cap: the smallest s-convex
    parameter set whose closure of two consecutive integers fills the ring
    points of the interval between them."""
    inv = ring.inv_beta
    params = tuple((ring.element(i) * inv).conj() for i in range(1, index_cap(ring) + 1))
    return ParamSet(ring, params)


# ---------------------------------------------------------------------------
# bulk completeness scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanReport:
    """Outcome of a full witness sweep over one ring.

    ``targets`` counts the ring elements of [0, 1] whose expansion fits in
    ``max_len`` digits (the endpoints 0 and 1 included); ``complements``
    counts the minus-family values certified through 1 - x.  ``failures`` is
    the number of targets whose witness, reduced witness, or index bound
    check did not hold; a correct implementation reports zero.
    """

    ring: RingSpec
    max_len: int
    cap: int
    targets: int
    complements: int
    failures: int
    max_op_index: int
    nodes: int
    first_failure: str | None

    @property
    def ok(self) -> bool:
        return self.failures == 0


def scan_witness_completeness(
    ring: RingSpec, max_len: int = 6, max_index: int | None = None
) -> ScanReport:
    """Witness, verify, reduce, and re-verify every ring element of [0, 1]
    with expansion length at most ``max_len`` (minus family: complements too).

    Equivalent to running ``witness_for`` / ``verify_witness`` /
    ``reduce_witness`` per element, but all targets of one ring share a
    single tree DAG and memoized evaluation, which keeps full sweeps over
    hundreds of thousands of strings fast.
    """
    if max_len < 1:
        raise OutOfRangeError("max_len must be at least 1")
    m, eps = ring.m, ring.eps
    cap = index_cap(ring) if max_index is None else max_index
    if cap < 1:
        raise OutOfRangeError("index cap must be at least 1")
    disc = ring.disc
    dmax = ring.digit_max

    # rewrite descriptors for every op index the builder can emit
    rewrites = {i: _checked_rewrite(ring, cap, i) for i in range(1, dmax + 1)}

    # 1/beta^k pairs for incremental target values
    invpow = [(1, 0)]
    for _ in range(max_len):
        invpow.append(_pair_shift_down(m, eps, *invpow[-1]))

    def sgn(a: int, b: int) -> int:
        if b == 0:
            return -1 if a < 0 else (1 if a > 0 else 0)
        if b > 0:
            t = -2 * a - m * b
            if t < 0:
                return 1
            return 1 if b * b * disc > t * t else -1
        q = -b
        t = 2 * a - m * q
        if t < 0:
            return -1
        return 1 if t * t > q * q * disc else -1

    failures = 0
    first_failure: str | None = None
    hull_ok = True

    val: dict = {LEAF_ZERO: (0, 0), LEAF_ONE: (1, 0)}

    def ev(n) -> tuple[int, int]:
        nonlocal hull_ok
        v = val.get(n)
        if v is not None:
            return v
        la, lb = ev(n.left)
        ra, rb = ev(n.right)
        da, db = n.op * (la - ra), n.op * (lb - rb)
        va, vb = ra + db - eps * m * da, rb + eps * da
        if sgn(va, vb) < 0 or sgn(1 - va, -vb) < 0:
            hull_ok = False
        v = (va, vb)
        val[n] = v
        return v

    red: dict = {LEAF_ZERO: LEAF_ZERO, LEAF_ONE: LEAF_ONE}

    def rd(n):
        r = red.get(n)
        if r is None:
            kind = rewrites[n.op]
            if kind[0] == "direct":
                nl, nr = rd(n.left), rd(n.right)
                r = n if nl is n.left and nr is n.right else Node(n.op, nl, nr)
            else:
                r = _apply_rewrite(kind, rd(n.left), rd(n.right))
            red[n] = r
        return r

    swp: dict = {LEAF_ZERO: LEAF_ONE, LEAF_ONE: LEAF_ZERO}

    def sw(n):
        r = swp.get(n)
        if r is None:
            r = Node(n.op, sw(n.left), sw(n.right))
            swp[n] = r
        return r

    mix: dict = {LEAF_ZERO: 0, LEAF_ONE: 0}

    def mi(n) -> int:
        r = mix.get(n)
        if r is None:
            r = max(n.op, mi(n.left), mi(n.right))
            mix[n] = r
        return r

    targets = 2  # the endpoints, witnessed by bare leaves
    complements = 0
    max_op_seen = 0
    if ev(LEAF_ZERO) != (0, 0) or ev(LEAF_ONE) != (1, 0):  # pragma: no cover
        raise AssertionError("leaf evaluation is broken")

    def fail(msg: str) -> None:
        nonlocal failures, first_failure
        failures += 1
        if first_failure is None:
            first_failure = msg

    wraps: list[TreeNode] = []

    def check(ta: int, tb: int, e: int, m1, m0) -> None:
        nonlocal targets, complements, max_op_seen
        node: TreeNode = Node(e, m1, m0)
        for wnode in reversed(wraps):
            node = Node(1, node, wnode)
        targets += 1
        top = mi(node)
        if top > max_op_seen:
            max_op_seen = top
        if ev(node) != (ta, tb):
            fail(f"witness for {ta},{tb} evaluates wrong")
            return
        rnode = rd(node)
        if ev(rnode) != (ta, tb):
            fail(f"reduced witness for {ta},{tb} evaluates wrong")
        elif mi(rnode) > cap:
            fail(f"reduced witness for {ta},{tb} keeps index {mi(rnode)} > {cap}")
        if eps == -1:
            ca, cb = 1 - ta, -tb
            snode = sw(node)
            complements += 1
            if ev(snode) != (ca, cb):
                fail(f"complement witness for {ca},{cb} evaluates wrong")
                return
            rsnode = rd(snode)
            if ev(rsnode) != (ca, cb):
                fail(f"reduced complement witness for {ca},{cb} evaluates wrong")
            elif mi(rsnode) > cap:
                fail(f"reduced complement for {ca},{cb} keeps index {mi(rsnode)} > {cap}")

    def dfs(depth: int, m0, m1, va: int, vb: int, after_max: bool, hot: bool, pending: int) -> None:
        ipa, ipb = invpow[depth + 1]
        more = depth + 1 < max_len
        for c in range(dmax + 1):
            if eps == 1:
                if after_max and c:
                    break
            elif hot and c == m - 1:
                continue
            nva, nvb = va + c * ipa, vb + c * ipb
            e = c + pending
            if c:
                check(nva, nvb, e, m1, m0)
            if not more:
                continue
            if eps == 1:
                if after_max:
                    dfs(depth + 1, m0, m1, nva, nvb, False, False, 0)
                elif c == m:
                    dfs(depth + 1, Node(m, m1, m0), m1, nva, nvb, True, False, 0)
                elif c:
                    dfs(depth + 1, Node(c, m1, m0), Node(c + 1, m1, m0), nva, nvb, False, False, 0)
                else:
                    dfs(depth + 1, m0, Node(1, m1, m0), nva, nvb, False, False, 0)
            else:
                nhot = c == m - 1 or (hot and c == m - 2)
                if e == m - 1:
                    wraps.append(m1)
                    dfs(depth + 1, m0, m1, nva, nvb, False, nhot, 1)
                    wraps.pop()
                elif e:
                    dfs(depth + 1, Node(e, m1, m0), Node(e + 1, m1, m0), nva, nvb, False, nhot, 0)
                else:
                    dfs(depth + 1, m0, Node(1, m1, m0), nva, nvb, False, nhot, 0)

    dfs(0, LEAF_ZERO, LEAF_ONE, 0, 0, False, False, 0)

    if not hull_ok:
        fail("an intermediate witness value left the seed hull")
    log.info(
        "scan %s len<=%d: %d targets, %d complements, %d failures, %d nodes",
        ring, max_len, targets, complements, failures, len(val),
    )
    return ScanReport(
        ring=ring,
        max_len=max_len,
        cap=cap,
        targets=targets,
        complements=complements,
        failures=failures,
        max_op_index=max_op_seen,
        nodes=len(val),
        first_failure=first_failure,
    )
