"""Positive-cone search on a finite ball of the group.

A bi-order (resp. left order) restricts to the ball as a set ``C`` of
elements with

* the identity not in ``C`` and exactly one of ``e``, ``e^-1`` in ``C``;
* ``e_i, e_j in C`` and ``e_i e_j = e_k`` in the ball imply ``e_k in C``;
* (bi-orders only) ``e_i in C`` and ``e_h^-1 e_i e_h = e_k`` in the ball
  imply ``e_k in C``.

:func:`search_cone` decides whether such a set exists by backtracking with
unit propagation.  A refutation is a theorem about the whole group: no order
of the requested kind exists.  A cone found on the ball says nothing beyond
the ball.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from treefree import _kernels as K
from treefree.errors import BudgetExhausted
from treefree.hnn import HnnWord, MultipleHnnPresentation, format_hnn_word, parse_hnn_word

__all__ = [
    "Ball",
    "TraceStep",
    "ConeVerdict",
    "enumerate_ball",
    "search_cone",
    "check_cone",
    "replay_refutation",
    "replay_json",
    "verdict_to_json",
    "free_ball_size",
    "DEFAULT_BALL_BUDGET",
]

DEFAULT_BALL_BUDGET = 10_000_000

ASSUME = "assume"
PRODUCT_CLOSURE = "product-closure"
CONJUGATION = "conjugation-invariance"
IDENTITY = "identity-not-positive"
ANTISYMMETRY = "inversion-antisymmetry"

_AXIOM_BY_KIND = {K.PRODUCT: PRODUCT_CLOSURE, K.CONJ: CONJUGATION}


@dataclass(eq=False)
class Ball:
    """Distinct elements of word length <= ``radius`` with their partial tables.

    ``product_table[i, j]``, ``conj_table[i, h]`` hold an element index or -1
    when the product ``e_i e_j`` (resp. conjugate ``e_h^-1 e_i e_h``) falls
    outside the ball.  ``conj_table`` is empty when built without conjugates.
    """

    presentation: MultipleHnnPresentation
    radius: int
    elements: list[HnnWord]
    product_table: np.ndarray
    inverse_table: np.ndarray
    conj_table: np.ndarray
    equality_tests: int = 0
    _keys: dict | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def has_conjugates(self) -> bool:
        return self.conj_table.shape[0] > 0

    def word(self, i: int) -> str:
        return format_hnn_word(self.presentation, self.elements[i])

    def index(self, text: str) -> int:
        """Index of the element spelled by ``text`` (its ball representative)."""
        if self._keys is None:
            self._keys = {_nf_key(self.presentation, e): i for i, e in enumerate(self.elements)}
        key = _nf_key(self.presentation, parse_hnn_word(self.presentation, text))
        try:
            return self._keys[key]
        except KeyError:
            raise KeyError(f"{text!r} is not in the ball of radius {self.radius}") from None


def free_ball_size(generators: int, radius: int) -> int:
    """Number of reduced words of length <= ``radius`` on ``generators`` letters."""
    g = generators
    return 1 + sum(2 * g * (2 * g - 1) ** (k - 1) for k in range(1, radius + 1))


def _packed_relations(p: MultipleHnnPresentation):
    return K.pack_relations([(s.codes, t.codes) for s, t in p.relations], p.rank)


def _nf_key(p: MultipleHnnPresentation, w: HnnWord) -> bytes:
    rel = _packed_relations(p)
    codes = np.asarray(w.combined_codes(p.rank), dtype=np.int64)
    return K.normal_form(codes, p.rank, *rel).tobytes()


def enumerate_ball(
    p: MultipleHnnPresentation,
    radius: int,
    *,
    budget: int = DEFAULT_BALL_BUDGET,
    conjugates: bool = True,
) -> Ball:
    """Enumerate the ball of ``radius`` and fill its tables.

    Candidates are the reduced words over base and stable letters in shortlex
    order; the first spelling of each element is kept.  Each table entry
    costs one equality test against the ball; ``budget`` caps the total.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    rank = p.rank
    rel = _packed_relations(p)
    candidates = [w.codes for w in p.combined.words_up_to(radius)]
    used = len(candidates)
    if used > budget:
        raise BudgetExhausted(f"{used} candidates exceed the budget", used, budget)

    mat, lens = K.pack_words(candidates)
    nf_mat, nf_len, hashes = K.normal_forms(mat, lens, rank, *rel)
    seen: dict[bytes, int] = {}
    keep = []
    for r in range(len(candidates)):
        key = nf_mat[r, : nf_len[r]].tobytes()
        if key not in seen:
            seen[key] = r
            keep.append(r)
    keep = np.asarray(keep, dtype=np.int64)
    n = len(keep)
    need = n + n * n * (2 if conjugates else 1)
    if used + need > budget:
        raise BudgetExhausted(
            f"ball of {n} elements needs {used + need} equality tests", used, budget
        )
    inv, product, conj = K.element_tables(
        mat[keep], lens[keep], rank, *rel, nf_mat[keep], nf_len[keep], hashes[keep], conjugates
    )
    elements = [HnnWord.from_combined_codes(candidates[r], rank) for r in keep]
    return Ball(p, radius, elements, product, inv, conj, used + need)


class TraceStep(NamedTuple):
    """One deduction.  ``derives`` is the element concluded to lie in the cone.

    For closure steps ``elements`` is the table fact ``(i, j, k)``; the step
    derives either ``k`` or, through sign totality, the inverse of one of the
    premises whose membership would force a non-member into the cone.
    """

    axiom: str
    elements: tuple[int, ...]
    derives: int | None = None


@dataclass
class _Leaf:
    steps: tuple[TraceStep, ...]


@dataclass
class _Node:
    decision: int
    positive: "_Leaf | _Node"
    negative: "_Leaf | _Node"


@dataclass
class ConeVerdict:
    mode: str
    radius: int
    refuted: bool
    cone: frozenset[int] = frozenset()
    tree: "_Leaf | _Node | None" = None
    nodes: int = 0
    inverse: np.ndarray | None = field(default=None, repr=False)

    @property
    def kind(self) -> str:
        return "refuted" if self.refuted else "no-obstruction"

    def branches(self) -> list[list[TraceStep]]:
        """Refutation as independent branches, each opening with its assumptions."""
        out: list[list[TraceStep]] = []

        def walk(t, path, inv):
            if isinstance(t, _Leaf):
                out.append([TraceStep(ASSUME, (m,), m) for m in path] + list(t.steps))
            else:
                walk(t.positive, path + [t.decision], inv)
                walk(t.negative, path + [int(inv[t.decision])], inv)

        if self.tree is not None:
            walk(self.tree, [], self.inverse)
        return out

    def trace(self) -> list[TraceStep]:
        return [s for b in self.branches() for s in b]


def _lits(ball_inv, kind, i, j, k) -> list[int]:
    if kind == K.PRODUCT:
        return [int(ball_inv[i]), int(ball_inv[j]), int(k)]
    return [int(ball_inv[i]), int(k)]


class _Search:
    def __init__(self, ball: Ball, bi: bool):
        n = len(ball)
        self.n = n
        self.inv = np.ascontiguousarray(ball.inverse_table, dtype=np.int32)
        self.state = np.zeros(n, dtype=np.int8)
        self.state[0] = -1
        self.trail = np.zeros(n, dtype=np.int32)
        self.tail = np.zeros(1, dtype=np.int64)
        self.head = np.zeros(1, dtype=np.int64)
        self.reason = np.zeros((n, 4), dtype=np.int32)
        self.conflict = np.zeros(4, dtype=np.int32)
        self.product = np.ascontiguousarray(ball.product_table, dtype=np.int32)
        self.rev = _reverse_index(self.product, n)
        if bi:
            if not ball.has_conjugates:
                raise ValueError("bi-order search needs a ball built with conjugates")
            self.conj = np.ascontiguousarray(ball.conj_table, dtype=np.int32)
        else:
            self.conj = np.full((0, 0), -1, dtype=np.int32)
        self.crev = _reverse_index(self.conj, n)
        self.nodes = 0

    def propagate(self) -> bool:
        return bool(
            K.propagate(
                self.state, self.inv, self.trail, self.tail, self.head, self.reason,
                self.product, *self.rev, self.conj, *self.crev, self.conflict,
            )
        )

    def assign(self, m: int) -> None:
        K.assign(m, K.DECISION, 0, 0, 0, self.state, self.inv, self.trail, self.tail, self.reason)

    def undo(self, mark: int) -> None:
        K.undo(self.state, self.inv, self.trail, self.tail, self.head, mark)

    def next_free(self) -> int | None:
        free = np.flatnonzero(self.state == 0)
        return int(free[0]) if free.size else None

    def premises(self, m: int) -> list[int]:
        kind, i, j, k = (int(v) for v in self.reason[m])
        if kind == K.DECISION:
            return []
        lits = set(_lits(self.inv, kind, i, j, k))
        return [int(self.inv[e]) for e in lits if e != m and e != 0]

    def analyze(self) -> tuple[_Leaf, frozenset[int]]:
        kind, i, j, k = (int(v) for v in self.conflict)
        lits = set(_lits(self.inv, kind, i, j, k))
        final = [TraceStep(_AXIOM_BY_KIND[kind], (i, j, k), k)]
        if k == 0:
            final.append(TraceStep(IDENTITY, (0,)))
            need = [int(self.inv[e]) for e in lits if e != k]
        else:
            final.append(TraceStep(ANTISYMMETRY, (k, int(self.inv[k]))))
            need = [int(self.inv[e]) for e in lits if e != k] + [int(self.inv[k])]
        seen: set[int] = set()
        stack = [m for m in need if m != 0]
        while stack:
            m = stack.pop()
            if m in seen:
                continue
            seen.add(m)
            stack.extend(self.premises(m))
        order = {int(m): t for t, m in enumerate(self.trail[: self.tail[0]])}
        steps = []
        deps = set()
        for m in sorted(seen, key=order.__getitem__):
            kind_m, a, b, c = (int(v) for v in self.reason[m])
            if kind_m == K.DECISION:
                deps.add(min(m, int(self.inv[m])))
            else:
                steps.append(TraceStep(_AXIOM_BY_KIND[kind_m], (a, b, c), m))
        return _Leaf(tuple(steps + final)), frozenset(deps)

    def dfs(self):
        """Return ``None`` if a full assignment exists, else ``(tree, deps)``."""
        self.nodes += 1
        if self.propagate():
            return self.analyze()
        d = self.next_free()
        if d is None:
            return None
        results = []
        for m in (d, int(self.inv[d])):
            mark = int(self.tail[0])
            self.assign(m)
            res = self.dfs()
            if res is None:
                return None
            self.undo(mark)
            if d not in res[1]:
                # this refutation never used the decision on d
                return res
            results.append(res)
        (t1, d1), (t2, d2) = results
        return _Node(d, t1, t2), (d1 | d2) - {d}


def _reverse_index(table: np.ndarray, n: int):
    """CSR lists of ``(i, j)`` per result ``table[i, j]``."""
    if table.size == 0:
        return (np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int32))
    ii, jj = np.nonzero(table >= 0)
    kk = table[ii, jj]
    order = np.argsort(kk, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(kk, minlength=n), out=ptr[1:])
    return ptr, ii[order].astype(np.int32), jj[order].astype(np.int32)


def search_cone(ball: Ball, mode: str = "bi") -> ConeVerdict:
    """Search for a positive cone on ``ball``; ``mode`` is ``"bi"`` or ``"left"``."""
    if mode not in ("bi", "left"):
        raise ValueError(f"mode must be 'bi' or 'left', not {mode!r}")
    search = _Search(ball, mode == "bi")
    limit = max(1000, 4 * len(ball) + 100)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        res = search.dfs()
    finally:
        sys.setrecursionlimit(old)
    if res is None:
        cone = frozenset(int(e) for e in np.flatnonzero(search.state == 1))
        return ConeVerdict(mode, ball.radius, False, cone=cone, nodes=search.nodes, inverse=search.inv)
    tree, deps = res
    assert not deps, "a refutation must not depend on open decisions"
    return ConeVerdict(mode, ball.radius, True, tree=tree, nodes=search.nodes, inverse=search.inv)


def check_cone(ball: Ball, cone: Iterable[int], mode: str = "bi") -> bool:
    """Independently validate a cone against every order axiom on the ball."""
    n = len(ball)
    member = np.zeros(n, dtype=bool)
    for e in cone:
        if not 0 <= e < n:
            return False
        member[e] = True
    if member[0]:
        return False
    inv = np.asarray(ball.inverse_table)
    rest = np.arange(1, n)
    if not np.all(member[rest] ^ member[inv[rest]]):
        return False
    prod = ball.product_table[np.ix_(member, member)]
    hits = prod[prod >= 0]
    if not np.all(member[hits]):
        return False
    if mode == "bi":
        if not ball.has_conjugates:
            return False
        conj = ball.conj_table[member]
        hits = conj[conj >= 0]
        if not np.all(member[hits]):
            return False
    return True


def _step_ok(ball: Ball, mode: str, step: TraceStep, known: set[int]) -> bool:
    inv = ball.inverse_table
    if step.axiom in (PRODUCT_CLOSURE, CONJUGATION):
        if len(step.elements) != 3:
            return False
        i, j, k = step.elements
        if step.axiom == PRODUCT_CLOSURE:
            if i == 0 or j == 0 or ball.product_table[i, j] != k:
                return False
            lits = {int(inv[i]), int(inv[j]), k}
        else:
            if mode != "bi" or not ball.has_conjugates or ball.conj_table[i, j] != k:
                return False
            lits = {int(inv[i]), k}
        if step.derives not in lits:
            return False
        # every other literal must already be false
        return all(e == 0 or int(inv[e]) in known for e in lits if e != step.derives)
    if step.axiom == IDENTITY:
        return 0 in known
    if step.axiom == ANTISYMMETRY:
        (a, b) = step.elements
        return b == int(inv[a]) and a in known and b in known
    return False


def _covers(paths: list[tuple[int, ...]], inv) -> bool:
    if len(paths) == 1 and not paths[0]:
        return True
    if any(not p for p in paths):
        return False
    heads = {p[0] for p in paths}
    if len(heads) != 2:
        return False
    a, b = sorted(heads)
    if int(inv[a]) != b:
        return False
    return all(_covers([p[1:] for p in paths if p[0] == h], inv) for h in (a, b))


def replay_refutation(ball: Ball, mode: str, branches: list[list[TraceStep]]) -> bool:
    """Re-check a refutation step by step against the ball tables.

    Each branch must open with its assumptions, use only valid axiom
    instances, and end in a contradiction; the branches' assumptions must
    cover every sign choice.
    """
    if not branches:
        return False
    paths = []
    for branch in branches:
        known: set[int] = set()
        path = []
        steps = list(branch)
        while steps and steps[0].axiom == ASSUME:
            m = steps.pop(0).derives
            path.append(m)
            known.add(m)
        if not steps or steps[-1].axiom not in (IDENTITY, ANTISYMMETRY):
            return False
        for step in steps:
            if not _step_ok(ball, mode, step, known):
                return False
            if step.derives is not None:
                known.add(step.derives)
        paths.append(tuple(path))
    return _covers(paths, ball.inverse_table)


def verdict_to_json(ball: Ball, verdict: ConeVerdict) -> dict:
    def step(s: TraceStep) -> dict:
        out = {"axiom": s.axiom, "elements": [ball.word(e) for e in s.elements]}
        if s.derives is not None:
            out["derives"] = ball.word(s.derives)
        return out

    return {
        "mode": verdict.mode,
        "radius": verdict.radius,
        "verdict": verdict.kind,
        "ball_size": len(ball),
        "cone": [ball.word(e) for e in sorted(verdict.cone)],
        "trace": [step(s) for s in verdict.trace()],
        "conclusive": verdict.refuted,
    }


def replay_json(ball: Ball, data: dict) -> bool:
    """Replay a refutation from its JSON form (as printed by ``order``).

    The flat trace is cut into branches after each contradiction step and
    every word is mapped back onto the ball before :func:`replay_refutation`.
    """
    if data.get("verdict") != "refuted":
        return False
    branches: list[list[TraceStep]] = []
    current: list[TraceStep] = []
    try:
        for item in data["trace"]:
            elems = tuple(ball.index(t) for t in item["elements"])
            der = item.get("derives")
            current.append(TraceStep(item["axiom"], elems, None if der is None else ball.index(der)))
            if item["axiom"] in (IDENTITY, ANTISYMMETRY):
                branches.append(current)
                current = []
    except (KeyError, TypeError, ValueError):
        return False
    if current:
        return False
    return replay_refutation(ball, data["mode"], branches)
