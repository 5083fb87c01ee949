"""Globally optimal training of the two-unit ReLU network at fixed input dimension.

Once it is known which side of ``a1 = 0`` and ``a2 = 0`` every point lies on,
and which points the second-layer unit sees as active, the network output is
linear in ``z = (alpha1, beta1, alpha2, beta2, w0)`` on every point and the
squared loss becomes a convex least-squares program with linear inequality
constraints.  Minimizing over all such activation patterns, and over
``theta, w1, w2 in {-1, +1}``, gives the global optimum.

Two enumeration strategies are provided:

``"enumerate"``
    Literal enumeration: ``Q1`` and ``Q2`` range over all hyperplane
    dichotomies of the inputs, the second-layer splits over dichotomies of the
    induced cells ``T1, T2, T3``, then 8 sign cases times 2 signs of ``w0``.
    The number of programs is counted up front and refused if over budget.

``"branch"`` (default)
    The same pattern space walked as a prefix tree: points are assigned one at
    a time, every prefix must stay a realizable dichotomy, and a subtree is cut
    when the optimum of the program restricted to the assigned points (a valid
    lower bound, since adding points only adds non-negative terms and
    constraints) cannot beat the incumbent.  The swap symmetry
    ``(a1, w1) <-> (a2, w2)`` is factored out and ``theta`` is fixed when the
    labels are one-signed.

For zero-loss questions only one second-layer split per cell needs checking:
with ``theta = +1`` a positive label must be active and a zero label can be
taken inactive, so splits are forced by the labels.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import AffineFunction, Dataset, TwoReluNet, squared_loss
from .geometry import enumerate_dichotomies, realize_fast
from .qp import QuadraticProgram, solve_qp

SIGN_CASES = tuple(itertools.product((1, -1), (1, -1), (1, -1)))  # theta, w1, w2


class BudgetExceeded(RuntimeError):
    """Training refused: the enumeration would exceed the configured budget."""

    def __init__(self, needed: int, budget: int, solved: int = 0):
        self.needed = needed
        self.budget = budget
        self.solved = solved
        super().__init__(
            f"enumeration needs {needed} subproblems (budget {budget}; {solved} solved before refusal)"
        )


class DimensionRefused(BudgetExceeded):
    """Training refused because the input dimension is above ``max_dim``."""

    def __init__(self, d: int, max_dim: int):
        RuntimeError.__init__(self, f"input dimension {d} exceeds the configured cap {max_dim}")
        self.needed = None
        self.budget = None
        self.solved = 0
        self.d = d
        self.max_dim = max_dim


class SubproblemFailure(RuntimeError):
    """A pattern program could not be solved to a verified optimum.

    Skipping it would silently void the global-optimality guarantee, so the
    search stops instead.
    """


def _require_optimal(sol, pattern) -> bool:
    """True for an optimal solve, False for an infeasible program; raise otherwise."""
    if sol.status == "infeasible":
        return False
    if not sol.optimal:
        raise SubproblemFailure(
            f"program for pattern {pattern} ended with status {sol.status!r} "
            f"(KKT residual {sol.kkt_residual:.3g})"
        )
    return True


@dataclass(frozen=True)
class ActivationPattern:
    """Which side of every ReLU each covered point is on.

    ``q1``/``q2`` are signs of ``a1``/``a2`` (``+1`` means ``>= 0``); ``split``
    is ``+1``/``-1`` for an active/inactive second-layer unit and ``0`` for
    points in ``T4`` where the unit sees the constant ``w0``.  ``w0_sign`` is
    ``0`` only when no covered point lies in ``T4``.
    """

    indices: tuple
    q1: tuple
    q2: tuple
    split: tuple
    theta: int
    w1: int
    w2: int
    w0_sign: int

    def cells(self) -> dict:
        out = {1: [], 2: [], 3: [], 4: []}
        for i, s1, s2 in zip(self.indices, self.q1, self.q2):
            out[_cell(s1, s2)].append(i)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def T1(self):
        return self.cells()[1]

    @property
    def T2(self):
        return self.cells()[2]

    @property
    def T3(self):
        return self.cells()[3]

    @property
    def T4(self):
        return self.cells()[4]


def _cell(s1: int, s2: int) -> int:
    if s1 > 0:
        return 1 if s2 > 0 else 3
    return 2 if s2 > 0 else 4


@dataclass
class TrainConfig:
    tol: float = 1e-8
    decision: bool = False
    budget: int = 10**7
    strategy: str = "branch"
    order: str = "input"
    order_seed: int | None = None
    threads: int = 1
    max_dim: int = 5
    refine_theta: bool = False


@dataclass
class TrainResult:
    net: TwoReluNet
    loss: float
    pattern: ActivationPattern
    subproblems_solved: int
    certificate: bool
    decision: bool | None = None
    wall_time: float = 0.0
    refined_loss: float | None = None
    stats: dict = field(default_factory=dict)


def n_variables(d: int) -> int:
    return 2 * d + 3


def _layout(d: int):
    return slice(0, d + 1), slice(d + 1, 2 * d + 2), 2 * d + 2


def build_subprogram(dataset: Dataset, pattern: ActivationPattern) -> QuadraticProgram:
    """The convex program for one activation pattern.

    Variables are ``(alpha1, beta1, alpha2, beta2, w0)``.  Residual rows encode
    the linearized network output on active points, inactive points contribute
    the constant ``y^2`` through ``offset``.
    """
    d = dataset.d
    n = n_variables(d)
    s_a1, s_a2, k_w0 = _layout(d)
    th, w1, w2 = pattern.theta, pattern.w1, pattern.w2
    R, t, G, h = [], [], [], []
    offset = 0.0
    for i, s1, s2, sp in zip(pattern.indices, pattern.q1, pattern.q2, pattern.split):
        xt = np.append(dataset.X[i], 1.0)
        y = float(dataset.y[i])
        r1 = np.zeros(n)
        r1[s_a1] = xt
        r2 = np.zeros(n)
        r2[s_a2] = xt
        G.append(-s1 * r1)
        G.append(-s2 * r2)
        pre = np.zeros(n)
        pre[k_w0] = 1.0
        if s1 > 0:
            pre += w1 * r1
        if s2 > 0:
            pre += w2 * r2
        if s1 < 0 and s2 < 0:
            if pattern.w0_sign > 0:
                R.append(th * pre)
                t.append(y)
            elif pattern.w0_sign < 0:
                offset += y * y
            else:
                raise ValueError("pattern puts a point in T4 but leaves the sign of w0 open")
            continue
        if sp > 0:
            R.append(th * pre)
            t.append(y)
            G.append(-pre)
        else:
            offset += y * y
            G.append(pre)
    if pattern.w0_sign:
        e = np.zeros(n)
        e[k_w0] = -pattern.w0_sign
        G.append(e)
    R = np.array(R).reshape(-1, n)
    G = np.array(G).reshape(-1, n)
    return QuadraticProgram(R, np.array(t), G, np.zeros(G.shape[0]), offset)


def net_from_solution(z, d: int, pattern: ActivationPattern) -> TwoReluNet:
    s_a1, s_a2, k_w0 = _layout(d)
    z = np.asarray(z, dtype=float)
    a1 = AffineFunction(z[s_a1][:d], z[s_a1][d])
    a2 = AffineFunction(z[s_a2][:d], z[s_a2][d])
    return TwoReluNet(a1, a2, z[k_w0], pattern.w1, pattern.w2, pattern.theta)


def zero_net(d: int) -> TwoReluNet:
    return TwoReluNet(AffineFunction.zero(d), AffineFunction.zero(d), 0.0, 1, 1, 1.0)


def _zero_pattern(N: int) -> ActivationPattern:
    return ActivationPattern(tuple(range(N)), (-1,) * N, (-1,) * N, (0,) * N, 1, 1, 1, -1)


def refine_theta(net: TwoReluNet, dataset: Dataset) -> tuple[TwoReluNet, float]:
    """Best positive rescaling of ``theta`` by a closed-form line search."""
    F = np.asarray(net(dataset.X))
    ff = float(F @ F)
    c = float(F @ dataset.y) / ff if ff > 0 else 1.0
    if c <= 0:
        c = 1.0
    refined = TwoReluNet(net.a1, net.a2, net.w0, net.w1, net.w2, net.theta * c)
    return refined, squared_loss(refined, dataset)


def zero_loss_cuts(dataset: Dataset, pattern: ActivationPattern, slack: float) -> QuadraticProgram:
    """The pattern program plus cuts that every near-interpolating net obeys.

    Only used while searching for a network of loss ``<= slack**2``, and only
    for prefixes: points not yet assigned a pattern still have to be fit.  With
    ``p = w0 + w1[a1]_+ + w2[a2]_+`` and target ``y' = theta * y``:

    * ``w1 = w2 = -1``, ``y' > 0``:  ``[a1]_+ + [a2]_+ = w0 - p`` is at most
      ``w0 - y' + slack``, i.e. ``a1, a2, a1 + a2 <= w0 - y' + slack`` and
      ``w0 >= y' - slack``;
    * ``w1 = w2 = +1``:  ``[a1]_+ + [a2]_+ <= y' + slack - w0`` for ``y' > 0``
      and ``<= -w0`` for zero labels (inactive output unit), with the matching
      upper bounds on ``w0``.

    Mixed signs give no convex consequence, so the program is returned as is.
    The ``w0`` bounds of all points are folded into one row; when that row
    would push the count past ``3N + 1`` the pattern's own ``w0`` sign row is
    dropped, which only loosens the prefix bound.
    """
    qp = build_subprogram(dataset, pattern)
    w1, w2, th = pattern.w1, pattern.w2, pattern.theta
    if w1 != w2:
        return qp
    covered = set(pattern.indices)
    rest = [i for i in range(dataset.N) if i not in covered]
    if not rest:
        return qp
    d = dataset.d
    n = n_variables(d)
    s_a1, s_a2, k_w0 = _layout(d)
    yp = th * dataset.y
    rows, rhs = [], []
    for i in rest:
        xt = np.append(dataset.X[i], 1.0)
        if w1 < 0:
            if yp[i] <= 0:
                continue
            bound_w0, c = 1.0, -yp[i] + slack  # a <= w0 + c
        else:
            if yp[i] > 0:
                bound_w0, c = -1.0, yp[i] + slack  # a <= -w0 + c
            else:
                bound_w0, c = -1.0, 0.0
        for m1, m2 in ((1, 0), (0, 1), (1, 1)):
            r = np.zeros(n)
            r[s_a1] += m1 * xt
            r[s_a2] += m2 * xt
            r[k_w0] = -bound_w0
            rows.append(r)
            rhs.append(c)
    # one row bounding w0 over all points (assigned ones obey it too)
    e = np.zeros(n)
    if w1 < 0:
        pos = yp[yp > 0]
        if pos.size:
            e[k_w0] = -1.0
            rows.append(e)
            rhs.append(slack - float(pos.max()))
    else:
        e[k_w0] = 1.0
        rows.append(e)
        rhs.append(0.0 if np.any(yp <= 0) else float(yp.min()) + slack)
    G, h = qp.G, qp.h
    limit = 3 * dataset.N + 1
    if G.shape[0] + len(rows) > limit and pattern.w0_sign:
        G, h = G[:-1], h[:-1]  # the w0 sign row is the last one
    G = np.vstack([G, np.array(rows).reshape(-1, n)])
    h = np.concatenate([h, rhs])
    return QuadraticProgram(qp.R, qp.t, G, h, qp.offset)


# ---------------------------------------------------------------- literal

def _dichotomy_cache(X: np.ndarray):
    cache: dict = {}

    def get(idx: tuple):
        if idx not in cache:
            cache[idx] = [dc.signs for dc in enumerate_dichotomies(X[list(idx)], d=X.shape[1])] if idx else [()]
        return cache[idx]

    return get


def count_subproblems(dataset: Dataset) -> int:
    """Exact number of programs the literal enumeration would solve."""
    X = dataset.X
    get = _dichotomy_cache(X)
    full = get(tuple(range(dataset.N)))
    total = 0
    for q1 in full:
        for q2 in full:
            T = _cells_of(q1, q2)
            total += len(get(T[1])) * len(get(T[2])) * len(get(T[3]))
    return total * len(SIGN_CASES) * 2


def _cells_of(q1, q2) -> dict:
    T = {1: [], 2: [], 3: [], 4: []}
    for i, (s1, s2) in enumerate(zip(q1, q2)):
        T[_cell(s1, s2)].append(i)
    return {k: tuple(v) for k, v in T.items()}


def _train_enumerate(dataset: Dataset, cfg: TrainConfig, subproblem_hook=None) -> TrainResult:
    N = dataset.N
    needed = count_subproblems(dataset)
    if needed > cfg.budget:
        raise BudgetExceeded(needed, cfg.budget)
    get = _dichotomy_cache(dataset.X)
    full = get(tuple(range(N)))
    best = None
    solved = 0
    for q1 in full:
        for q2 in full:
            T = _cells_of(q1, q2)
            for sp1, sp2, sp3 in itertools.product(get(T[1]), get(T[2]), get(T[3])):
                split = [0] * N
                for cell, sp in ((1, sp1), (2, sp2), (3, sp3)):
                    for i, s in zip(T[cell], sp):
                        split[i] = s
                for (th, w1, w2), w0s in itertools.product(SIGN_CASES, (1, -1)):
                    pat = ActivationPattern(tuple(range(N)), q1, q2, tuple(split), th, w1, w2, w0s)
                    qp = build_subprogram(dataset, pat)
                    if subproblem_hook is not None:
                        subproblem_hook(qp, pat)
                    sol = solve_qp(qp)
                    solved += 1
                    if not _require_optimal(sol, pat):
                        continue
                    if best is None or sol.objective < best[0]:
                        best = (sol.objective, sol.z, pat)
                        if cfg.decision and best[0] <= cfg.tol:
                            return _finish(dataset, best, solved, False, cfg, early=True)
    return _finish(dataset, best, solved, True, cfg)


# ---------------------------------------------------------------- branch

def _point_order(dataset: Dataset, cfg: TrainConfig) -> list[int]:
    N = dataset.N
    if cfg.order == "input":
        order = list(range(N))
    elif cfg.order == "reverse":
        order = list(range(N))[::-1]
    elif cfg.order == "spread":
        # farthest-point-first from the centroid
        X = dataset.X
        c = X.mean(axis=0)
        dist = np.linalg.norm(X - c, axis=1)
        order = [int(np.argmax(dist))]
        mind = np.linalg.norm(X - X[order[0]], axis=1)
        while len(order) < N:
            mind[order] = -1
            j = int(np.argmax(mind))
            order.append(j)
            mind = np.minimum(mind, np.linalg.norm(X - X[j], axis=1))
    elif cfg.order == "random":
        order = list(range(N))
    else:
        raise ValueError(f"unknown point order {cfg.order!r}")
    if cfg.order_seed is not None:
        rng = np.random.default_rng(cfg.order_seed)
        order = [order[i] for i in rng.permutation(N)]
    return order


class _Search:
    """Depth-first branch and bound over activation patterns for one sign case."""

    def __init__(self, dataset, order, theta, w1, w2, *, forced, incumbent, tol, budget, hook):
        self.ds = dataset
        self.order = order
        self.theta, self.w1, self.w2 = theta, w1, w2
        self.forced = forced
        self.best = incumbent  # (loss, z, pattern) or None
        self.tol = tol
        self.slack = float(np.sqrt(tol))
        self.budget = budget
        self.hook = hook
        self.solved = 0
        self.lp_calls = 0
        self.nodes = 0

    # a prefix value v can still win if v < best - slack
    def _bound(self) -> float:
        if self.forced:
            return self.tol
        b = self.best[0]
        return b - 1e-12 * (1.0 + abs(b))

    def _extend(self, wit, idx, signs, i, s):
        """Witness for ``signs + [s]`` on ``idx + [i]`` or ``None`` if unrealizable."""
        x = self.ds.X[i]
        if wit is not None and s * float(wit(x)) > 1e-12:
            return wit
        self.lp_calls += 1
        return realize_fast(self.ds.X[idx + [i]], signs + [s])

    def run(self):
        self._node([], [], [], [], 0, None, None, [None, None, None], True)
        return self

    def _options(self, i, w0s, sym):
        y = float(self.ds.y[i]) * self.theta
        opts = []
        for s1, s2 in ((-1, -1), (1, -1), (-1, 1), (1, 1)):
            if sym and self.w1 == self.w2 and (s1, s2) == (-1, 1):
                continue
            cell = _cell(s1, s2)
            if cell == 4:
                if w0s:
                    choices = [w0s]
                elif self.forced:
                    choices = [1] if y > 0 else [-1]
                else:
                    choices = [1, -1]
                for c in choices:
                    opts.append((s1, s2, 0, c))
            else:
                if self.forced:
                    if y < 0:
                        continue
                    splits = [1] if y > 0 else [-1]
                else:
                    splits = [1, -1]
                for sp in splits:
                    opts.append((s1, s2, sp, w0s))
        return opts

    def _node(self, idx, q1, q2, sp, w0s, wq1, wq2, wt, sym):
        self.nodes += 1
        k = len(idx)
        if k == len(self.order):
            return
        i = self.order[k]
        children = []
        for s1, s2, spl, nw0 in self._options(i, w0s, sym):
            c1 = self._extend(wq1, idx, q1, i, s1)
            if c1 is None:
                continue
            c2 = self._extend(wq2, idx, q2, i, s2)
            if c2 is None:
                continue
            cell = _cell(s1, s2)
            nwt = list(wt)
            if cell != 4:
                members = [j for j, a, b in zip(idx, q1, q2) if _cell(a, b) == cell]
                msigns = [s for j, a, b, s in zip(idx, q1, q2, sp) if _cell(a, b) == cell]
                ct = self._extend(wt[cell - 1], members, msigns, i, spl)
                if ct is None:
                    continue
                nwt[cell - 1] = ct
            pat = ActivationPattern(
                tuple(idx + [i]), tuple(q1 + [s1]), tuple(q2 + [s2]), tuple(sp + [spl]),
                self.theta, self.w1, self.w2, nw0,
            )
            if self.forced and k + 1 < len(self.order):
                qp = zero_loss_cuts(self.ds, pat, self.slack)
            else:
                qp = build_subprogram(self.ds, pat)
            if self.hook is not None:
                self.hook(qp, pat)
            if self.solved >= self.budget:
                raise BudgetExceeded(self.solved + 1, self.budget, self.solved)
            sol = solve_qp(qp)
            self.solved += 1
            if not _require_optimal(sol, pat):
                continue
            val = sol.objective
            if (val > self.tol) if self.forced else (val >= self._bound()):
                continue
            if k + 1 == len(self.order):
                self.best = (val, sol.z, pat)
                if self.forced:
                    raise _Found()
                continue
            children.append((sol.objective, len(children), s1, s2, spl, nw0, c1, c2, nwt))
        children.sort(key=lambda c: (c[0], c[1]))
        for val, _, s1, s2, spl, nw0, c1, c2, nwt in children:
            if not self.forced and val >= self._bound():
                continue
            self._node(
                idx + [i], q1 + [s1], q2 + [s2], sp + [spl], nw0, c1, c2, nwt,
                sym and s1 == s2,
            )


class _ZeroSearch(_Search):
    """Search for an interpolating pattern, choosing the most constrained point first.

    At every node each unassigned point is tried against its remaining
    options (sign pair and forced split).  A point with no feasible option
    closes the node, a point with one option is assigned without branching,
    otherwise the point with the fewest options is branched on.  Options found
    infeasible stay excluded in the whole subtree: more assigned points only
    shrink the set of interpolating networks.  An option whose program is
    already satisfied by the node's solution is accepted without a solve.
    """

    def __init__(self, dataset, order, theta, w1, w2, *, tol, budget, hook):
        super().__init__(dataset, order, theta, w1, w2, forced=True, incumbent=None,
                         tol=tol, budget=budget, hook=hook)
        self.rank = {i: r for r, i in enumerate(order)}
        self.screened = 0

    def run(self):
        self._znode([], [], [], [], 0, None, None, [None, None, None], True, None, {})
        return self

    def _try(self, state, i, opt):
        idx, q1, q2, sp, w0s, wq1, wq2, wt, sym, z = state
        s1, s2, spl, nw0 = opt
        c1 = self._extend(wq1, idx, q1, i, s1)
        if c1 is None:
            return None
        c2 = self._extend(wq2, idx, q2, i, s2)
        if c2 is None:
            return None
        cell = _cell(s1, s2)
        nwt = list(wt)
        if cell != 4:
            members = [j for j, a, b in zip(idx, q1, q2) if _cell(a, b) == cell]
            msigns = [t for a, b, t in zip(q1, q2, sp) if _cell(a, b) == cell]
            ct = self._extend(wt[cell - 1], members, msigns, i, spl)
            if ct is None:
                return None
            nwt[cell - 1] = ct
        pat = ActivationPattern(
            tuple(idx + [i]), tuple(q1 + [s1]), tuple(q2 + [s2]), tuple(sp + [spl]),
            self.theta, self.w1, self.w2, nw0,
        )
        if len(pat.indices) < self.ds.N:
            qp = zero_loss_cuts(self.ds, pat, self.slack)
        else:
            qp = build_subprogram(self.ds, pat)
        if self.hook is not None:
            self.hook(qp, pat)
        if z is not None and qp.violation(z) <= 1e-12 and qp.objective(z) <= self.tol:
            self.screened += 1
            val, nz = qp.objective(z), z
        else:
            if self.solved >= self.budget:
                raise BudgetExceeded(self.solved + 1, self.budget, self.solved)
            sol = solve_qp(qp)
            self.solved += 1
            if not _require_optimal(sol, pat):
                return None
            val, nz = sol.objective, sol.z
        if val > self.tol:
            return None
        return (val, opt, c1, c2, nwt, nz, pat)

    def _znode(self, idx, q1, q2, sp, w0s, wq1, wq2, wt, sym, z, dead):
        self.nodes += 1
        state = (idx, q1, q2, sp, w0s, wq1, wq2, wt, sym, z)
        done = set(idx)
        free = [i for i in self.order if i not in done]
        cand = {}
        for i in free:
            cand[i] = [o for o in self._options(i, w0s, sym) if o not in dead.get(i, ())]
        free.sort(key=lambda i: (len(cand[i]), self.rank[i]))
        dead = {i: set(v) for i, v in dead.items()}
        pick = None
        for i in free:
            kids = []
            for opt in cand[i]:
                r = self._try(state, i, opt)
                if r is None:
                    dead.setdefault(i, set()).add(opt)
                else:
                    kids.append(r)
            if not kids:
                return
            if pick is None or len(kids) < len(pick[1]):
                pick = (i, kids)
            if len(kids) == 1:
                break
        i, kids = pick
        kids.sort(key=lambda r: r[0])
        for val, (s1, s2, spl, nw0), c1, c2, nwt, nz, pat in kids:
            if len(idx) + 1 == self.ds.N:
                self.best = (val, nz, pat)
                raise _Found()
            self._znode(
                idx + [i], q1 + [s1], q2 + [s2], sp + [spl], nw0, c1, c2, nwt,
                sym and s1 == s2, nz, dead,
            )


class _Found(Exception):
    pass


def _sign_cases(dataset: Dataset, forced: bool):
    y = dataset.y
    if forced:
        if np.all(y >= 0):
            thetas = [1]
        elif np.all(y <= 0):
            thetas = [-1]
        else:
            thetas = []
    elif np.all(y >= 0):
        thetas = [1]
    elif np.all(y <= 0):
        thetas = [-1]
    else:
        thetas = [1, -1]
    # in decision mode the equal-sign cases go first: their cuts make them cheap
    pairs = ((-1, -1), (1, 1), (1, -1)) if forced else ((1, 1), (1, -1), (-1, -1))
    return [(th, w1, w2) for th in thetas for (w1, w2) in pairs]


def _run_cases(dataset, cfg, forced, incumbent, hook):
    order = _point_order(dataset, cfg)
    cases = _sign_cases(dataset, forced)

    def one(case):
        th, w1, w2 = case
        if forced:
            s = _ZeroSearch(dataset, order, th, w1, w2, tol=cfg.tol, budget=cfg.budget, hook=hook)
        else:
            s = _Search(dataset, order, th, w1, w2, forced=False, incumbent=incumbent,
                        tol=cfg.tol, budget=cfg.budget, hook=hook)
        try:
            s.run()
        except _Found:
            pass
        return s

    if cfg.threads > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            searches = list(pool.map(one, cases))
    else:
        searches = []
        for case in cases:
            s = one(case)
            searches.append(s)
            if forced and s.best is not None:
                break
    return searches


def _zero_loss_search(dataset, cfg, hook):
    """First pattern (in case order) whose program reaches ``tol`` with forced splits."""
    if np.all(dataset.y == 0):
        return (0.0, np.zeros(n_variables(dataset.d)), _zero_pattern(dataset.N)), 0, {}
    searches = _run_cases(dataset, cfg, True, None, hook)
    solved = sum(s.solved for s in searches)
    stats = {"nodes": sum(s.nodes for s in searches), "lp_calls": sum(s.lp_calls for s in searches)}
    for s in searches:
        if s.best is not None:
            return s.best, solved, stats
    return None, solved, stats


def _train_branch(dataset: Dataset, cfg: TrainConfig, hook=None) -> TrainResult:
    d0 = dataset.d
    base = (float(dataset.y @ dataset.y), np.zeros(n_variables(d0)), _zero_pattern(dataset.N))
    solved = 0
    stats: dict = {}
    one_signed = bool(np.all(dataset.y >= 0) or np.all(dataset.y <= 0))
    if one_signed:
        found, solved, stats = _zero_loss_search(dataset, cfg, hook)
        if found is not None:
            res = _finish(dataset, found, solved, True, cfg, early=cfg.decision)
            res.decision = True
            res.stats.update(stats, phase="zero-loss")
            return res
        if cfg.decision:
            res = _finish(dataset, base, solved, True, cfg)
            res.decision = False
            res.stats.update(stats, phase="zero-loss")
            return res
    elif cfg.decision:
        res = _finish(dataset, base, solved, True, cfg)
        res.decision = res.loss <= cfg.tol
        return res

    searches = _run_cases(dataset, cfg, False, base, hook)
    solved += sum(s.solved for s in searches)
    stats = {"nodes": sum(s.nodes for s in searches), "lp_calls": sum(s.lp_calls for s in searches)}
    # deterministic reduction: lowest loss, ties to the earliest case
    best = base
    for s in searches:
        if s.best is not None and s.best[0] < best[0] - 1e-12 * (1.0 + abs(best[0])):
            best = s.best
    res = _finish(dataset, best, solved, True, cfg)
    res.stats.update(stats, phase="branch-and-bound")
    return res


def _finish(dataset, best, solved, complete, cfg, early=False) -> TrainResult:
    if best is None:
        best = (float(dataset.y @ dataset.y), np.zeros(n_variables(dataset.d)), _zero_pattern(dataset.N))
    _, z, pat = best
    if len(pat.indices) != dataset.N:
        raise AssertionError("incomplete pattern returned")
    net = net_from_solution(z, dataset.d, pat)
    loss = squared_loss(net, dataset)
    res = TrainResult(net, loss, pat, solved, complete and not early)
    if cfg.decision:
        res.decision = loss <= cfg.tol
    if cfg.refine_theta:
        _, res.refined_loss = refine_theta(net, dataset)
    return res


def train_exact(dataset: Dataset, config: TrainConfig | None = None, subproblem_hook=None) -> TrainResult:
    """Globally minimize the squared loss of a two-unit ReLU network.

    With ``config.decision`` the search stops at the first network whose loss
    is within ``config.tol`` of zero; ``result.decision`` then answers whether
    the data can be interpolated exactly.  ``subproblem_hook(qp, pattern)`` is
    called on every generated program.
    """
    cfg = config or TrainConfig()
    if dataset.d > cfg.max_dim:
        raise DimensionRefused(dataset.d, cfg.max_dim)
    start = time.perf_counter()
    if cfg.strategy == "enumerate":
        res = _train_enumerate(dataset, cfg, subproblem_hook)
    elif cfg.strategy == "branch":
        res = _train_branch(dataset, cfg, subproblem_hook)
    else:
        raise ValueError(f"unknown strategy {cfg.strategy!r}")
    res.wall_time = time.perf_counter() - start
    return res


def decide_trainability(dataset: Dataset, tol: float = 1e-8, config: TrainConfig | None = None):
    """``(True, net)`` if some network interpolates the data, else ``(False, None)``."""
    cfg = config or TrainConfig()
    cfg = TrainConfig(**{**cfg.__dict__, "tol": tol, "decision": True})
    res = train_exact(dataset, cfg)
    return (True, res.net) if res.decision else (False, None)


__all__ = [
    "ActivationPattern",
    "BudgetExceeded",
    "DimensionRefused",
    "SubproblemFailure",
    "TrainConfig",
    "TrainResult",
    "build_subprogram",
    "count_subproblems",
    "decide_trainability",
    "net_from_solution",
    "refine_theta",
    "train_exact",
]
