"""Multiplicative-weights LP solver with soft constraints, and its two-party form.

Given a guess ``z`` for the optimum of ``min g.x  s.t.  A x >= b,  x in P``,
the solver keeps a running total ``m_i`` of the slack ``A_i x - b_i`` of
every constraint and weights ``p_i = exp(-eps m_i / 2)``.  Each iteration
an oracle picks ``x(t)`` in ``P`` with ``g.x = z`` that satisfies the single
aggregated constraint ``sum p_i A_i x >= sum p_i b_i``; the returned point
is the average of the iterates.  It meets the objective exactly and every
hard constraint up to an additive ``eps``.

``P`` is the box plus any soft constraints, which the oracle enforces
exactly.  The oracle maximises the aggregated left-hand side over ``P``,
so it fails precisely when no point of ``P`` satisfies the aggregate, which
certifies that the guess ``z`` is infeasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..comm import Message, Network
from .simplex import InfeasibleError, LinearProgram, LPError, simplex_solve

Z_TOL = 0.5e-9
AGGREGATE_TOL = 1e-9


class GuessRejected(LPError):
    """No point of the soft set meets the objective guess and the aggregate constraint."""


class BracketExhausted(LPError):
    """Binary search found no acceptable objective value in the bracket."""


def _box_interval(A, b, lo, hi) -> tuple[np.ndarray, np.ndarray]:
    """Per-row range of ``A_i x - b_i`` over the box, by interval arithmetic."""
    A = np.atleast_2d(A)
    low = np.where(A > 0, A * lo, A * hi).sum(axis=1) - b
    high = np.where(A > 0, A * hi, A * lo).sum(axis=1) - b
    return low, high


def lp_width(lp: LinearProgram, z_star: float | None = None) -> float:
    """Bound on ``|A_i x - b_i|`` over the box, floored at 1.

    The bound is two-sided so that every slack the solver can see lies in
    ``[-width, width]``.  The objective restriction ``g.x = z_star`` could
    only shrink the range, so ``z_star`` is accepted but not used.
    """
    if not lp.box_is_finite:
        raise ValueError("width needs a finite box; pass an explicit width instead")
    if lp.n == 0:
        return 1.0
    low, high = _box_interval(lp.A, lp.b, lp.lo, lp.hi)
    return max(1.0, float(np.max(np.maximum(np.abs(low), np.abs(high)))))


def mwu_iterations(n: int, width: float, epsilon: float, multiplier: float = 1.0) -> int:
    return max(1, math.ceil(multiplier * width**2 * math.log(n) / epsilon**2))


@dataclass
class MwuLpState:
    """Running totals of the weight update; ``p`` is rescaled so its max is 1."""

    m: np.ndarray
    width: float
    z_star: float
    epsilon: float
    iterate_history: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def start(cls, n: int, width: float, z_star: float, epsilon: float) -> "MwuLpState":
        if width < 1:
            raise ValueError("width must be at least 1")
        return cls(np.zeros(n), float(width), float(z_star), float(epsilon))

    @property
    def p(self) -> np.ndarray:
        return np.exp(-self.epsilon * (self.m - self.m.min()) / 2)

    def aggregate(self, A, b) -> tuple[np.ndarray, float]:
        p = self.p
        return p @ A, float(p @ b)

    def update(self, A, b, x) -> None:
        self.m = self.m + (A @ x - b)
        self.iterate_history.append(np.asarray(x, dtype=float))

    @property
    def x_bar(self) -> np.ndarray:
        return np.mean(self.iterate_history, axis=0)


@dataclass
class MwuLpResult:
    x: np.ndarray
    iterations: int
    max_iterations: int
    min_slack: float
    state: MwuLpState


def _objective_rows(g, z_star, at_most=False):
    """``|g.x - z| <= Z_TOL max(1, |z|)`` as two ``>=`` rows (nothing when g = 0).

    With ``at_most`` only the upper half, ``g.x <= z`` up to the same tolerance.
    """
    if not np.any(g):
        return np.zeros((0, g.size)), np.zeros(0)
    tol = Z_TOL * max(1.0, abs(z_star))
    if at_most:
        return -g[None, :], np.array([-z_star - tol])
    return np.vstack([g, -g]), np.array([z_star - tol, -z_star - tol])


def oracle(lo, hi, g, z_star, a, beta, soft_A=None, soft_b=None, at_most=False) -> np.ndarray:
    """A point of ``box & {g.x = z} & soft`` with ``a.x >= beta``.

    Maximises ``a.x`` over the first three sets; raises GuessRejected when
    that maximum falls short of ``beta``.
    """
    d = g.size
    rows, rhs = _objective_rows(g, z_star, at_most)
    if soft_A is not None and len(soft_b):
        rows = np.vstack([rows, soft_A])
        rhs = np.concatenate([rhs, soft_b])
    try:
        sol = simplex_solve(LinearProgram(rows.reshape(-1, d), rhs, -a, lo, hi))
    except InfeasibleError:
        raise GuessRejected(f"no point of the soft set has objective {z_star:.12g}") from None
    best = float(a @ sol.x)
    if best < beta - AGGREGATE_TOL * max(1.0, abs(beta)):
        raise GuessRejected(f"aggregate constraint unreachable at objective {z_star:.12g}")
    return sol.x


def _check_inputs(lp, epsilon, soft):
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if lp.n < 1:
        raise ValueError("need at least one hard constraint")
    if soft is None:
        return None, None
    soft_A = np.atleast_2d(np.asarray(soft[0], dtype=float)).reshape(-1, lp.d)
    return soft_A, np.asarray(soft[1], dtype=float).reshape(-1)


def mwu_lp_solve(lp: LinearProgram, z_star: float, epsilon: float, *, soft=None,
                 width: float | None = None, multiplier: float = 1.0,
                 early_stop: bool = False, objective: str = "equal") -> MwuLpResult:
    """Soft-``epsilon`` solution of ``lp`` at objective value ``z_star``.

    ``soft`` is an optional ``(A, b)`` pair of constraints the oracle keeps
    exactly.  With ``early_stop`` the loop ends as soon as the running
    average already meets every hard constraint to within ``epsilon``;
    otherwise all ``max(1, ceil(multiplier width^2 ln n / eps^2))``
    iterations run.  ``objective="at_most"`` relaxes ``g.x = z_star`` to
    ``g.x <= z_star``.  Raises GuessRejected if ``z_star`` is infeasible.
    """
    if objective not in ("equal", "at_most"):
        raise ValueError(f"unknown objective mode {objective!r}")
    soft_A, soft_b = _check_inputs(lp, epsilon, soft)
    width = lp_width(lp) if width is None else float(width)
    T = mwu_iterations(lp.n, width, epsilon, multiplier)
    state = MwuLpState.start(lp.n, width, z_star, epsilon)
    for _ in range(T):
        a, beta = state.aggregate(lp.A, lp.b)
        x = oracle(lp.lo, lp.hi, lp.g, z_star, a, beta, soft_A, soft_b, objective == "at_most")
        state.update(lp.A, lp.b, x)
        if early_stop and np.min(lp.slacks(state.x_bar)) >= -epsilon:
            break
    x_bar = state.x_bar
    return MwuLpResult(x_bar, len(state.iterate_history), T, float(np.min(lp.slacks(x_bar))), state)


def two_party_lp(a_party: LinearProgram, b_A, b_b, z_star: float, epsilon: float, *,
                 width: float | None = None, multiplier: float = 1.0,
                 early_stop: bool = False, ids=(1, 2)) -> tuple[MwuLpResult, Network]:
    """The solver split between two players.

    Player A (``a_party``) owns the box, the objective and its own rows,
    which act as soft constraints.  Player B owns the hard rows
    ``b_A x >= b_b`` and the weights.  Per iteration B sends the aggregated
    row and right-hand side (d+1 words) and A answers with ``x(t)`` (d
    words).  The result equals ``mwu_lp_solve`` on B's rows with A's rows as
    ``soft``.
    """
    a_id, b_id = ids
    hard = LinearProgram(b_A, b_b, a_party.g, a_party.lo, a_party.hi)
    soft_A, soft_b = _check_inputs(hard, epsilon, (a_party.A, a_party.b))
    width = lp_width(hard) if width is None else float(width)
    T = mwu_iterations(hard.n, width, epsilon, multiplier)
    net = Network()
    state = MwuLpState.start(hard.n, width, z_star, epsilon)
    for _ in range(T):
        net.ledger.begin_round()
        a, beta = state.aggregate(hard.A, hard.b)
        net.send(Message.vector(b_id, a_id, np.append(a, beta)))
        row = net.receive(b_id, a_id)
        x = oracle(a_party.lo, a_party.hi, a_party.g, z_star, row[:-1], float(row[-1]), soft_A, soft_b)
        net.send(Message.vector(a_id, b_id, x))
        state.update(hard.A, hard.b, net.receive(a_id, b_id))
        if early_stop and np.min(hard.slacks(state.x_bar)) >= -epsilon:
            break
    x_bar = state.x_bar
    return MwuLpResult(x_bar, len(state.iterate_history), T, float(np.min(hard.slacks(x_bar))), state), net


@dataclass
class BinarySearchResult:
    z: float
    solution: MwuLpResult
    probes: int
    accepted: list[float] = field(default_factory=list)


def objective_range(lp: LinearProgram) -> tuple[float, float]:
    """Range of ``g.x`` over the (finite) box."""
    if not lp.box_is_finite:
        raise ValueError("objective range needs a finite box")
    g = lp.g
    return float(np.where(g > 0, g * lp.lo, g * lp.hi).sum()), float(np.where(g > 0, g * lp.hi, g * lp.lo).sum())


def lp_binary_search(lp: LinearProgram, epsilon: float, z_range=None, tol: float = 2.0**-10,
                     **solve_kw) -> BinarySearchResult:
    """Bisect on the objective guess, keeping the smallest accepted one.

    Guesses are solved with ``g.x <= z`` so that acceptance is monotone in
    ``z``: with the equality a guess above the largest feasible objective
    would be rejected too, and bisection could not tell which way to go.
    Probes ``ceil(log2(width / tol))`` midpoints, then the top of the
    bracket if no midpoint was accepted.  Raises BracketExhausted when no
    probe is accepted.
    """
    lo, hi = objective_range(lp) if z_range is None else map(float, z_range)
    if not lo <= hi:
        raise ValueError("empty objective bracket")
    if tol <= 0:
        raise ValueError("tol must be positive")
    steps = math.ceil(math.log2((hi - lo) / tol)) if hi - lo > tol else 0
    best, accepted, probes = None, [], 0
    for _ in range(steps):
        mid = (lo + hi) / 2
        probes += 1
        try:
            sol = mwu_lp_solve(lp, mid, epsilon, objective="at_most", **solve_kw)
        except GuessRejected:
            lo = mid
            continue
        best, hi = (mid, sol), mid
        accepted.append(mid)
    if best is None:
        probes += 1
        try:
            best = (hi, mwu_lp_solve(lp, hi, epsilon, objective="at_most", **solve_kw))
            accepted.append(hi)
        except GuessRejected:
            raise BracketExhausted(f"no objective value in [{lo:.6g}, {hi:.6g}] was accepted") from None
    return BinarySearchResult(best[0], best[1], probes, accepted)
