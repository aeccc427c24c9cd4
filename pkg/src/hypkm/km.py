"""Averaged iteration of nonexpansive maps with witnessed step schedules.

The iteration is x_{n+1} = W(x_n, T(x_n), lam_n): move a fraction lam_n of
the way from the current point toward its image.  A schedule carries two
witnesses beside the step sizes: K caps them away from 1 (lam_n <= 1 - 1/K)
and alpha certifies divergence of their sums (n <= sum_{i<=alpha(n)} lam_i).
Both clauses are the hard preconditions of the rate bounds in `rates`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import ArgumentError, DomainError, DomainEscapeError, ScheduleError
from .rates import AlphaLike, alpha_scale_ceil, alpha_table, as_fraction
from .spaces import HyperbolicSpace, Point, Space

#: beyond this many terms, partial sums fall back from exact rationals to
#: compensated float summation (with an explicit slack in comparisons).
EXACT_SUM_CAP = 5_000

#: hard cap on summation length inside validation.
SUM_TERM_CAP = 1_000_000


@dataclass
class Schedule:
    """Step sizes lam: nat -> [0,1) plus the witnesses (K, alpha).

    ``lam`` must return exact Fractions; constructors below guarantee it.
    Treat instances as immutable; the only mutable member is a partial-sum
    cache that behaves as if absent.
    """

    lam: Callable[[int], Fraction]
    K: int
    alpha: AlphaLike
    label: str = ""
    constant: Optional[Fraction] = None  # set when lam is constant: O(1) sums
    _cums: list = field(default_factory=list, repr=False, compare=False)

    def lam_at(self, n: int) -> Fraction:
        v = self.lam(n)
        if not isinstance(v, Fraction):
            v = as_fraction(v)
        return v

    def lam_float(self, n: int) -> float:
        return float(self.lam_at(n))

    def partial_sum(self, m: int) -> Union[Fraction, float]:
        """sum_{i=0}^{m} lam_i; exact Fraction when affordable, float beyond.

        Callers must treat a float return as carrying summation error; see
        validate_schedule for the slack policy.
        """
        if m < 0:
            raise ArgumentError(f"partial sums start at m=0, got {m}")
        if self.constant is not None:
            return (m + 1) * self.constant
        if m < EXACT_SUM_CAP:
            while len(self._cums) <= m:
                i = len(self._cums)
                prev = self._cums[-1] if self._cums else Fraction(0)
                self._cums.append(prev + self.lam_at(i))
            return self._cums[m]
        if m > SUM_TERM_CAP:
            raise ArgumentError(
                f"partial sum of {m + 1} terms exceeds the summation cap"
            )
        return math.fsum(float(self.lam_at(i)) for i in range(m + 1))


def constant_schedule(value, K: Optional[int] = None, alpha: Optional[AlphaLike] = None) -> Schedule:
    """Constant steps lam == value in (0,1), with derived default witnesses.

    Defaults: K is the least natural with value <= 1 - 1/K; alpha(n) =
    ceil(n/value), which satisfies the sum clause since (alpha(n)+1)*value
    >= n + value.
    """
    v = as_fraction(value)
    if not 0 < v < 1:
        raise ArgumentError(f"constant step must lie in (0,1), got {v}")
    if K is None:
        K = math.ceil(1 / (1 - v))
    if alpha is None:
        alpha = alpha_scale_ceil(1 / v)
    return Schedule(
        lam=lambda n, _v=v: _v,
        K=K,
        alpha=alpha,
        label=f"constant({v})",
        constant=v,
    )


def harmonic_schedule(offset: int = 2, K: Optional[int] = None, alpha: Optional[AlphaLike] = None, alpha_horizon: int = 6) -> Schedule:
    """Steps lam_n = 1/(n+offset), offset >= 2.

    The sum witness defaults to a table of minimal indices computed by exact
    summation, covering n <= alpha_horizon; the table clamps beyond that, so
    validate only up to the covered horizon.
    """
    if offset < 2:
        raise ArgumentError(f"offset must be >= 2 so steps stay below 1, got {offset}")
    if K is None:
        K = math.ceil(Fraction(offset, offset - 1))
    lam = lambda n, _o=offset: Fraction(1, n + _o)
    if alpha is None:
        alpha = tabulate_alpha(lam, alpha_horizon)
    return Schedule(lam=lam, K=K, alpha=alpha, label=f"harmonic(offset={offset})")


def tabulate_alpha(lam: Callable[[int], Fraction], max_n: int, term_cap: int = EXACT_SUM_CAP) -> AlphaLike:
    """Minimal sum-divergence witness for the steps lam, tabulated for
    n <= max_n.

    Entry n is the least m with sum_{i<=m} lam_i >= n, found by exact
    rational accumulation.  Raises if the cap is hit before coverage.
    """
    values = []
    total = Fraction(0)
    m = -1
    for n in range(max_n + 1):
        while total < n:
            m += 1
            if m >= term_cap:
                raise ScheduleError(
                    f"witness table needs more than {term_cap} exact terms "
                    f"to cover n={n}"
                )
            total += as_fraction(lam(m))
        values.append(max(m, 0))
    return alpha_table(values)


# ---------------------------------------------------------------------------
# schedule validation
# ---------------------------------------------------------------------------

#: absolute slack granted per term when a partial sum was computed in floats.
FLOAT_SUM_SLACK = 2.0**-50


@dataclass
class ScheduleViolation:
    n: int
    clause: str  # "lambda_range" | "lambda_cap" | "alpha_range" | "sum_witness"
    detail: str


@dataclass
class ScheduleReport:
    horizon: int
    valid: bool
    first_violation: Optional[ScheduleViolation]
    notes: list[str]

    def summary(self) -> str:
        if self.valid:
            return f"valid up to horizon {self.horizon}"
        v = self.first_violation
        return f"invalid at n={v.n}: {v.clause} ({v.detail})"


def validate_schedule(sched: Schedule, horizon: int) -> ScheduleReport:
    """Check both witness clauses for all n <= horizon; report the first
    violation.  Comparisons are exact wherever the sums are exact."""
    if horizon < 0:
        raise ArgumentError(f"horizon must be a natural, got {horizon}")
    notes: list[str] = []
    cap = 1 - Fraction(1, sched.K)
    float_mode_seen = False
    for n in range(horizon + 1):
        lam_n = sched.lam_at(n)
        if not 0 <= lam_n < 1:
            return ScheduleReport(
                horizon, False,
                ScheduleViolation(n, "lambda_range", f"lam_{n}={lam_n} outside [0,1)"),
                notes,
            )
        if lam_n > cap:
            return ScheduleReport(
                horizon, False,
                ScheduleViolation(
                    n, "lambda_cap", f"lam_{n}={lam_n} > 1-1/K={cap}"
                ),
                notes,
            )
        a_n = sched.alpha(n)
        if not isinstance(a_n, int) or a_n < 0:
            return ScheduleReport(
                horizon, False,
                ScheduleViolation(n, "alpha_range", f"alpha({n})={a_n!r} not a natural"),
                notes,
            )
        s = sched.partial_sum(a_n)
        if isinstance(s, float):
            slack = (a_n + 1) * FLOAT_SUM_SLACK
            ok = n <= s - slack
            if not float_mode_seen:
                notes.append(
                    "partial sums beyond the exact cap use float summation "
                    f"with slack {slack:.3e} per comparison"
                )
                float_mode_seen = True
        else:
            ok = n <= s
        if not ok:
            return ScheduleReport(
                horizon, False,
                ScheduleViolation(
                    n, "sum_witness",
                    f"sum of lam_0..lam_{a_n} = {float(s):.6g} < n = {n}",
                ),
                notes,
            )
    return ScheduleReport(horizon, True, None, notes)


def require_valid_schedule(sched: Schedule, horizon: int) -> None:
    report = validate_schedule(sched, horizon)
    if not report.valid:
        raise ScheduleError(report.summary())


# ---------------------------------------------------------------------------
# the iteration
# ---------------------------------------------------------------------------


@dataclass
class ResidualTrace:
    """Orbit x_0..x_N with residual rho(x_n, T(x_n)) at every index."""

    space: Space
    points: list
    residuals: list[float]
    schedule_label: str = ""

    def __len__(self) -> int:
        return len(self.points)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1]

    def csv_lines(self, meta: Optional[dict] = None) -> list[str]:
        """`n,residual,<point columns>` rows at 17 significant digits.

        ``meta`` entries become leading `# key=value` comment lines.
        """
        lines = [f"# {k}={v}" for k, v in (meta or {}).items()]
        lines.append("n,residual," + ",".join(self.space.point_columns()))
        for n, (p, r) in enumerate(zip(self.points, self.residuals)):
            row = self.space.point_row(p)
            lines.append(f"{n},{r:.17g}," + ",".join(f"{v:.17g}" for v in row))
        return lines

    def to_csv(self, path, meta: Optional[dict] = None) -> None:
        with open(path, "w", newline="") as f:
            f.write("\n".join(self.csv_lines(meta)) + "\n")


def _checked_image(space: Space, T, x: Point, step: int) -> Point:
    Tx = T(x)
    if not space.contains(Tx):
        raise DomainEscapeError(step, Tx)
    return Tx


def km_iterate(
    space: HyperbolicSpace,
    T: Callable[[Point], Point],
    x0: Point,
    sched: Schedule,
    N: int,
    validate: bool = True,
) -> ResidualTrace:
    """Run N averaged steps from x0, recording every point and residual.

    Raises DomainEscapeError (naming the step) if T ever maps outside the
    space: escaping iterates would silently falsify nonexpansiveness, so
    they are never clamped.
    """
    if N < 0:
        raise ArgumentError(f"step count must be a natural, got {N}")
    if not space.contains(x0):
        raise DomainError(f"start {x0!r} is not a member of {space!r}")
    if validate:
        require_valid_schedule(sched, N)
    points = [x0]
    residuals = []
    x = x0
    for n in range(N):
        Tx = _checked_image(space, T, x, n)
        residuals.append(space.distance(x, Tx))
        x = space.combine(x, Tx, sched.lam_float(n))
        if not space.contains(x):
            raise DomainEscapeError(n, x)
        points.append(x)
    Tx = _checked_image(space, T, x, N)
    residuals.append(space.distance(x, Tx))
    return ResidualTrace(space, points, residuals, sched.label)


def km_orbit_end(
    space: HyperbolicSpace,
    T: Callable[[Point], Point],
    x0: Point,
    sched: Schedule,
    n: int,
    validate: bool = False,
) -> Point:
    """The n-th iterate only, without building a trace."""
    if n < 0:
        raise ArgumentError(f"step count must be a natural, got {n}")
    if not space.contains(x0):
        raise DomainError(f"start {x0!r} is not a member of {space!r}")
    if validate:
        require_valid_schedule(sched, n)
    x = x0
    for k in range(n):
        Tx = _checked_image(space, T, x, k)
        x = space.combine(x, Tx, sched.lam_float(k))
        if not space.contains(x):
            raise DomainEscapeError(k, x)
    return x


def estimate_residual_inf(
    space: HyperbolicSpace,
    T: Callable[[Point], Point],
    x0: Point,
    sched: Schedule,
    N: int,
) -> float:
    """Upper estimate of the infimum displacement inf_x rho(x, T(x)).

    Returns the final residual of a length-N orbit; residuals along an
    averaged iteration are nonincreasing and converge to the infimum, so the
    estimate improves monotonically with N.
    """
    return km_iterate(space, T, x0, sched, N).final_residual


def residuals_nonincreasing(trace: ResidualTrace, tol: float = 1e-9) -> bool:
    r = trace.residuals
    return all(r[i + 1] <= r[i] + tol for i in range(len(r) - 1))
