"""Exact iteration-count bounds for asymptotic regularity.

Everything here is integer or rational arithmetic: no float ever touches a
bound.  The central recursion builds, from a divergence witness ``alpha`` for
the step-size sums, the index ``alpha_hat(i, n)`` by which an averaged
iteration has settled; the rate functions wrap it with a certified upper
bound on an exponential factor.

Outputs are exact Python ints.  Results too large to materialize (more than
about a million decimal digits) raise :class:`RateOverflowError` carrying a
rigorous rational upper bound on ``log10(value)`` (or, when even the digit
count is astronomical, on ``log10(log10(value))``), so callers can still
report a sound magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import ArgumentError, RateOverflowError, _fmt_magnitude

#: steps of the alpha_hat recursion always evaluated literally, even when a
#: closed-form jump could cover them; keeps the tested range on the real
#: recursion rather than on algebra derived from it.
HEAD_STEPS = 512

#: cap on literal recursion steps for alphas with no closed-form jump.
STEP_BUDGET = 300_000

#: largest exact integer we will materialize, in decimal digits.
DIGIT_BUDGET = 1_050_000

#: digit cap for intermediate values in the literal-recursion fallback.
GROWTH_DIGIT_CAP = 20_000

#: cap on the scan length inside alpha_plus for plain-callable alphas.
SCAN_CAP = 1_000_000

#: rational upper bounds on common logarithms, used in soundness estimates.
LOG10_2_UPPER = Fraction(30103, 100000)
LOG10_3_UPPER = Fraction(4771213, 10**7)


def as_fraction(x: Union[int, float, str, Fraction]) -> Fraction:
    """Coerce to an exact rational.

    Strings accept "p/q" and decimal forms; floats are taken at their exact
    binary value.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ArgumentError(f"cannot treat {x!r} as a rational")
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ArgumentError(f"not a rational: {x!r}") from exc
    raise ArgumentError(f"cannot treat {type(x).__name__} as a rational")


def monus(a: int, b: int) -> int:
    """Truncated subtraction on naturals: max(0, a - b)."""
    return a - b if a > b else 0


def digit_count(x: int) -> int:
    """Number of decimal digits of |x|, computed without a str() round trip."""
    if x == 0:
        return 1
    x = abs(x)
    # (bits-1) * log10(2) underestimates log10(x) by < 0.04 even at 10^6 digits
    d = max(0, (x.bit_length() - 1) * 30103 // 100000)
    p = 10**d
    while p <= x:
        d += 1
        p *= 10
    return d


def _fmt_int(x: int) -> str:
    """Render an int for a message without tripping the str-conversion limit
    on huge values."""
    if digit_count(x) <= 50:
        return str(x)
    return f"~10^{digit_count(x) - 1}"


def _log10_upper_int(x: int) -> Fraction:
    """A rational u with log10(x) < u, tight to within 1/256."""
    if x < 1:
        raise ArgumentError(f"positive integer required, got {x}")
    return Fraction(digit_count(x**256), 256)


def _log10_upper_fraction(c: Fraction) -> Fraction:
    if c <= 0:
        raise ArgumentError(f"positive rational required, got {c}")
    p, q = c.numerator, c.denominator
    return Fraction(digit_count(p**256) - (digit_count(q**256) - 1), 256)


# ---------------------------------------------------------------------------
# the witness-function catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaFn:
    """A catalogued total function on the naturals, used as a sum-divergence
    witness for step-size schedules.

    Catalog membership buys two things: serializability (the function is
    reconstructible from its descriptor) and exact closed forms inside
    ``alpha_plus`` that keep the rate recursion feasible for astronomically
    large first arguments.
    """

    kind: str  # "identity" | "double" | "scale_ceil" | "table"
    c: Optional[Fraction] = None
    table: Optional[tuple[int, ...]] = None

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ArgumentError(f"defined on naturals only, got {n}")
        if self.kind == "identity":
            return n
        if self.kind == "double":
            return 2 * n
        if self.kind == "scale_ceil":
            return math.ceil(self.c * n)
        if self.kind == "table":
            return self.table[min(n, len(self.table) - 1)]
        raise ArgumentError(f"unknown witness kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "scale_ceil":
            return f"scale_ceil({self.c})"
        if self.kind == "table":
            return f"table(len={len(self.table)})"
        return self.kind

    def descriptor(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "scale_ceil":
            d["c"] = str(self.c)
        if self.kind == "table":
            d["values"] = list(self.table)
        return d


def alpha_identity() -> AlphaFn:
    return AlphaFn("identity")


def alpha_double() -> AlphaFn:
    return AlphaFn("double")


def alpha_scale_ceil(c) -> AlphaFn:
    """n -> ceil(c*n) for rational c >= 1.

    c >= 1 keeps alpha_prime nondecreasing in its first argument, which the
    closed form used by alpha_plus relies on.
    """
    c = as_fraction(c)
    if c < 1:
        raise ArgumentError(f"scale_ceil needs c >= 1, got {c}")
    return AlphaFn("scale_ceil", c=c)


def alpha_table(values: Sequence[int]) -> AlphaFn:
    """A finite table, clamped to its last entry beyond the covered range.

    The clamp keeps the function total; schedule validation beyond the
    covered horizon will fail honestly if the clamped tail is too small.
    """
    vals = tuple(int(v) for v in values)
    if not vals:
        raise ArgumentError("table must be nonempty")
    if any(v < 0 for v in vals):
        raise ArgumentError("table values must be naturals")
    return AlphaFn("table", table=vals)


AlphaLike = Union[AlphaFn, Callable[[int], int]]


# ---------------------------------------------------------------------------
# the recursion combinators
# ---------------------------------------------------------------------------


def alpha_prime(alpha: AlphaLike, i: int, n: int) -> int:
    """alpha(n+i) - i + 1; may be negative."""
    if i < 0 or n < 0:
        raise ArgumentError("indices must be naturals")
    return alpha(n + i) - i + 1


def alpha_plus(alpha: AlphaLike, i: int, n: int) -> int:
    """max{alpha_prime(j, n) : 0 <= j <= i}.

    Always >= 1, since the j=0 term is alpha(n)+1.  Catalogued alphas use
    exact closed forms; a plain callable is scanned literally, so its first
    argument is capped.
    """
    if i < 0 or n < 0:
        raise ArgumentError("indices must be naturals")
    if isinstance(alpha, AlphaFn):
        if alpha.kind == "identity":
            return n + 1
        if alpha.kind == "double":
            return 2 * n + i + 1
        if alpha.kind == "scale_ceil":
            # c >= 1 makes alpha_prime nondecreasing, so the max sits at j=i
            return alpha_prime(alpha, i, n)
        if alpha.kind == "table":
            # beyond the table, alpha_prime decreases strictly; scanning up to
            # the first clamped index covers the max
            top = min(i, max(0, len(alpha.table) - n))
            return max(alpha_prime(alpha, j, n) for j in range(top + 1))
    if i > SCAN_CAP:
        raise ArgumentError(
            f"alpha_plus scan of {_fmt_int(i + 1)} terms exceeds the cap for "
            "non-catalog witness functions"
        )
    return max(alpha(n + j) - j + 1 for j in range(i + 1))


def alpha_tilde(alpha: AlphaLike, i: int, n: int) -> int:
    """i + alpha_plus(i, n)."""
    return i + alpha_plus(alpha, i, n)


def _affine_jump(a: int, mult: int, add: int, steps: int, context: str) -> int:
    """Exact result of `steps` iterations of x -> mult*x + add from a.

    Refuses (with a sound log10 upper bound) when the result would exceed
    the digit budget.
    """
    if mult == 1:
        return a + steps * add
    log_mult = _log10_upper_int(mult)
    bulk = a + add  # value <= mult**steps * (a + add)
    estimate = steps * log_mult + digit_count(bulk) + 2
    if estimate > DIGIT_BUDGET:
        raise RateOverflowError(
            log10_upper=steps * log_mult + digit_count(bulk),
            context=context,
        )
    ms = mult**steps
    return ms * a + add * (ms - 1) // (mult - 1)


def alpha_hat(alpha: AlphaLike, i: int, n: int) -> int:
    """The settling-index recursion: a(0) = alpha_tilde(0, n), a(k+1) =
    alpha_tilde(a(k), n); returns a(i), exactly.

    The first HEAD_STEPS iterations always run literally.  Beyond that,
    catalogued alphas switch to exact closed-form jumps (the recursion is
    affine in a(k) for every catalog kind); results over the digit budget
    raise RateOverflowError with a sound magnitude bound.
    """
    if i < 0 or n < 0:
        raise ArgumentError("indices must be naturals")
    a = alpha_tilde(alpha, 0, n)
    k = 0
    is_catalog = isinstance(alpha, AlphaFn)
    head = min(i, HEAD_STEPS if is_catalog else STEP_BUDGET)
    while k < head:
        a += alpha_plus(alpha, a, n)
        k += 1
    if k == i:
        return a
    if not is_catalog:
        raise ArgumentError(
            f"literal recursion to i={_fmt_int(i)} exceeds the step budget; "
            "use a catalogued witness function"
        )
    steps = i - k
    ctx = f"alpha_hat({alpha.label}, {_fmt_int(i)}, {_fmt_int(n)})"
    if alpha.kind == "identity" or (alpha.kind == "scale_ceil" and alpha.c == 1):
        # increment is the constant n+1
        return a + steps * (n + 1)
    if alpha.kind == "double":
        # a <- a + (2n + a + 1)
        return _affine_jump(a, 2, 2 * n + 1, steps, ctx)
    if alpha.kind == "scale_ceil" and alpha.c.denominator == 1:
        c = alpha.c.numerator
        # a <- a + (c(n+a) - a + 1)
        return _affine_jump(a, c, c * n + 1, steps, ctx)
    if alpha.kind == "table":
        # step literally until the increment goes constant, then jump
        threshold = max(0, len(alpha.table) - n)
        while k < i and a < threshold:
            a += alpha_plus(alpha, a, n)
            k += 1
        if k == i:
            return a
        return a + (i - k) * alpha_plus(alpha, a, n)
    # non-integer scale_ceil: no exact jump; step literally under a growth cap
    while k < i:
        if digit_count(a) > GROWTH_DIGIT_CAP or k - head > STEP_BUDGET:
            c = alpha.c
            # per step, a' <= c*a + c*n + 2, so after r more steps
            # a <= c**r * (a + (c*n + 2)/(c - 1))
            r = i - k
            envelope = Fraction(a) + (c * n + 2) / (c - 1)
            raise RateOverflowError(
                log10_upper=r * _log10_upper_fraction(c)
                + _log10_upper_fraction(envelope),
                context=ctx,
            )
        a += alpha_plus(alpha, a, n)
        k += 1
    return a


# ---------------------------------------------------------------------------
# certified exponential ceiling
# ---------------------------------------------------------------------------

# upper bound on e as a rational: truncated series plus a remainder cover.
# Sum_{k>=66} 1/k! < (1/66!) * (1/(1 - 1/67)) < 2/66!.
_EXP1_HI = sum(Fraction(1, math.factorial(k)) for k in range(66)) + Fraction(
    2, math.factorial(66)
)

#: beyond this exponent even the 3**e fallback exceeds the digit budget.
_EXP_EXACT_CAP = 2_000_000


def ceil_exp_upper(c, e: int) -> int:
    """A natural number N >= ceil(c * exp(e)), never smaller.

    For e <= 64 the bound comes from a rational upper bound on e of quality
    ~1e-92, so N is the true ceiling or at most one above it.  Larger
    exponents fall back to the cruder (still sound) c * 3**e.
    """
    c = as_fraction(c)
    if c <= 0:
        raise ArgumentError(f"coefficient must be positive, got {c}")
    if e < 0:
        raise ArgumentError(f"exponent must be a natural, got {e}")
    if e == 0:
        return math.ceil(c)
    if e <= 64:
        return math.ceil(c * _EXP1_HI**e)
    if e <= _EXP_EXACT_CAP:
        return math.ceil(c * Fraction(3) ** e)
    raise RateOverflowError(
        log10_upper=_log10_upper_fraction(c) + e * LOG10_3_UPPER,
        context=f"ceil_exp_upper({_fmt_magnitude(c)}, {_fmt_int(e)})",
    )


# ---------------------------------------------------------------------------
# the rate functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateInputs:
    """Bundled arguments for the rate functions; CLI plumbing convenience."""

    eps: Fraction
    b: Fraction
    K: int
    alpha: AlphaLike


def _validate_rate_args(eps: Fraction, b: Fraction, K: int) -> None:
    if eps <= 0:
        raise ArgumentError(f"eps must be positive, got {eps}")
    if b <= 0:
        raise ArgumentError(f"b must be positive, got {b}")
    if not isinstance(K, int) or K < 1:
        raise ArgumentError(f"K must be a natural >= 1, got {K!r}")


def _alpha_hat_overflow(alpha: AlphaLike, e_log10: Fraction, n: int, ctx: str):
    """Build the overflow error for alpha_hat(i, n) when only a log10 upper
    bound on i (via the exponential factor) is available."""
    if isinstance(alpha, AlphaFn):
        if alpha.kind == "identity" or (
            alpha.kind == "scale_ceil" and alpha.c == 1
        ):
            # value = (i+1)(n+1)
            return RateOverflowError(
                log10_upper=e_log10 + digit_count(n + 1) + 1, context=ctx
            )
        if alpha.kind == "table":
            # increments are bounded by the table's final constant
            top = alpha_plus(alpha, len(alpha.table), n)
            base = alpha_tilde(alpha, 0, n)
            return RateOverflowError(
                log10_upper=e_log10 + digit_count(base + top) + 1, context=ctx
            )
    # geometric growth: the digit count itself is astronomical
    return RateOverflowError(log10_log10_upper=e_log10 + 1, context=ctx)


def _settling_bound(
    eps: Fraction, b: Fraction, K: int, alpha: AlphaLike, coeff: int, m_num: int
) -> int:
    """Shared core of rate_h / rate_h_tilde.

    m_num=2, coeff=2: threshold M >= (1+2b)/eps, factor ceil(2b e^(K(M+1))).
    m_num=6, coeff=12: the bounded-orbit variant's constants.
    """
    M = math.ceil((1 + m_num * b) / eps)
    exponent = K * (M + 1)
    ctx = f"settling bound at M={_fmt_int(M)}, exponent={_fmt_int(exponent)}"
    try:
        E = ceil_exp_upper(coeff * b, exponent)
    except RateOverflowError as exc:
        raise _alpha_hat_overflow(alpha, exc.log10_upper, M, ctx) from None
    return alpha_hat(alpha, monus(E, 1), M)


def rate_h(eps, b, K: int, alpha: AlphaLike) -> int:
    """Iterations after which the residual is within eps of its infimum.

    Valid for averaged iterations of a nonexpansive map, from any start
    within distance b of a comparison point, under a step-size schedule with
    cap witness K and sum-divergence witness alpha.  Exact integer.
    """
    eps, b = as_fraction(eps), as_fraction(b)
    _validate_rate_args(eps, b, K)
    return _settling_bound(eps, b, K, alpha, coeff=2, m_num=2)


def rate_h_tilde(eps, b, K: int, alpha: AlphaLike) -> int:
    """Iterations after which the residual is below eps outright, given the
    whole orbit stays within distance b of the start.  Exact integer."""
    eps, b = as_fraction(eps), as_fraction(b)
    _validate_rate_args(eps, b, K)
    return _settling_bound(eps, b, K, alpha, coeff=12, m_num=6)


def _with_floor(floor: int, inner: Callable[[], int], ctx: str) -> int:
    try:
        return max(floor, inner())
    except RateOverflowError as exc:
        lg = exc.log10_upper
        if lg is not None:
            lg = max(lg, Fraction(digit_count(floor)))
        raise RateOverflowError(
            log10_upper=lg,
            log10_log10_upper=exc.log10_log10_upper,
            context=ctx,
        ) from None


def rate_g(eps, b1, b2, K: int, alpha: AlphaLike) -> int:
    """Product-space certificate index: max(ceil(1/eps)+1, rate_h with
    displacement budget 2*b1 + b2).

    b1 budgets the selection-to-probe distance, b2 the probe's own residual;
    the floor makes the second product coordinate's tolerance 1/n <= eps.
    """
    eps, b1, b2 = as_fraction(eps), as_fraction(b1), as_fraction(b2)
    if b1 <= 0 or b2 <= 0:
        raise ArgumentError(f"b1, b2 must be positive, got {b1}, {b2}")
    _validate_rate_args(eps, b1, K)
    floor = math.ceil(1 / eps) + 1
    return _with_floor(
        floor,
        lambda: rate_h(eps, 2 * b1 + b2, K, alpha),
        f"rate_g(eps={_fmt_magnitude(eps)})",
    )


def rate_g_tilde(eps, b, K: int, alpha: AlphaLike) -> int:
    """Bounded-orbit analogue of rate_g: max(ceil(1/eps)+1, rate_h_tilde).

    This is the canonical completion of the bounded-orbit product argument:
    the maximum dominates both the orbit-settling index and the floor that
    drives the second coordinate's tolerance below eps.
    """
    eps, b = as_fraction(eps), as_fraction(b)
    _validate_rate_args(eps, b, K)
    floor = math.ceil(1 / eps) + 1
    return _with_floor(
        floor,
        lambda: rate_h_tilde(eps, b, K, alpha),
        f"rate_g_tilde(eps={_fmt_magnitude(eps)})",
    )


def describe_overflow(exc: RateOverflowError) -> str:
    """Human-readable sound magnitude line for an overflowed bound."""
    if exc.log10_upper is not None:
        lg = exc.log10_upper
        expo = math.floor(lg)
        if digit_count(expo) > 50:
            # even the exponent is unprintable; drop to tower form
            return f"<= 10^(~10^{digit_count(expo) - 1}) (digit count itself is astronomical)"
        frac = lg - expo
        # 10**frac evaluated in floats, then bumped upward; the bump dwarfs
        # the float rounding, keeping the printed mantissa an upper bound
        mantissa = math.ceil(10 ** float(frac) * 1000 + 1) / 1000
        if mantissa >= 10.0:
            mantissa, expo = 1.0, expo + 1
        return f"<= {mantissa:.3f}e+{expo} (decimal digits <= {expo + 1})"
    if exc.log10_log10_upper is not None:
        expo = math.floor(exc.log10_log10_upper) + 1
        return f"<= 10^(10^{_fmt_int(expo)}) (digit count itself is astronomical)"
    return "magnitude bound unavailable"
