"""Level construction: angle lattices, big-integer degree sequences, and the
divergence-driving partial-sum machinery.

A *level* for n >= 50 bundles

* ``x_n = floor(((4n+1)/4) (1 - (log n)^{-1/6}))`` interval/angle count,
* angles ``A_l = 4 pi l / (4n+1)`` for l = 1..x_n (stored implicitly),
* a strictly-more-than-doubling big-integer sequence m_1 < ... < m_{x_n}
  with 2 m_l + 1 = 0 (mod 4n+1), grown by the smallest-odd-cofactor rule,
* the certificate constant ``M_n = (4n+1) sqrt(log n) / (16 pi^2 x_n) - pi^2/2``.

Two construction profiles share all the algebra:

* paper profile: m_1 is the smallest admissible value >= n^4.  Individual
  kernel bounds then hold with constant pi^2/2, but the degrees reach 10^49
  and beyond, so coefficient-level brute force is impossible.
* mini profile: m_1 is the smallest admissible value >= n (i.e. 2n).  Degrees
  stay machine-sized, so closed forms can be cross-checked against direct
  coefficient sums; the pi^2/2 kernel bounds no longer apply.

All trig with big multipliers is routed through exact integer folding
(:mod:`hardyrog.angles`); interval membership is decided with certified
rational brackets of pi, never floating comparisons.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .angles import RationalAngle, cospi_frac, sinpi_frac
from . import kernels

HALF_PI_SQ = math.pi * math.pi / 2.0  # explicit Fejer-bound constant


# --------------------------------------------------------------------------
# Certified comparisons against interval endpoints that mix pi-rational and
# plain-rational terms.
# --------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _pi_bracket(digits: int) -> tuple[Fraction, Fraction]:
    """Rational lo < pi < hi with hi - lo = 10**-digits."""
    import mpmath

    with mpmath.workdps(digits + 12):
        scaled = int(mpmath.floor(mpmath.pi * mpmath.mpf(10) ** digits))
    return Fraction(scaled, 10**digits), Fraction(scaled + 1, 10**digits)


def pi_delta_sign(delta: Fraction, rhs: Fraction) -> int:
    """Certified sign of pi*delta - rhs (delta, rhs rational).

    Refines the pi bracket until the sign is decided; pi*delta = rhs can only
    happen when delta = 0 (pi is irrational), handled exactly.
    """
    if delta == 0:
        return -1 if rhs > 0 else (1 if rhs < 0 else 0)
    for digits in (40, 80, 160, 330):
        lo, hi = _pi_bracket(digits)
        lo_val = lo * delta if delta > 0 else hi * delta
        hi_val = hi * delta if delta > 0 else lo * delta
        if lo_val > rhs:
            return 1
        if hi_val < rhs:
            return -1
    raise ArithmeticError(
        f"pi*{delta} vs {rhs} not separable at 330 digits"
    )


# --------------------------------------------------------------------------
# Level data
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HardyLevel:
    """Immutable level-n construction data; safe for concurrent reads."""

    n: int
    x_n: int
    m_seq: tuple[int, ...]
    M_n: float
    mini: bool
    theta_floor: float      # membership requires |theta| >= theta_floor
    sin_floor: float        # membership requires |sin((m_j+1/2)theta)| >= sin_floor
    surrogate: bool = False
    _mod_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def denom(self) -> int:
        """Common angle denominator 4n+1."""
        return 4 * self.n + 1

    @property
    def q_n(self) -> int:
        """Degree of the level polynomial: the last m."""
        return self.m_seq[-1]

    @property
    def j_max(self) -> int:
        """floor(x_n - sqrt(n)); top interval index eligible for membership."""
        s = math.isqrt(self.n)
        return self.x_n - s if s * s == self.n else self.x_n - s - 1

    @property
    def weight(self) -> float:
        """1 / sqrt(M_n + pi^2/2); positive for every constructible level."""
        return 1.0 / math.sqrt(self.M_n + HALF_PI_SQ)

    def angle(self, l: int) -> RationalAngle:
        """A_l = 4 pi l / (4n+1)."""
        if not 1 <= l <= self.x_n:
            raise ValueError(f"angle index {l} outside 1..{self.x_n}")
        return RationalAngle(4 * l, self.denom)

    def m_plus_one_mod(self, modulus: int) -> list[int]:
        """(m_l + 1) mod modulus for all l, cached per modulus."""
        cached = self._mod_cache.get(modulus)
        if cached is None:
            cached = [(m + 1) % modulus for m in self.m_seq]
            self._mod_cache[modulus] = cached
        return cached


@dataclass(frozen=True)
class OmegaHit:
    """Successful membership: interval index j and partial-sum order p = m_j."""

    j: int
    p: int


@dataclass(frozen=True)
class TruncatedSumParts:
    """Closed-form decomposition of S_{m_j}(f_n, sign*theta).

    ``fejer_head``: full Fejer kernels l <= j; ``fejer_scaled``: rescaled
    F_{m_j} kernels l > j; ``dirichlet_tail``: the weighted Dirichlet sum over
    l > j.  The first two are the nonnegative sandwich filling.
    """

    fejer_head: float
    fejer_scaled: float
    dirichlet_tail: float

    @property
    def total(self) -> float:
        return self.fejer_head + self.fejer_scaled + self.dirichlet_tail


# --------------------------------------------------------------------------
# Construction
# --------------------------------------------------------------------------

def _next_admissible(seed: int, denom: int) -> int:
    """Smallest m of the form ((4n+1)k - 1)/2, k odd, with m > seed... via the
    smallest odd k strictly above the Euclidean quotient of 2*seed+1."""
    quotient = (2 * seed + 1) // denom
    k = quotient + 2 if quotient % 2 == 1 else quotient + 1
    return (denom * k - 1) // 2


def _log_pow(n: int, exponent: float) -> float:
    return math.log(n) ** exponent


def _interval_count(n: int) -> int:
    """x_n with a guarded floor: near-integer arguments re-derived at 60 digits."""
    arg = (4 * n + 1) / 4 * (1.0 - _log_pow(n, -1 / 6))
    if abs(arg - round(arg)) < 1e-9:
        import mpmath

        with mpmath.workdps(60):
            arg_mp = mpmath.mpf(4 * n + 1) / 4 * (
                1 - mpmath.log(n) ** (-mpmath.mpf(1) / 6)
            )
            return int(mpmath.floor(arg_mp))
    return math.floor(arg)


def _certificate_constant(n: int, x_n: int) -> float:
    return (4 * n + 1) / (16 * math.pi**2 * x_n) * _log_pow(n, 0.5) - HALF_PI_SQ


def build_level(n: int, mini: bool = False) -> HardyLevel:
    """Construct and verify all level-n data.

    The degree sequence starts from the smallest admissible value at or above
    the seed (n^4, or n in mini profile) and each subsequent entry is the
    smallest admissible value strictly above twice its predecessor, which the
    smallest-odd-cofactor rule realises as m_{l+1} = 2 m_l + 2n + 1.  The
    three level invariants are re-verified exactly on the result.
    """
    if n < 50:
        raise ValueError(f"level index must be >= 50, got {n}")
    x_n = _interval_count(n)
    denom = 4 * n + 1

    seed_min = n if mini else n**4
    m_seq = []
    m = _next_admissible(seed_min - 1, denom)  # smallest admissible >= seed_min
    m_seq.append(m)
    for _ in range(x_n - 1):
        m = _next_admissible(2 * m, denom)
        m_seq.append(m)

    level = HardyLevel(
        n=n,
        x_n=x_n,
        m_seq=tuple(m_seq),
        M_n=_certificate_constant(n, x_n),
        mini=mini,
        theta_floor=_log_pow(n, -1 / 6),
        sin_floor=_log_pow(n, -1 / 6),
    )
    _verify_level(level, seed_min)
    return level


def build_surrogate_level(n: int, m_cert: float, theta_floor: float = 0.0) -> HardyLevel:
    """Mini-profile level with an explicit certificate constant.

    The formula value of M_n stays negative for every computationally
    reachable n (positivity needs n beyond e^30000), and the |theta| floor
    empties the membership set below n of a few thousand.  This constructor
    keeps the entire interval/congruence structure but drops the |theta|
    floor and takes the certificate constant as given, so the divergence
    mechanism can be exercised statistically at desk scale.
    """
    base = build_level(n, mini=True)
    if m_cert + HALF_PI_SQ <= 0:
        raise ValueError("certificate constant must exceed -pi^2/2")
    level = HardyLevel(
        n=base.n,
        x_n=base.x_n,
        m_seq=base.m_seq,
        M_n=float(m_cert),
        mini=True,
        theta_floor=float(theta_floor),
        sin_floor=base.sin_floor,
        surrogate=True,
    )
    _verify_level(level, n)
    return level


def _verify_level(level: HardyLevel, seed_min: int) -> None:
    """Exact big-integer re-verification of the three level invariants."""
    n, x_n, m_seq = level.n, level.x_n, level.m_seq
    denom = level.denom
    if x_n < 2:
        raise RuntimeError(f"invariant failure: x_n = {x_n} < 2 at n = {n}")
    if len(m_seq) != x_n:
        raise RuntimeError("invariant failure: m sequence length != x_n")
    if m_seq[0] < seed_min:
        raise RuntimeError(f"invariant failure: m_1 < {seed_min}")
    for l, m in enumerate(m_seq):
        if (2 * m + 1) % denom != 0:
            raise RuntimeError(f"invariant failure: 2 m_{l+1} + 1 not = 0 mod {denom}")
        if l > 0 and m <= 2 * m_seq[l - 1]:
            raise RuntimeError(f"invariant failure: m_{l+1} <= 2 m_{l}")
    if not level.M_n + HALF_PI_SQ > 0:
        raise RuntimeError("invariant failure: M_n + pi^2/2 <= 0")


def level_summary(level: HardyLevel) -> dict:
    """JSON-ready summary: sizes only, no giant integers."""
    return {
        "n": level.n,
        "x_n": level.x_n,
        "M_n": level.M_n,
        "mini": level.mini,
        "surrogate": level.surrogate,
        "m_digits": [len(str(m)) for m in level.m_seq],
        "q_n_digits": len(str(level.q_n)),
    }


# --------------------------------------------------------------------------
# The level polynomial: coefficients and evaluations
# --------------------------------------------------------------------------

def phi_coeff(level: HardyLevel, r: int) -> float:
    """Degree-r coefficient of the even level polynomial.

    (1/(2 x_n)) sum_l (1 - r/(m_l+1)) cos(r A_l) over the l with m_l >= r;
    the cosine argument is folded exactly as (2 r l) mod (4n+1) over the
    common denominator.  Zero beyond the polynomial degree.
    """
    if r < 0:
        raise ValueError("coefficient degree must be >= 0")
    if r > level.q_n:
        return 0.0
    denom = level.denom
    r_mod = r % denom
    total = 0.0
    for l, m in enumerate(level.m_seq, start=1):
        if m < r:
            continue
        weight = (m + 1 - r) / (m + 1)
        total += weight * cospi_frac(4 * r_mod * l, denom)
    return total / (2 * level.x_n)


def _fejer_at_fraction(m_plus_one_mod: int, m_plus_one: int, num: int, two_q: int) -> float:
    """F_m at angle pi*num/Q given (m+1) mod 4Q precomputed; Q = two_q/2."""
    four_q = 2 * two_q
    num_mod = num % four_q
    if num_mod % two_q == 0:
        return kernels.fejer_peak(m_plus_one)
    s = sinpi_frac(m_plus_one_mod * num_mod, two_q)
    d = sinpi_frac(num_mod, two_q)
    return kernels.fejer_reduced(m_plus_one, s, d)


def phi_eval(level: HardyLevel, theta: RationalAngle) -> float:
    """Exact-reduction evaluation of the level polynomial at theta.

    Average of Fejer kernels at theta -+ A_l; always >= 0.  Residues of the
    huge orders are cached per angle denominator so grids re-use them.
    """
    p, q = theta.p, theta.q
    denom = level.denom
    two_q = 2 * q * denom           # folding modulus for half angles over Q = q*denom
    mods = level.m_plus_one_mod(2 * two_q)
    total = 0.0
    base = p * denom
    for l, (m, m_mod) in enumerate(zip(level.m_seq, mods), start=1):
        off = 4 * l * q
        total += _fejer_at_fraction(m_mod, m + 1, base - off, two_q)
        total += _fejer_at_fraction(m_mod, m + 1, base + off, two_q)
    return total / (2 * level.x_n)


def phi_eval_grid(level: HardyLevel, thetas: np.ndarray) -> np.ndarray:
    """Vectorized float evaluation of the level polynomial on a grid.

    Only valid when every degree fits a double exactly (mini profile); the
    paper profile must go through :func:`phi_eval`.
    """
    if level.q_n >= 2**53:
        raise ValueError("degrees exceed float range; use phi_eval per point")
    th = np.asarray(thetas, dtype=float)
    acc = np.zeros_like(th)
    denom = level.denom
    for l, m in enumerate(level.m_seq, start=1):
        a_l = 4.0 * math.pi * l / denom
        acc += kernels.fejer_eval(m, th - a_l)
        acc += kernels.fejer_eval(m, th + a_l)
    return acc / (2 * level.x_n)


def truncated_sum_parts(
    level: HardyLevel, j: int, theta: RationalAngle, sign: int = 1
) -> TruncatedSumParts:
    """Closed form of the m_j-th partial sum of the one-sided kernel average.

    Splits S_{m_j}(f_n, sign*theta) into the two nonnegative Fejer groups and
    the Dirichlet tail; every kernel argument is reduced exactly, including
    the half-integer multiplier (2 m_j + 1).
    """
    if not 1 <= j <= level.x_n - 1:
        raise ValueError(f"j = {j} outside 1..{level.x_n - 1}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p, q = sign * theta.p, theta.q
    denom = level.denom
    two_q = 2 * q * denom
    four_q = 2 * two_q
    mods = level.m_plus_one_mod(four_q)
    m_j = level.m_seq[j - 1]
    mj_plus = m_j + 1
    mj_mod = mods[j - 1]
    half_mod = (2 * m_j + 1) % four_q
    base = p * denom

    fejer_head = 0.0
    fejer_scaled = 0.0
    dirichlet_tail = 0.0
    for l, (m, m_mod) in enumerate(zip(level.m_seq, mods), start=1):
        num = base - 4 * l * q
        if l <= j:
            fejer_head += _fejer_at_fraction(m_mod, m + 1, num, two_q)
            continue
        ratio_f = mj_plus / (m + 1)
        ratio_d = (m - m_j) / (m + 1)
        fejer_scaled += ratio_f * _fejer_at_fraction(mj_mod, mj_plus, num, two_q)
        num_mod = num % four_q
        if num_mod % two_q == 0:
            dirichlet_tail += ratio_d * (m_j + 0.5)
        else:
            s = sinpi_frac(half_mod * num_mod, two_q)
            d = sinpi_frac(num_mod, two_q)
            dirichlet_tail += ratio_d * kernels.dirichlet_reduced(s, d)
    x = level.x_n
    return TruncatedSumParts(fejer_head / x, fejer_scaled / x, dirichlet_tail / x)


def truncated_sum_closed(
    level: HardyLevel, j: int, theta: RationalAngle, sign: int = 1
) -> float:
    """S_{m_j}(f_n, sign*theta) assembled from the closed-form parts."""
    return truncated_sum_parts(level, j, theta, sign).total


def symmetric_partial_sum(level: HardyLevel, j: int, theta: RationalAngle) -> float:
    """S_{m_j} of the even level polynomial: the two-sided average."""
    plus = truncated_sum_closed(level, j, theta, 1)
    minus = truncated_sum_closed(level, j, theta, -1)
    return 0.5 * (plus + minus)


# --------------------------------------------------------------------------
# Membership and measure of the divergence set
# --------------------------------------------------------------------------

def omega_membership(level: HardyLevel, theta: RationalAngle) -> Optional[OmegaHit]:
    """Locate |theta| in the admissible open intervals and phase condition.

    Inside iff |theta| lies in some (A_j + 1/n^2, A_{j+1} - 1/n^2) with
    j <= floor(x_n - sqrt(n)), clears the |theta| floor, and satisfies the
    sine phase bound at the half-integer order m_j + 1/2.  Interval bounds
    are decided by certified rational comparison, so the answer never depends
    on float rounding; the two threshold comparisons are double precision.
    """
    a = abs(theta)
    if a.is_zero:
        return None
    if level.theta_floor > 0.0 and a.radians < level.theta_floor:
        return None
    denom = level.denom
    j = (a.p * denom) // (4 * a.q)
    if j < 1 or j > level.j_max:
        return None
    frac = a.fraction_of_pi
    n_sq = Fraction(1, level.n * level.n)
    if pi_delta_sign(frac - Fraction(4 * j, denom), n_sq) <= 0:
        return None
    if pi_delta_sign(frac - Fraction(4 * (j + 1), denom), -n_sq) >= 0:
        return None
    m_j = level.m_seq[j - 1]
    if abs(a.sin_half_integer(m_j)) < level.sin_floor:
        return None
    return OmegaHit(j=j, p=m_j)


def en_measure_from_points(level: HardyLevel, angles: Sequence[RationalAngle]) -> float:
    """2 pi times the membership fraction over the given sample points."""
    if not angles:
        raise ValueError("need at least one sample point")
    inside = sum(1 for a in angles if omega_membership(level, a) is not None)
    return 2.0 * math.pi * inside / len(angles)


GRID_DENOM = 2**53  # rational sampling lattice over (-pi, pi)


def sample_angles(samples: int, seed: int) -> list[RationalAngle]:
    """Deterministic uniform draw from the rational grid pi * k / 2^53."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    ks = rng.integers(-(GRID_DENOM - 1), GRID_DENOM, size=samples)
    return [RationalAngle(int(k), GRID_DENOM) for k in ks]


def en_measure_estimate(level: HardyLevel, samples: int, seed: int) -> float:
    """Monte Carlo estimate of the divergence-set measure; in [0, 2 pi]."""
    return en_measure_from_points(level, sample_angles(samples, seed))


def en_measure_lower_bound(level: HardyLevel) -> float:
    """Analytic lower bound for the divergence-set measure, clipped at 0.

    Per admissible interval the phase condition keeps at least
    |J| - (4 pi / (4n+1)) * sin_floor; summing over j <= j_max bounds the
    unrestricted set, and subtracting the |theta| floor accounts for the
    low-angle trim before doubling for the symmetric copy.
    """
    gap = 4.0 * math.pi / level.denom
    per_j = gap - 2.0 / level.n**2 - gap * level.sin_floor
    sigma = max(0, level.j_max) * max(0.0, per_j)
    return max(0.0, 2.0 * (sigma - level.theta_floor))
