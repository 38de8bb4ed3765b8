"""Dirichlet and Fejer kernels, plus symmetric partial sums of coefficient series.

Two evaluation regimes:

* machine-order kernels (``dirichlet_eval`` / ``fejer_eval``): closed sine-ratio
  forms away from sin(theta/2) = 0, finite coefficient sums next to it.  Both
  accept scalars or numpy arrays.
* huge-order kernels (``*_eval_huge``): the order may have hundreds of digits,
  so the argument (m + 1/2) * theta is folded exactly through
  :mod:`hardyrog.angles` and the result is assembled with frexp/ldexp scaling
  so it neither overflows nor underflows prematurely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .angles import RationalAngle, sinpi_frac

# Below this |sin(theta/2)| the sine-ratio forms lose precision and the
# finite coefficient sums take over.
FORM_SWITCH = 1e-6


def _scaled_ratio(num: float, denom_mantissa: float, exponent: int) -> float:
    """num / (denom_mantissa * 2**exponent) without intermediate overflow."""
    try:
        return math.ldexp(num / denom_mantissa, -exponent)
    except OverflowError:
        return math.copysign(math.inf, num / denom_mantissa)


def dirichlet_eval(n: int, theta):
    """Dirichlet kernel D_n(theta) = 1/2 + sum_{l=1..n} cos(l theta).

    Uses sin((n+1/2)theta) / (2 sin(theta/2)) where the denominator is safe,
    the cosine sum otherwise.  ``theta`` may be a float or ndarray.
    """
    if n < 0:
        raise ValueError("kernel order must be >= 0")
    th = np.asarray(theta, dtype=float)
    half_sin = np.sin(th / 2.0)
    safe = np.abs(half_sin) > FORM_SWITCH
    out = np.empty_like(th)
    out[safe] = np.sin((n + 0.5) * th[safe]) / (2.0 * half_sin[safe])
    if np.any(~safe):
        small = th[~safe]
        ls = np.arange(1, n + 1, dtype=float)
        out[~safe] = 0.5 + np.cos(np.outer(small, ls)).sum(axis=1)
    return out if th.ndim else float(out)


def fejer_eval(n: int, theta):
    """Fejer kernel F_n(theta), the Cesaro average of D_0..D_n; always >= 0.

    Squared-sine closed form away from sin(theta/2) = 0; next to it, the
    averaged-Dirichlet form collapsed to its coefficient sum
    1/2 + sum (1 - l/(n+1)) cos(l theta).
    """
    if n < 0:
        raise ValueError("kernel order must be >= 0")
    th = np.asarray(theta, dtype=float)
    half_sin = np.sin(th / 2.0)
    safe = np.abs(half_sin) > FORM_SWITCH
    out = np.empty_like(th)
    ratio = np.sin(0.5 * (n + 1) * th[safe]) / (2.0 * half_sin[safe])
    out[safe] = (2.0 / (n + 1)) * ratio * ratio
    if np.any(~safe):
        small = th[~safe]
        ls = np.arange(1, n + 1, dtype=float)
        weights = 1.0 - ls / (n + 1)
        out[~safe] = 0.5 + (np.cos(np.outer(small, ls)) * weights).sum(axis=1)
    return out if th.ndim else float(out)


def fejer_peak(m_plus_one: int) -> float:
    """F_m(0) = (m+1)/2, saturating to +inf beyond float range."""
    try:
        return m_plus_one / 2
    except OverflowError:
        return math.inf


def fejer_reduced(m_plus_one: int, s: float, d: float) -> float:
    """Fejer value from pre-reduced sines s = sin((m+1)theta/2), d = sin(theta/2).

    Assembles s^2 / (2 (m+1) d^2) with frexp/ldexp scaling so that huge m and
    tiny d cannot overflow intermediates; d must be nonzero.
    """
    dm, de = math.frexp(d)
    shift = max(0, m_plus_one.bit_length() - 53)
    m_f = float(m_plus_one >> shift)
    return _scaled_ratio(s * s / (2.0 * m_f), dm * dm, 2 * de + shift)


def dirichlet_reduced(s: float, d: float) -> float:
    """Dirichlet value s / (2 d) from pre-reduced sines; d must be nonzero."""
    dm, de = math.frexp(d)
    return _scaled_ratio(s / 2.0, dm, de)


def fejer_eval_huge(m_plus_one: int, theta: RationalAngle) -> float:
    """F_m(theta) for orders with arbitrarily many digits, theta = pi p/q exact.

    The half argument (m+1) theta / 2 is reduced as the big-integer residue
    (m+1) p mod 4q before the single float sine call.  Returns +inf only when
    the true value itself exceeds float range (theta = 0 with (m+1)/2 huge).
    """
    if m_plus_one < 1:
        raise ValueError("kernel order must satisfy m + 1 >= 1")
    if theta.is_zero:
        return fejer_peak(m_plus_one)
    s = sinpi_frac(theta.p * m_plus_one, 2 * theta.q)
    d = theta.sin_half()  # nonzero: canonical theta != 0 mod 2pi
    return fejer_reduced(m_plus_one, s, d)


def dirichlet_eval_huge(m: int, theta: RationalAngle) -> float:
    """D_m(theta) for arbitrarily large m via exact reduction of (m+1/2) theta."""
    if m < 0:
        raise ValueError("kernel order must be >= 0")
    if theta.is_zero:
        try:
            return m + 0.5
        except OverflowError:
            return math.inf
    return dirichlet_reduced(theta.sin_half_integer(m), theta.sin_half())


@dataclass(frozen=True)
class CoeffSeries:
    """Finite symmetric coefficient series: coeff(-l) == coeff(l), real values.

    ``coefficients`` maps signed degrees to values; only the even-symmetric
    case is representable, which keeps every partial sum real.
    """

    coefficients: Mapping[int, float]
    _degrees: np.ndarray = field(init=False, repr=False, compare=False)
    _values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        coeffs = dict(self.coefficients)
        for l, v in coeffs.items():
            if coeffs.get(-l) != v:
                raise ValueError(f"asymmetric coefficients at degree {l}")
        degrees = np.array(sorted(l for l in coeffs if l >= 0), dtype=np.int64)
        values = np.array([coeffs[int(l)] for l in degrees], dtype=float)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "_degrees", degrees)
        object.__setattr__(self, "_values", values)

    @classmethod
    def from_nonnegative(cls, nonneg: Mapping[int, float]) -> "CoeffSeries":
        """Build a symmetric series by mirroring degrees l >= 0."""
        full = {}
        for l, v in nonneg.items():
            if l < 0:
                raise ValueError("from_nonnegative expects degrees >= 0")
            full[l] = v
            full[-l] = v
        return cls(full)

    @classmethod
    def dirichlet(cls, n: int) -> "CoeffSeries":
        """Coefficient series of D_n: 1/2 at every |l| <= n."""
        return cls.from_nonnegative({l: 0.5 for l in range(n + 1)})

    @classmethod
    def fejer(cls, n: int) -> "CoeffSeries":
        """Coefficient series of F_n: (1 - |l|/(n+1))/2 at |l| <= n."""
        return cls.from_nonnegative(
            {l: 0.5 * (1.0 - l / (n + 1)) for l in range(n + 1)}
        )

    @property
    def degree(self) -> int:
        return int(self._degrees[-1]) if len(self._degrees) else 0


def partial_sum(series: CoeffSeries, n: int, theta: float) -> float:
    """n-th symmetric partial sum of a symmetric series at theta.

    Equals coeff(0) + 2 sum_{1<=l<=n} coeff(l) cos(l theta), which is the real
    form of sum_{|l|<=n} coeff(l) e^{il theta}.
    """
    if n < 0:
        raise ValueError("partial sum order must be >= 0")
    if n > series.degree:
        raise ValueError(
            f"order {n} exceeds available coefficients (degree {series.degree})"
        )
    degrees = series._degrees
    values = series._values
    mask = (degrees <= n) & (degrees > 0)
    head = series.coefficients.get(0, 0.0)
    ls = degrees[mask].astype(float)
    return float(head + 2.0 * np.dot(values[mask], np.cos(ls * theta)))
