"""Block assembly of the truncated spectral density, exact autocovariances at
arbitrary big-integer lags, partial Fourier sums, and divergence certificates.

The K-block model stacks rescaled level polynomials at odd spacings c_1 < c_2
< ... chosen so the nonzero coefficient ranges [c_k, q_k c_k] never overlap:

    f(theta) = (1/2pi) (5 - (1/2) sum_k w_k + sum_k w_k phi_{n_k}(c_k theta))

with w_k = 1/sqrt(M_{n_k} + pi^2/2).  Every autocovariance is then explicit:
gamma(0) = 5, gamma(h) = w_k * coeff_{n_k}(h / c_k) when h is a multiple of
c_k inside block k, and exactly zero everywhere else.  The truncation at
finite K leaves all autocovariances up to lag q_K c_K identical to the full
model's, which is what every reported quantity refers to.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .angles import RationalAngle, cospi_frac
from . import quadrature
from .hardy import (
    HALF_PI_SQ,
    HardyLevel,
    build_level,
    level_summary,
    omega_membership,
    phi_coeff,
    phi_eval,
    phi_eval_grid,
    symmetric_partial_sum,
)

CERT_TOL = 1e-8


class ChainInvariantError(ValueError):
    """A block-chain invariant failed; the chain is rejected."""


class SizeError(ValueError):
    """A requested computation exceeds the explicit feasibility cap."""


@dataclass(frozen=True)
class Block:
    """One spectral block: level n_k copied to degrees c_k .. q_{n_k} c_k."""

    k: int
    level: HardyLevel
    c: int

    @property
    def w(self) -> float:
        return self.level.weight

    @property
    def top_lag(self) -> int:
        return self.level.q_n * self.c


@dataclass(frozen=True)
class AutocovRecord:
    lag: int
    value: float
    block: Optional[int]
    r: Optional[int]


@dataclass(frozen=True)
class DivergenceCertificate:
    """Evidence row for one in-set sample point of block k."""

    k: int
    j: int
    p: int
    block_sum: float
    lower_bound: float
    holds: bool


@dataclass(frozen=True, eq=False)
class BlockChain:
    blocks: tuple[Block, ...]

    @property
    def K(self) -> int:
        return len(self.blocks)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(b.w for b in self.blocks)

    @property
    def floor(self) -> float:
        """Strictly positive lower bound of the density: (5 - sum w/2)/(2 pi)."""
        return (5.0 - 0.5 * sum(self.weights)) / (2.0 * math.pi)

    @property
    def is_grid_evaluable(self) -> bool:
        """True when float-grid evaluation is exact enough (machine degrees)."""
        return all(b.level.q_n * b.c < 2**53 for b in self.blocks)

    def admissibility_report(self) -> list[dict]:
        """Both admissibility readings per block; the square-root form is the
        binding one, the printed (unsquared) form is reported as informational."""
        rows = []
        for b in self.blocks:
            bound = 10.0 / 2**b.k
            inv = 1.0 / (b.level.M_n + HALF_PI_SQ)
            rows.append(
                {
                    "k": b.k,
                    "n": b.level.n,
                    "w": b.w,
                    "bound": bound,
                    "sqrt_form_ok": b.w < bound,
                    "printed_form_value": inv,
                    "printed_form_ok": inv < bound,
                }
            )
        return rows


def _smallest_odd_above(value: int) -> int:
    return value + 2 if value % 2 == 1 else value + 1


def build_chain(
    levels: Sequence[Union[int, HardyLevel]],
    spacings: Optional[Sequence[int]] = None,
    mini: bool = False,
) -> BlockChain:
    """Build and validate a K-block chain (K = 0 gives the constant density).

    ``levels`` may be level indices (built here, paper or mini profile) or
    prebuilt :class:`HardyLevel` objects.  Default spacing takes c_1 = 1 and
    each c_{k+1} as the smallest odd integer strictly above q_{n_k} c_k; an
    explicit odd spacing list may be supplied instead.  All chain invariants
    (non-overlap, square-root admissibility, positive floor) are re-verified
    and any failure names the predicate.
    """
    built: list[HardyLevel] = [
        lv if isinstance(lv, HardyLevel) else build_level(lv, mini=mini)
        for lv in levels
    ]
    ns = [lv.n for lv in built]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ChainInvariantError(f"level indices must be strictly increasing: {ns}")

    cs: list[int] = []
    if spacings is None:
        for lv in built:
            cs.append(1 if not cs else _smallest_odd_above(built[len(cs) - 1].q_n * cs[-1]))
    else:
        cs = [int(c) for c in spacings]
        if len(cs) != len(built):
            raise ChainInvariantError("spacing list length must match level count")

    blocks = tuple(
        Block(k=i + 1, level=lv, c=c) for i, (lv, c) in enumerate(zip(built, cs))
    )
    chain = BlockChain(blocks=blocks)
    _verify_chain(chain)
    return chain


def _verify_chain(chain: BlockChain) -> None:
    for b in chain.blocks:
        if b.c < 1 or b.c % 2 == 0:
            raise ChainInvariantError(f"spacing c_{b.k} = {b.c} is not a positive odd integer")
    for a, b in zip(chain.blocks, chain.blocks[1:]):
        if not a.top_lag < b.c:
            raise ChainInvariantError(
                f"non-overlap violated: q_{{n_{a.k}}} c_{a.k} >= c_{b.k}"
            )
    for row in chain.admissibility_report():
        if not row["sqrt_form_ok"]:
            raise ChainInvariantError(
                f"admissibility violated at k={row['k']}: w={row['w']:.6f} "
                f">= 10/2^k={row['bound']:.6f}"
            )
    if not 5.0 - 0.5 * sum(chain.weights) > 0:
        raise ChainInvariantError("positive floor violated: 5 - sum(w)/2 <= 0")


# --------------------------------------------------------------------------
# Autocovariances
# --------------------------------------------------------------------------

def block_of_lag(chain: BlockChain, h: int) -> Optional[tuple[Block, int]]:
    """The unique (block, r) with h = r c_k inside block k, if any."""
    for b in chain.blocks:
        if b.c <= h <= b.top_lag:
            if h % b.c == 0:
                return b, h // b.c
            return None
    return None


def gamma(chain: BlockChain, h: int) -> AutocovRecord:
    """Autocovariance at lag h (arbitrary-precision integer).

    gamma(0) = 5 exactly; inside block k at multiples of c_k the value is
    w_k times the level coefficient at r = h / c_k; zero everywhere else.
    """
    if h < 0:
        raise ValueError("lag must be >= 0")
    if h == 0:
        return AutocovRecord(lag=0, value=5.0, block=None, r=None)
    located = block_of_lag(chain, h)
    if located is None:
        return AutocovRecord(lag=h, value=0.0, block=None, r=None)
    b, r = located
    return AutocovRecord(lag=h, value=b.w * phi_coeff(b.level, r), block=b.k, r=r)


def fhat(chain: BlockChain, h: int) -> float:
    """Spectral Fourier coefficient: gamma(h) / (2 pi)."""
    return gamma(chain, h).value / (2.0 * math.pi)


def gamma_values(chain: BlockChain, lags: Sequence[int]) -> np.ndarray:
    return np.array([gamma(chain, int(h)).value for h in lags])


# --------------------------------------------------------------------------
# Density evaluation
# --------------------------------------------------------------------------

def density_eval(chain: BlockChain, theta: RationalAngle) -> float:
    """f_K(theta) by exact reduction; bounded below by ``chain.floor``."""
    total = 5.0 - 0.5 * sum(chain.weights)
    for b in chain.blocks:
        total += b.w * phi_eval(b.level, theta * b.c)
    return total / (2.0 * math.pi)


def density_eval_grid(chain: BlockChain, thetas: np.ndarray) -> np.ndarray:
    """Vectorized density on a float grid.

    Requires machine-sized block degrees; phase error grows like
    q_k c_k * eps, so this path is meant for mini chains (ideally c = 1
    blocks) feeding the quadrature cross-checks.
    """
    if not chain.is_grid_evaluable:
        raise SizeError("chain degrees exceed float range; use density_eval")
    th = np.asarray(thetas, dtype=float)
    acc = np.full_like(th, 5.0 - 0.5 * sum(chain.weights))
    for b in chain.blocks:
        acc += b.w * phi_eval_grid(b.level, b.c * th)
    return acc / (2.0 * math.pi)


# --------------------------------------------------------------------------
# Partial Fourier sums of the density
# --------------------------------------------------------------------------

TERM_CAP = 10**7

_INT64_SAFE = 2**62


def _block_contribution(b: Block, count: int, theta: RationalAngle) -> float:
    """sum_{r=1..count} coeff(r) cos(r c theta) for one block, times 2."""
    level, c = b.level, b.c
    p, q = theta.p, theta.q
    cp_mod = (c * p) % (2 * q)
    denom = level.denom
    if count * max(cp_mod, 1) < _INT64_SAFE and count * 4 * level.x_n < _INT64_SAFE:
        r = np.arange(1, count + 1, dtype=np.int64)
        coeff = np.zeros(count)
        for l, m in enumerate(level.m_seq, start=1):
            upto = min(count, m)
            rr = r[:upto]
            res = (4 * l * rr) % (2 * denom)
            coeff[:upto] += (1.0 - rr / (m + 1)) * np.cos(np.pi * res / denom)
        coeff /= 2 * level.x_n
        osc = np.cos(np.pi * ((cp_mod * r) % (2 * q)) / q)
        return 2.0 * b.w * float(np.dot(coeff, osc))
    total = 0.0
    for r in range(1, count + 1):
        total += phi_coeff(level, r) * cospi_frac(cp_mod * r, q)
    return 2.0 * b.w * total


def partial_fourier_sum(
    chain: BlockChain, N: int, theta: RationalAngle, term_cap: int = TERM_CAP
) -> float:
    """Symmetric partial Fourier sum S_N of the density at theta.

    Only lags that are multiples of some c_k contribute, so the sum walks
    r = 1..min(floor(N / c_k), q_{n_k}) within each block.  Refuses with
    :class:`SizeError` when the contributing-term count exceeds the cap.
    """
    if N < 0:
        raise ValueError("partial-sum order must be >= 0")
    counts = [max(0, min(N // b.c, b.level.q_n)) for b in chain.blocks]
    if sum(counts) > term_cap:
        raise SizeError(
            f"{sum(counts)} contributing terms exceed the cap of {term_cap}"
        )
    total = 5.0 / (2.0 * math.pi)
    for b, count in zip(chain.blocks, counts):
        if count:
            total += _block_contribution(b, count, theta) / (2.0 * math.pi)
    return total


def block_boundary_sum(chain: BlockChain, k: int, theta: RationalAngle) -> float:
    """Closed form of S_N at the end-of-block boundary N = q_{n_k} c_k.

    Blocks above k contribute nothing yet, so the partial sum collapses to
    the constant plus the completed blocks' centered polynomials.
    """
    if not 0 <= k <= chain.K:
        raise ValueError(f"block index {k} outside 0..{chain.K}")
    total = 5.0 / (2.0 * math.pi)
    for b in chain.blocks[:k]:
        total += b.w * (phi_eval(b.level, theta * b.c) - 0.5) / (2.0 * math.pi)
    return total


# --------------------------------------------------------------------------
# Divergence certificates
# --------------------------------------------------------------------------

def divergence_certificate(
    chain: BlockChain, k: int, theta: RationalAngle
) -> Optional[DivergenceCertificate]:
    """Check theta against block k's divergence set and certify the bound.

    Folds c_k theta mod 2 pi (c_k odd keeps the set invariant under that
    fold), tests membership of the reduced angle, and on success returns the
    centered block partial sum w_k (S_p(phi, c_k theta) - 1/2) together with
    the theoretical bound w_k (M_{n_k} - 1/2) and whether |block_sum| clears
    it (to CERT_TOL).  Violations are reported, not raised: statistical use
    on surrogate chains counts them.
    """
    if not 1 <= k <= chain.K:
        raise ValueError(f"block index {k} outside 1..{chain.K}")
    b = chain.blocks[k - 1]
    alpha = theta * b.c
    hit = omega_membership(b.level, alpha)
    if hit is None:
        return None
    sp = symmetric_partial_sum(b.level, hit.j, abs(alpha))
    block_sum = b.w * (sp - 0.5)
    lower = b.w * (b.level.M_n - 0.5)
    return DivergenceCertificate(
        k=k,
        j=hit.j,
        p=hit.p,
        block_sum=block_sum,
        lower_bound=lower,
        holds=abs(block_sum) >= lower - CERT_TOL,
    )


# --------------------------------------------------------------------------
# Diagnostics
# --------------------------------------------------------------------------

LOG_GRID_DENOM = 2**40


def log_integral(chain: BlockChain, grid: int) -> float:
    """Gauss-Legendre quadrature of log f_K over (-pi, pi) on ``grid`` panels.

    Finite since f_K >= floor > 0.  Nodes are snapped to the rational lattice
    pi k / 2^40 so the density is evaluated by exact reduction and the result
    is deterministic in the grid size.
    """
    if grid < 16:
        raise ValueError("grid must be >= 16")
    pts, wts = quadrature.panel_nodes(-math.pi, math.pi, grid, 16)
    total = 0.0
    for x, w in zip(pts, wts):
        angle = RationalAngle(round(x / math.pi * LOG_GRID_DENOM), LOG_GRID_DENOM)
        total += w * math.log(density_eval(chain, angle))
    return total


def chain_manifest(chain: BlockChain) -> dict:
    """JSON-ready description: levels, spacing digit counts, weights, floor,
    admissibility under both readings, plus the discrepancy warning."""
    report = chain.admissibility_report()
    warnings = []
    if any(not row["printed_form_ok"] for row in report):
        warnings.append(
            "unsquared admissibility reading fails at "
            + ", ".join(f"k={row['k']}" for row in report if not row["printed_form_ok"])
            + "; the binding predicate is the square-root form 1/sqrt(M+pi^2/2) < 10/2^k"
        )
    return {
        "K": chain.K,
        "levels": [level_summary(b.level) for b in chain.blocks],
        "c_digits": [len(str(b.c)) for b in chain.blocks],
        "c_values": [str(b.c) for b in chain.blocks],
        "w": list(chain.weights),
        "floor": chain.floor,
        "admissibility": report,
        "warnings": warnings,
    }


# --------------------------------------------------------------------------
# CSV emission (External Interfaces)
# --------------------------------------------------------------------------

def format_value(v: float) -> str:
    """Fixed 17-significant-digit decimal rendering for reproducible files."""
    return f"{v:.17g}"


def write_acov_csv(records: Sequence[AutocovRecord], path) -> None:
    """lag,value,block,r with arbitrary-length decimal lags, LF endings."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lag", "value", "block", "r"])
        for rec in records:
            writer.writerow(
                [
                    str(rec.lag),
                    format_value(rec.value),
                    "" if rec.block is None else str(rec.block),
                    "" if rec.r is None else str(rec.r),
                ]
            )
