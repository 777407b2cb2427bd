"""Prime exponential sums and their local models.

T*(alpha) = sum over the prime subset of e(p alpha), evaluated directly or
on a power-of-two grid through an FFT.  The local models replace the primes
by z0-rough integers weighted by 1/(V(z0) log N); the sqrt(2) subset gets a
further Fourier detection of the condition {p sqrt(2)} <= 1/2, and
vaaler_coeffs builds the trigonometric interval approximation behind it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import PrimeContext

TWO_PI = 2.0 * np.pi

#: floor(sqrt(2) * 2^128): 128 fractional bits, enough that the membership
#: test {p sqrt(2)} <= 1/2 is exact for any p addressable here
_SQRT2_FIX = math.isqrt(2 << 256)
_FRAC_MASK = (1 << 128) - 1
_HALF_FIX = 1 << 127


def sqrt2_frac(k: int) -> float:
    """{k sqrt(2)} with the error confined to ~ k * 2^-128."""
    return ((k * _SQRT2_FIX) & _FRAC_MASK) / float(1 << 128)


@dataclass(frozen=True)
class PrimeSubset:
    """A subset of the primes in [sqrt(N), N] with its exponential sum."""
    N: int
    members: np.ndarray
    label: str

    def __post_init__(self):
        if len(self.members) == 0:
            raise ValueError(f"empty prime subset ({self.label}, N={self.N})")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def K(self) -> float:
        """Density defect N / (|P*| log N); equals 1 + o(1) for all primes."""
        return self.N / (self.size * math.log(self.N))


def _range_primes(ctx: PrimeContext, N: int, pmin=None) -> np.ndarray:
    if N < 100:
        raise ValueError(f"N={N} must be >= 100")
    ps = ctx.primes_below(N + 1)
    if pmin is None:
        keep = ps.astype(np.int64) ** 2 >= N
    else:
        keep = ps >= pmin
    return ps[keep].astype(np.int64)


def subset_full(ctx: PrimeContext, N: int, pmin=None) -> PrimeSubset:
    """All primes in [sqrt(N), N] (or [pmin, N] when a cutoff is given)."""
    return PrimeSubset(N, _range_primes(ctx, N, pmin), "full")


def subset_sqrt2(ctx: PrimeContext, N: int, pmin=None) -> PrimeSubset:
    """Primes p in range with {p sqrt(2)} <= 1/2, decided in fixed point."""
    ps = _range_primes(ctx, N, pmin)
    keep = [((int(p) * _SQRT2_FIX) & _FRAC_MASK) <= _HALF_FIX for p in ps]
    return PrimeSubset(N, ps[np.array(keep)], "sqrt2")


def subset_random(ctx: PrimeContext, N: int, density: float = 0.5,
                  seed: int = 0, pmin=None) -> PrimeSubset:
    """Seeded random subsequence of the range primes at the given density."""
    if not 0 < density <= 1:
        raise ValueError(f"density={density} must lie in (0, 1]")
    ps = _range_primes(ctx, N, pmin)
    rng = np.random.default_rng(seed)
    keep = rng.random(len(ps)) < density
    return PrimeSubset(N, ps[keep], f"random({density}, seed={seed})")


def exp_sum_at(subset: PrimeSubset, alpha: float) -> complex:
    return complex(np.exp(TWO_PI * 1j * alpha * subset.members).sum())


@dataclass(frozen=True)
class SpectrumGrid:
    """values[j] = T*(j/G) on a power-of-two grid of size G >= N."""
    subset: PrimeSubset
    G: int
    values: np.ndarray = field(repr=False)

    def abs_normalized(self) -> np.ndarray:
        return np.abs(self.values) / self.subset.size


def default_grid_size(N: int) -> int:
    # 32 samples per 1/N arc width, rounded up to a power of two
    return 1 << max(0, (32 * N - 1).bit_length())


def spectrum(subset: PrimeSubset, G=None) -> SpectrumGrid:
    """Evaluate T* on the uniform grid j/G by one length-G FFT of the
    member indicator (conjugated: the sum carries e(+p alpha))."""
    if G is None:
        G = default_grid_size(subset.N)
    if G < subset.N:
        raise ValueError(f"grid size {G} is below N={subset.N}")
    if G & (G - 1):
        raise ValueError(f"grid size {G} is not a power of two")
    indicator = np.zeros(G)
    indicator[subset.members] = 1.0
    return SpectrumGrid(subset, G, np.conj(np.fft.fft(indicator)))


def l1_estimate(grid: SpectrumGrid) -> float:
    """Riemann sum for the L1 norm of T*; compare against sqrt(N/log N)."""
    return float(np.abs(grid.values).mean())


# -- local models ---------------------------------------------------------


def rough_integers(ctx: PrimeContext, N: int, z0) -> np.ndarray:
    """Ascending n <= N with no prime factor below z0 (n=1 included)."""
    if N > ctx.limit:
        raise ValueError(f"N={N} exceeds prime table limit {ctx.limit}")
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    if z0 > 2:
        mask[2:] = ctx.spf_table[2 : N + 1] >= z0
    return np.flatnonzero(mask).astype(np.int64)


def _sifted_sum(ns: np.ndarray, alpha: float) -> complex:
    return complex(np.exp(TWO_PI * 1j * alpha * ns).sum())


def local_model_full(ctx: PrimeContext, N: int, z0, alpha: float,
                     _rough=None) -> complex:
    """(1 / (V(z0) log N)) sum over z0-rough n <= N of e(n alpha): the
    rough-number proxy for the prime exponential sum."""
    ns = rough_integers(ctx, N, z0) if _rough is None else _rough
    V = float(ctx.mertens_product(z0))
    return _sifted_sum(ns, alpha) / (V * math.log(N))


def local_model_sqrt2(ctx: PrimeContext, N: int, z0, H: int, alpha: float,
                      _rough=None) -> complex:
    """Local model for the sqrt(2) subset: the half-interval indicator
    {x} <= 1/2 expanded to H Fourier terms, each shifting the rough-number
    model by h sqrt(2) (reduced mod 1 in fixed point)."""
    if H < 0:
        raise ValueError(f"H={H} must be >= 0")
    ns = rough_integers(ctx, N, z0) if _rough is None else _rough
    V = float(ctx.mertens_product(z0))
    scale = 1.0 / (V * math.log(N))
    total = 0.5 * _sifted_sum(ns, alpha)
    for h in range(-H, H + 1):
        if h == 0 or h % 2 == 0:
            continue
        shifted = (sqrt2_frac(h) if h > 0 else 1.0 - sqrt2_frac(-h)) + alpha
        total += _sifted_sum(ns, shifted % 1.0) / (1j * np.pi * h)
    return total * scale


# -- interval polynomial ---------------------------------------------------


@dataclass(frozen=True)
class IntervalPolynomial:
    """Fejer-weighted Fourier truncation of an interval indicator on the
    circle.  coeffs[H + h] = a_H(h); a_H(0) = |I| and
    |a_H(h)| <= min(|I|, 1/(pi |h|))."""
    lo: float
    hi: float
    H: int
    coeffs: np.ndarray = field(repr=False)

    @property
    def length(self) -> float:
        return (self.hi - self.lo) % 1.0

    def coeff(self, h: int) -> complex:
        if abs(h) > self.H:
            return 0j
        return complex(self.coeffs[self.H + h])

    def __call__(self, x):
        hs = np.arange(-self.H, self.H + 1)
        phases = np.exp(TWO_PI * 1j * np.multiply.outer(np.asarray(x, dtype=float), hs))
        return (phases @ self.coeffs).real


def vaaler_coeffs(lo: float, hi: float, H: int) -> IntervalPolynomial:
    """Interval polynomial of degree H for the arc [lo, hi] (wrap allowed)."""
    if H < 1:
        raise ValueError(f"H={H} must be >= 1")
    length = (hi - lo) % 1.0
    hs = np.arange(-H, H + 1)
    coeffs = np.empty(2 * H + 1, dtype=complex)
    coeffs[H] = length
    nz = hs != 0
    h = hs[nz]
    raw = (np.exp(-TWO_PI * 1j * h * lo) - np.exp(-TWO_PI * 1j * h * (lo + length))) \
        / (TWO_PI * 1j * h)
    coeffs[nz] = raw * (1.0 - np.abs(h) / (H + 1.0))
    return IntervalPolynomial(lo, hi, H, coeffs)
