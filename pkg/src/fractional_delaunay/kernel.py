"""Cylindrical convolution kernel, its periodization, and the A-identity.

The kernel acting on radial profiles of period-L functions is

    K(xi) = kappa * int_{S^{n-1}} e^{-(n+2s)xi/2}
            * (1 + e^{-2 xi} - 2 e^{-xi} <theta, phi>)^{-(n+2s)/2} dphi,

which reduces, through the zonal substitution and the Euler integral, to a
single Gauss hypergeometric evaluation

    K(xi) = kappa * |S^{n-2}| * 2^(2b+1) * B(b+1, b+1)
            * x^g * (1-x)^(-2g) * 2F1(g, b+1; 2b+2; -4x/(1-x)^2),

with x = e^{-xi}, g = (n+2s)/2, b = (n-3)/2.  This form is even in xi by
algebra, positive, blows up like |xi|^(-(1+2s)) at the origin with exact
constant A0 = kappa*|S^{n-2}|*B((n-1)/2, s+1/2)/2, and decays like
e^(-(n+2s)|xi|/2) in the tail.  The periodization is the lattice sum
K_L(xi) = sum_j K(xi - jL), truncated with a certified geometric bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import hyp2f1, roots_jacobi

from .constants import Params, gamma, make_params
from .errors import AccuracyError, ParameterError, SingularityError

# beyond this |xi| the closed form is evaluated at the folded offset to keep
# x = e^{-xi} inside floating-point range; K is even so nothing changes
_FOLD_AT = 500.0
# below this |xi| the leading asymptote is exact to ~1e-16 relative
_TINY_XI = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    """Kernel evaluation policy: parameters, quadrature sizes, tolerances.

    ``printed_form`` switches to the uncorrected kernel display (cross term
    2 e^{-2 xi} <theta,phi> and numerator exponent (2s-n)/2), which is not
    even in xi.  It exists only for fault-injection in the certification
    suite and must stay False for real computations.
    """

    params: Params
    angular_nodes: int = 128
    tail_cut: float = 30.0
    abs_tol: float = 1e-10
    printed_form: bool = False

    def __post_init__(self):
        if self.angular_nodes < 32:
            raise ParameterError("angular_nodes must be at least 32")
        if not self.abs_tol > 0.0:
            raise ParameterError("abs_tol must be positive")
        if not self.tail_cut > 1.0:
            raise ParameterError("tail_cut must exceed 1")
        s = self.params.s
        if not 0.05 <= s <= 0.999:
            raise ParameterError(
                f"kernel quadratures are supported for s in [0.05, 0.999], got {s}"
            )


def default_spec(n: int, s: float, **kwargs) -> KernelSpec:
    return KernelSpec(params=make_params(n, s), **kwargs)


# ---------------------------------------------------------------------------
# quadrature helpers


@lru_cache(maxsize=64)
def _leggauss(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


@lru_cache(maxsize=64)
def _jacgauss(nodes: int, beta_exp: float):
    # weight (1+t)^beta_exp on [-1, 1]
    return roots_jacobi(nodes, 0.0, beta_exp)


def integrate_panels(f, edges, nodes=16):
    """Gauss-Legendre integration of f over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    xg, wg = _leggauss(nodes)
    mid = 0.5 * (edges[:-1, None] + edges[1:, None])
    half = 0.5 * (edges[1:, None] - edges[:-1, None])
    xs = mid + half * xg
    vals = f(xs.ravel()).reshape(xs.shape)
    return float(np.sum(half * wg * vals))


def integrate_power_weighted(f_smooth, delta, s, nodes=40):
    """int_0^delta xi^(1-2s) f(xi) dxi for smooth f, via Gauss-Jacobi.

    The fractional weight is handled exactly, so only the smooth factor
    needs polynomial resolution.  This is the workhorse for every integral
    that sees the |xi|^(-(1+2s)) kernel singularity.
    """
    t, w = _jacgauss(nodes, 1.0 - 2.0 * s)
    z = 0.5 * (t + 1.0)
    scale = delta ** (2.0 - 2.0 * s) / 2.0 ** (2.0 - 2.0 * s)
    return float(scale * np.sum(w * f_smooth(delta * z)))


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k."""
    return 2.0 * math.pi ** (0.5 * (k + 1)) / gamma(0.5 * (k + 1))


def angular_reduce(f, n: int, nodes: int = 256) -> float:
    """Integrate a zonal function over S^{n-1}.

    Computes int_{S^{n-1}} f(<theta, phi>) dphi, which reduces to
    |S^{n-2}| * int_{-1}^{1} f(c) (1-c^2)^{(n-3)/2} dc.  The weight is
    absorbed into a Gauss-Jacobi rule; a doubled-order rule provides the
    error estimate.
    """
    if n < 3:
        raise ParameterError("angular reduction needs n >= 3")
    alpha = 0.5 * (n - 3)

    def _quad(k):
        t, w = roots_jacobi(k, alpha, alpha)
        return float(np.sum(w * np.asarray([f(c) for c in t])))

    coarse = _quad(nodes)
    fine = _quad(2 * nodes)
    est = abs(fine - coarse)
    if est > 1e-8 * (1.0 + abs(fine)):
        raise AccuracyError(
            f"angular quadrature did not converge (estimate {est:.3e})",
            estimate=est,
        )
    return sphere_area(n - 2) * fine


# ---------------------------------------------------------------------------
# line kernel


def near_origin_constant(params: Params) -> float:
    """Exact coefficient A0 of the |xi|^(-(1+2s)) blow-up.

    Equals the one-dimensional fractional-Laplacian constant
    2^(2s) s Gamma(1/2+s) / (sqrt(pi) Gamma(1-s)) independently of n.
    """
    n, s = params.n, params.s
    return params.kappa * sphere_area(n - 2) * 0.5 * beta_fn(0.5 * (n - 1), s + 0.5)


def _line_smooth(xi, params: Params):
    """g(xi) = |xi|^(1+2s) K(xi): smooth, even, g(0) = A0."""
    xi = np.asarray(xi, dtype=float)
    n, s = params.n, params.s
    g = 0.5 * (n + 2.0 * s)
    b = 0.5 * (n - 3.0)
    out = np.full(xi.shape, near_origin_constant(params))
    mask = np.abs(xi) > _TINY_XI
    if np.any(mask):
        xv = np.where(np.abs(xi[mask]) > _FOLD_AT, np.abs(xi[mask]), xi[mask])
        x = np.exp(-xv)
        omx = -np.expm1(-xv)
        z = -4.0 * x / (omx * omx)
        pref = (
            params.kappa
            * sphere_area(n - 2)
            * 2.0 ** (2.0 * b + 1.0)
            * beta_fn(b + 1.0, b + 1.0)
        )
        out[mask] = (
            np.abs(xv) ** (1.0 + 2.0 * s)
            * pref
            * x ** g
            * (omx * omx) ** (-g)
            * hyp2f1(g, b + 1.0, 2.0 * b + 2.0, z)
        )
    return out


def _line_values(xi, params: Params):
    """K(xi) on the line, vectorized; xi must be nonzero."""
    xi = np.asarray(xi, dtype=float)
    return _line_smooth(xi, params) * np.abs(xi) ** (-(1.0 + 2.0 * params.s))


def _printed_form_values(xi, spec: KernelSpec):
    """The uncorrected display (fault injection only): not even in xi."""
    p = spec.params
    n, s = p.n, p.s
    g = 0.5 * (n + 2.0 * s)
    xi = np.asarray(xi, dtype=float)
    alpha = 0.5 * (n - 3)
    t, w = roots_jacobi(max(spec.angular_nodes, 200), alpha, alpha)
    vals = np.empty(xi.shape)
    for i, x in np.ndenumerate(xi):
        den = (1.0 + math.exp(-2.0 * x) - 2.0 * math.exp(-2.0 * x) * t) ** (-g)
        vals[i] = math.exp(0.5 * (2.0 * s - n) * x) * np.sum(w * den)
    return p.kappa * sphere_area(n - 2) * vals


def kernel_Ks(xi: float, spec: KernelSpec) -> float:
    """Line kernel K(xi); strictly positive and even, singular at xi = 0."""
    xi = float(xi)
    if xi == 0.0:
        raise SingularityError("kernel is singular at xi = 0")
    if spec.printed_form:
        return float(_printed_form_values(np.asarray([xi]), spec)[0])
    return float(_line_values(np.asarray([xi]), spec.params)[0])


# ---------------------------------------------------------------------------
# periodization


def _image_sum(xi, L, params: Params, rel_floor=1e-18):
    """sum_{j != 0} K(xi - jL) for |xi| <= L/2, with truncation bound."""
    xi = np.asarray(xi, dtype=float)
    total = np.zeros(xi.shape)
    alpha = 0.5 * (params.n + 2.0 * params.s)
    scale = float(np.max(_line_values(np.full(1, 0.5 * L), params)))
    j = 1
    while j <= 1000:
        term = _line_values(xi + j * L, params) + _line_values(np.abs(xi - j * L), params)
        total += term
        if float(np.max(term, initial=0.0)) < rel_floor * max(scale, 1e-300):
            break
        j += 1
    # e^{alpha xi} K(xi) is decreasing, so remaining images are dominated by a
    # geometric series of ratio e^{-alpha L}
    last = float(np.max(_line_values(np.abs(xi) + (j + 1) * L - L, params), initial=0.0))
    bound = 2.0 * last * math.exp(-alpha * L) / (-math.expm1(-alpha * L))
    return total, bound


def _periodized_values(xi, L, params: Params):
    xi = np.asarray(xi, dtype=float)
    folded = np.abs(np.mod(xi + 0.5 * L, L) - 0.5 * L)
    img, bound = _image_sum(folded, L, params)
    return _line_values(folded, params) + img, bound


def kernel_periodized(xi: float, L: float, spec: KernelSpec) -> float:
    """Periodized kernel K_L(xi) = sum_j K(xi - jL), period L > 0."""
    if not L > 0.0:
        raise ParameterError("period L must be positive")
    xi = float(xi)
    if math.isclose(math.remainder(xi, L), 0.0, abs_tol=1e-300):
        raise SingularityError("periodized kernel is singular at xi = 0 (mod L)")
    vals, _ = _periodized_values(np.asarray([xi]), L, spec.params)
    return float(vals[0])


def _periodized_smooth(xi, L, params: Params):
    """|xi|^(1+2s) K_L(xi) for |xi| <= L/2: smooth through the origin."""
    xi = np.asarray(xi, dtype=float)
    img, _ = _image_sum(xi, L, params)
    return _line_smooth(xi, params) + np.abs(xi) ** (1.0 + 2.0 * params.s) * img


# ---------------------------------------------------------------------------
# tail integrals and moments


def _tail_edges(xs, s, xi_max):
    xs = np.asarray(xs, dtype=float)
    lo = float(np.min(xs))
    hi = max(xi_max, float(np.max(xs)) * 1.5 + 10.0)
    filler = np.geomspace(max(lo, 1e-12), hi, 160)
    edges = np.unique(np.concatenate([xs, filler, [hi]]))
    return edges[edges >= lo]


def kernel_tail_integral(xs, spec: KernelSpec):
    """T(x) = int_x^inf K(xi) dxi, vectorized over positive x.

    All requested points are inserted as panel edges of one composite rule,
    so the family of tails comes from a single suffix sum.  The analytic
    remainder beyond the last edge uses the exponential envelope.
    """
    params = spec.params
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0.0):
        raise ParameterError("tail integral requires positive lower limits")
    alpha = 0.5 * (params.n + 2.0 * params.s)
    xi_max = max(spec.tail_cut, 18.0 / params.s, float(np.max(xs)) + 5.0)
    edges = _tail_edges(xs, params.s, xi_max)
    xg, wg = _leggauss(16)
    mid = 0.5 * (edges[:-1, None] + edges[1:, None])
    half = 0.5 * (edges[1:, None] - edges[:-1, None])
    panel_vals = np.sum(half * wg * _line_values((mid + half * xg).ravel(), params).reshape(mid.shape), axis=1)
    suffix = np.concatenate([np.cumsum(panel_vals[::-1])[::-1], [0.0]])
    # remainder beyond the last edge, from the decreasing envelope e^{a xi}K
    rem = float(_line_values(edges[-1:], params)[0]) / alpha
    idx = np.searchsorted(edges, xs)
    return suffix[idx] + rem


def kernel_second_moment(a: float, b: float, spec: KernelSpec, L: float | None = None) -> float:
    """int_a^b xi^2 K(xi) dxi (periodized kernel when L is given), 0 <= a < b."""
    params = spec.params
    s = params.s
    smooth = (lambda x: _periodized_smooth(x, L, params)) if L else (
        lambda x: _line_smooth(x, params)
    )
    if a == 0.0:
        return integrate_power_weighted(smooth, b, s)
    return integrate_panels(
        lambda x: smooth(x) * x ** (1.0 - 2.0 * s), np.linspace(a, b, 4), nodes=16
    )


def check_A(spec: KernelSpec) -> float:
    """Evaluate the normalization integral A; the identity gives A = c.

    In the log variable the symmetrized integrand is
    2 (cosh((n-2s) xi / 2) - 1) K(xi), integrable at the origin with an
    O(xi^(1-2s)) profile that the Jacobi rule absorbs exactly.
    """
    params = spec.params
    n, s = params.n, params.s
    bet = 0.5 * (n - 2.0 * s)

    def cosh_factor(xi):
        # 2cosh(y)-2 = 4 sinh^2(y/2), stable at tiny xi
        return 4.0 * np.sinh(0.5 * bet * xi) ** 2 / (xi * xi)

    inner = integrate_power_weighted(
        lambda xi: cosh_factor(xi) * _line_smooth(xi, params), 1.0, s
    )
    xi_max = max(spec.tail_cut, 18.0 / s)
    outer = integrate_panels(
        lambda xi: 4.0 * np.sinh(0.5 * bet * xi) ** 2 * _line_values(xi, params),
        np.geomspace(1.0, xi_max, 120),
        nodes=20,
    )
    return inner + outer


# ---------------------------------------------------------------------------
# sampled tables


@dataclass(frozen=True)
class KernelTable:
    """Sampled kernel values with the certified periodization tail bound."""

    spec: KernelSpec
    L: float | None            # None marks the line kernel
    offsets: np.ndarray
    values: np.ndarray
    periodized: np.ndarray | None
    tail_bound: float

    def to_csv(self, path):
        rows = ["# schema: kernel-table v1; columns: xi, K, K_periodized, tail_bound"]
        per = self.periodized if self.periodized is not None else np.full_like(self.values, np.nan)
        for xi, k, kp in zip(self.offsets, self.values, per):
            rows.append(f"{xi:.17g},{k:.17g},{kp:.17g},{self.tail_bound:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def build_table(spec: KernelSpec, offsets, L: float | None = None) -> KernelTable:
    """Sample K (and K_L when a period is given) on sorted nonzero offsets."""
    offsets = np.sort(np.asarray(offsets, dtype=float))
    if np.any(offsets == 0.0) or (L and np.any(np.isclose(np.remainder(offsets, L), 0.0))):
        raise SingularityError("offsets must avoid the lattice singularities")
    values = _line_values(offsets, spec.params)
    periodized = None
    bound = 0.0
    if L is not None:
        periodized, bound = _periodized_values(offsets, L, spec.params)
    if np.any(values <= 0.0):
        raise AccuracyError("kernel sample underflowed to a nonpositive value")
    return KernelTable(
        spec=spec, L=L, offsets=offsets, values=values,
        periodized=periodized, tail_bound=bound,
    )


def with_printed_form(spec: KernelSpec) -> KernelSpec:
    """Debug copy of a spec with the uncorrected kernel display enabled."""
    return replace(spec, printed_form=True)
