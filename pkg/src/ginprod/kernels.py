"""Correlation kernels of the log-spectrum of complex Ginibre products.

The finite-N kernel is a double contour integral: a loop around the Gamma
poles ``0, -1, ..., -N+1`` in t against a vertical line in s.  Its three
scaling limits (Gaussian, critical, sine/Airy) are evaluated here on the
numerically well-conditioned contours, every exponent referenced to the
local saddle so the integrands stay inside double-precision range.

The critical kernel family ``K_crit(x, y; gamma)`` has three independent
evaluation routes that cross-validate each other:

* ``crit_kernel_integral`` -- the defining double contour integral;
* ``crit_kernel_series``   -- the integrable form built from the residue
  families f_k / g_k, with a Hurwitz-zeta accelerated tail;
* a scaled convolution route (``crit_f_minus1_scaled`` paired with
  ``crit_g_minus1_scaled``) that stays stable arbitrarily deep in the left
  bulk, where the first two lose all their digits to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.special
from scipy.special import loggamma

from . import contours as ct
from .contours import ComplexPath, LineSeg, QuadSpec, RaySeg
from .specfun import digamma, solve_t0, jacobi_theta

__all__ = [
    "KernelEvalError",
    "ProductEnsembleParams",
    "ScalingMap",
    "KernelHandle",
    "x_N",
    "scaling_normal",
    "scaling_critical",
    "scaling_case3",
    "v_M",
    "v_infinity",
    "rho_MN",
    "finite_n_kernel",
    "finite_n_kernel_matrix",
    "finite_n_kernel_rescaled",
    "crit_kernel_integral",
    "crit_kernel_series",
    "crit_kernel",
    "crit_kernel_hat",
    "crit_kernel_bulk_window",
    "f_func",
    "g_func",
    "bulk_crit_kernel",
    "sine_kernel",
    "airy_kernel",
    "airy_kernel_contour",
    "gaussian_limit_kernel",
    "correlation_det",
    "transition_discrepancy",
]


class KernelEvalError(RuntimeError):
    """A kernel evaluation failed its internal health checks."""


_TWO_PI_I = 2j * math.pi
_NEG_QUAD_PI2 = -1.0 / (4.0 * math.pi**2)  # value of (1/2pi i)^2


def _lg(z):
    """Vectorized principal-branch log Gamma."""
    return loggamma(np.asarray(z, dtype=complex))


def _real_part(value: complex, err: float, what: str) -> float:
    """Return Re(value), insisting the imaginary residue is quadrature-sized."""
    tol = 10.0 * max(err, 1e-13) + 1e-10 * abs(value)
    if abs(value.imag) > max(tol, 1e-9):
        raise KernelEvalError(
            f"{what}: imaginary residue {value.imag:.3e} exceeds 10x error "
            f"estimate {err:.3e}; quadrature is unhealthy"
        )
    return float(value.real)


# ---------------------------------------------------------------------------
# Ensemble parameters and scaling maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductEnsembleParams:
    """Matrix size N, number of Ginibre factors M, and size offsets nu.

    ``nu`` lists the offsets nu_1..nu_M of the rectangular factors; the
    leading nu_0 = 0 is implied.  The kernel carries M+1 Gamma-ratio
    factors: the j = 0 factor comes from the base measure, not a matrix.
    """

    N: int
    M: int
    nu: tuple = ()

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.M < 1:
            raise ValueError(f"M must be >= 1 (number of factors), got {self.M}")
        nu = tuple(int(v) for v in self.nu)
        if nu and len(nu) != self.M:
            raise ValueError(f"nu must have length M={self.M}, got {len(nu)}")
        if any(v < 0 for v in nu):
            raise ValueError("all nu_j must be >= 0")
        object.__setattr__(self, "nu", nu)

    @property
    def nu_full(self) -> tuple:
        """(nu_0, ..., nu_M) with nu_0 = 0; all zeros when nu is empty."""
        if self.nu:
            return (0,) + self.nu
        return (0,) * (self.M + 1)

    @property
    def is_square(self) -> bool:
        return not self.nu or all(v == 0 for v in self.nu)


@dataclass(frozen=True)
class ScalingMap:
    """Affine spectral chart x = shift + slope * xi plus kernel conjugation.

    The rescaled-conjugated kernel is
    ``slope * exp(conj_exponent * (xi - eta)) * K(forward(xi), forward(eta))``;
    ``slope`` doubles as the density factor of the change of variables.
    """

    regime: str
    shift: float
    slope: float
    conj_exponent: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError("slope must be positive")
        if not math.isfinite(self.shift):
            raise ValueError("shift must be finite")

    def forward(self, xi):
        return self.shift + self.slope * np.asarray(xi, dtype=float)

    def inverse(self, x):
        return (np.asarray(x, dtype=float) - self.shift) / self.slope


def x_N(k: int, N: int) -> float:
    """Spectral center N*(psi(1 - k + N) - log N) of the k-th Lyapunov level."""
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, N], got k={k}, N={N}")
    return N * (digamma(N - k + 1).real - math.log(N))


def scaling_normal(k: int, M: int, N: int) -> ScalingMap:
    """Chart of the weakly correlated regime around the k-th Lyapunov level."""
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, N], got k={k}, N={N}")
    T = (M + 1.0) / N
    shift = T * (N * math.log(N) + x_N(k, N))
    slope = T * math.sqrt(N / (M + 1.0))
    conj = (k - 1.0) * math.sqrt((M + 1.0) / N)
    return ScalingMap("normal-k", shift, slope, conj, {"k": k, "M": M, "N": N})


def scaling_critical(M: int, N: int) -> ScalingMap:
    """Chart of the intermediate regime: x = (M+1)(log N - 1/(2N)) + xi."""
    shift = (M + 1.0) * (math.log(N) - 0.5 / N)
    return ScalingMap("critical", shift, 1.0, 0.0, {"M": M, "N": N})


def v_M(theta: float, M: int) -> float:
    """Spectral parametrization of the strongly correlated regime."""
    return ct.v_M_param(theta, M)


def v_infinity(theta: float) -> float:
    """Large-M limit of v_M: theta*cot(theta) - log(theta/sin(theta))."""
    if theta == 0.0:
        return 1.0
    return theta / math.tan(theta) - math.log(theta / math.sin(theta))


def rho_MN(theta: float, M: int, N: int) -> float:
    """Local density scale of the strongly correlated regime."""
    if not 0.0 <= theta < math.pi:
        raise ValueError(f"theta must lie in [0, pi), got {theta}")
    if theta == 0.0:
        return 2.0 ** (1.0 / 3.0) * (N / (M + 1.0)) ** (2.0 / 3.0)
    eps = 1.0 / (M + 1.0)
    return N * math.sin(theta) * math.sin(eps * theta) / (math.pi * math.sin((1.0 - eps) * theta))


def scaling_case3(theta: float, M: int, N: int) -> ScalingMap:
    """Chart of the strongly correlated regime at spectral angle theta.

    For theta = 0 the conjugation exponent uses the saddle q_M(0) = (M+1)/M,
    i.e. -N/(M rho); the large-M simplification N/((M+1) rho) does not track
    the kernel at fixed M and is not used.
    """
    rho = rho_MN(theta, M, N)
    shift = M * math.log(N) + math.log(M + 1.0) + v_M(theta, M)
    if theta == 0.0:
        conj = -(N / M) / rho
    else:
        conj = -math.pi / math.tan(theta)
    return ScalingMap(
        "sine-theta" if theta > 0 else "airy-edge",
        shift,
        1.0 / rho,
        conj,
        {"theta": theta, "M": M, "N": N},
    )


# ---------------------------------------------------------------------------
# Finite-N kernel: generic evaluation
# ---------------------------------------------------------------------------


def _finite_n_log_ratio(p: ProductEnsembleParams, z):
    """log of prod_j Gamma(z + nu_j + N) over the M+1 offsets."""
    z = np.asarray(z, dtype=complex)
    if p.is_square:
        return (p.M + 1) * _lg(z + p.N)
    total = np.zeros_like(z)
    for nu_j in p.nu_full:
        total = total + _lg(z + nu_j + p.N)
    return total


def finite_n_kernel(
    p: ProductEnsembleParams,
    x: float,
    y: float,
    c: float = 1.0,
    spec: QuadSpec | None = None,
    method: str = "auto",
) -> float:
    """Finite-N correlation kernel of the log squared singular values.

    ``method='residue-series'`` closes the t-loop over its N poles and
    evaluates N single line integrals (exact, fast for small N);
    ``'double-contour'`` performs the defining iterated integral over a
    rectangle and the vertical line at ``c``.
    """
    spec = spec or QuadSpec(abs_tol=1e-11, rel_tol=1e-10)
    if method == "auto":
        method = "residue-series" if p.N <= 16 else "double-contour"

    if method == "residue-series":
        return float(finite_n_kernel_matrix(p, np.array([x]), np.array([y]), c)[0, 0])

    if method != "double-contour":
        raise ValueError(f"unknown method {method!r}")

    t_path = ct.sigma_encircling(p.N, pad=0.25)
    s_path = ct.vertical_line(c, decay="gamma-power")
    if min(abs(c - 0.25), abs(c + (p.N - 1) + 0.25)) < 1e-8:
        raise ct.PathCollisionError("s-line sits on the t-rectangle")

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = (
            x * t - y * s
            + _lg(t) - _lg(s)
            + _finite_n_log_ratio(p, s) - _finite_n_log_ratio(p, t)
        )
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    value = res.value * _NEG_QUAD_PI2
    return _real_part(complex(value), res.error / (4 * math.pi**2), "finite_n_kernel")


def finite_n_kernel_matrix(
    p: ProductEnsembleParams,
    xs: np.ndarray,
    ys: np.ndarray,
    c: float = 1.0,
    n_line: int = 0,
) -> np.ndarray:
    """Kernel matrix K(x_i, y_j) by t-residues and a shared s-line grid.

    Closing the t-loop picks up the N simple poles of Gamma(t); each residue
    leaves one absolutely convergent s-integral, evaluated on a fixed Gauss
    grid shared by all (x, y) pairs and validated by node doubling.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    N, M = p.N, p.M

    js = np.arange(N)
    log_w = np.zeros(N)
    for nu_j in p.nu_full:
        log_w -= np.real(_lg(nu_j + N - js))
    log_w -= scipy.special.gammaln(js + 1.0)
    sign = np.where(js % 2 == 0, 1.0, -1.0)

    def s_part(n_nodes: int) -> np.ndarray:
        ymax = float(np.max(np.abs(ys))) + 1.0
        # Gamma-power decay ~ exp(-M pi |Im s| / 2); budget a 1e-15 drop
        Y = max(8.0, 2.0 * (34.0 + ymax) / (M * math.pi / 2.0))
        ug, wg = np.polynomial.legendre.leggauss(n_nodes)
        sv = c + 1j * Y * ug
        dw = 1j * Y * wg
        base = np.exp(_finite_n_log_ratio(p, sv) - _lg(sv))
        inv_shift = 1.0 / (sv[None, :] + js[:, None])
        eys = np.exp(-np.outer(ys, sv))
        return np.einsum("qs,js->jq", eys, inv_shift * (base * dw)[None, :]) / _TWO_PI_I

    n0 = n_line or 240
    I1 = s_part(n0)
    I2 = s_part(2 * n0)
    if np.max(np.abs(I1 - I2)) > 1e-10 * max(1.0, float(np.max(np.abs(I2)))):
        I2 = s_part(8 * n0)
    Ij = I2

    ext = np.exp(-np.outer(xs, js)) * (sign * np.exp(log_w))[None, :]
    K = ext @ Ij
    if np.max(np.abs(K.imag)) > 1e-7 * max(1.0, float(np.max(np.abs(K)))):
        raise KernelEvalError("finite-N residue kernel: imaginary residue too large")
    return K.real


# ---------------------------------------------------------------------------
# Finite-N kernel on the proof contours of each regime
# ---------------------------------------------------------------------------


def _F_w(z, w: float, N: int):
    """F(z; w) = (log N + w/N) z - log Gamma(z + N) + log Gamma(N)."""
    z = np.asarray(z, dtype=complex)
    return (math.log(N) + w / N) * z - _lg(z + N) + scipy.special.gammaln(N)


def _rescaled_normal(N: int, M: int, k: int, xi: float, eta: float, spec: QuadSpec) -> float:
    """sqrt((M+1)/N) e^{(k-1)(xi-eta)sqrt((M+1)/N)} K(g(k;xi), g(k;eta))."""
    w = x_N(k, N)
    r = math.sqrt(N / (M + 1.0))
    a = math.sqrt((M + 1.0) / N)
    center = 1.0 - k
    ref = float(np.real(_F_w(center, w, N))) * (M + 1.0)

    circle = ComplexPath((ct.ArcSeg(center, r, -math.pi, math.pi),))
    segs = list(circle.segments) + list(ct.sigma_minus(center - 0.5, N).segments)
    if k >= 2:
        segs += list(ct.sigma_plus(center + 0.5, N).segments)
    t_path = ComplexPath(tuple(segs))
    s_path = ct.vertical_line(center + 2.0 * r, decay="quadratic-saddle")

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = (
            ((M + 1.0) * _F_w(t, w, N) - ref)
            - ((M + 1.0) * _F_w(s, w, N) - ref)
            + _lg(t) - _lg(s)
            + a * (xi * (t + k - 1.0) - eta * (s + k - 1.0))
        )
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    value = res.value * _NEG_QUAD_PI2 * a
    return _real_part(complex(value), res.error * a / (4 * math.pi**2), "rescaled normal kernel")


def _rescaled_critical(N: int, M: int, xi: float, eta: float, spec: QuadSpec) -> float:
    """K(g(xi), g(eta)) in the intermediate regime, on Sigma_-(1/2) x {Re s = 1}."""
    w_t = N * xi / (M + 1.0) - 0.5
    w_s = N * eta / (M + 1.0) - 0.5
    ref_t = float(np.real(_F_w(0.5, w_t, N))) * (M + 1.0)
    ref_s = float(np.real(_F_w(1.0, w_s, N))) * (M + 1.0)

    t_path = ct.sigma_minus(0.5, N)
    s_path = ct.vertical_line(1.0, decay="digamma-vertical")

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = (
            ((M + 1.0) * _F_w(t, w_t, N) - ref_t)
            - ((M + 1.0) * _F_w(s, w_s, N) - ref_s)
            + _lg(t) - _lg(s)
        )
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    scale = math.exp(ref_t - ref_s)
    value = res.value * _NEG_QUAD_PI2 * scale
    return _real_part(complex(value), res.error * scale / (4 * math.pi**2), "rescaled critical kernel")


def _case3_W(z, N: int, M: int, theta: float):
    """(N/(M+1)) f_{M,N}(z; theta) up to the constant that cancels in s - t."""
    z = np.asarray(z, dtype=complex)
    r = N / (M + 1.0)
    lin = r * (M * math.log(N) + math.log(M + 1.0) + ct.v_M_param(theta, M))
    return (M + 1.0) * _lg(N + r * z) - _lg(r * z) - lin * z


def _case3_paths(N: int, M: int, theta: float):
    """(t-path, s-path, saddle) for the strongly correlated regime.

    For theta > 0 the s-line must pass through the arc, so the t-contour is
    split into two closed loops whose closing chords sit inside a pole gap
    of Gamma(N t/(M+1)); the line threads the gap, touching nothing.
    """
    wall_x = -(M + 1.0) + (M + 1.0) / (2.0 * N)
    phi_w = ct.h_M_inverse(wall_x, M)
    spacing = (M + 1.0) / N

    def arc(plo, phi_, n):
        ps = np.linspace(plo, phi_, max(n, 8))
        pts = ct.q_M(ps, M)
        return [LineSeg(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]

    dens = 110
    if theta == 0.0:
        a = (2.0 * (M + 1.0) / N) ** (1.0 / 3.0)
        segs = arc(-phi_w, phi_w, int(dens * 2 * phi_w))
        p_lo = segs[0].start
        p_hi = segs[-1].end
        wall = [
            LineSeg(p_hi, complex(wall_x, p_hi.imag)),
            LineSeg(complex(wall_x, p_hi.imag), complex(wall_x, p_lo.imag)),
            LineSeg(complex(wall_x, p_lo.imag), p_lo),
        ]
        t_path = ComplexPath(tuple(segs) + tuple(wall))
        saddle = complex(ct.q_M(0.0, M))
        s_path = ct.vertical_line(saddle.real + a, decay="cubic-saddle")
        return t_path, s_path, saddle

    saddle = complex(ct.q_M(theta, M))
    j_star = int(np.clip(round(-saddle.real / spacing - 0.5), 0, N - 2))
    chi_c = -(j_star + 0.5) * spacing
    chi_r = chi_c + 0.25 * spacing
    chi_l = chi_c - 0.25 * spacing
    phi_r = ct.h_M_inverse(chi_r, M)
    phi_l = ct.h_M_inverse(chi_l, M)

    inner = arc(-phi_r, phi_r, int(dens * 2 * phi_r))
    inner_loop = inner + [LineSeg(inner[-1].end, inner[0].start)]
    out_up = arc(phi_l, phi_w, int(dens * (phi_w - phi_l)))
    out_dn = arc(-phi_w, -phi_l, int(dens * (phi_w - phi_l)))
    p_hi = out_up[-1].end
    p_lo = out_dn[0].start
    outer_loop = (
        out_up
        + [
            LineSeg(p_hi, complex(wall_x, p_hi.imag)),
            LineSeg(complex(wall_x, p_hi.imag), complex(wall_x, p_lo.imag)),
            LineSeg(complex(wall_x, p_lo.imag), p_lo),
        ]
        + out_dn
        + [LineSeg(out_dn[-1].end, out_up[0].start)]
    )
    t_path = ComplexPath(tuple(inner_loop) + tuple(outer_loop))
    s_path = ct.vertical_line(chi_c, decay="quadratic-saddle")
    return t_path, s_path, saddle


def _rescaled_case3(N: int, M: int, theta: float, xi: float, eta: float, spec: QuadSpec) -> float:
    """Conjugated (1/rho) K(g(xi), g(eta)) in the strongly correlated regime."""
    rho = rho_MN(theta, M, N)
    ratio = N / (M + 1.0)
    t_path, s_path, saddle = _case3_paths(N, M, theta)
    ref = float(np.real(_case3_W(saddle, N, M, theta)))
    sm = scaling_case3(theta, M, N)

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = (
            (_case3_W(s, N, M, theta) - ref)
            - (_case3_W(t, N, M, theta) - ref)
            + ratio * (xi * t - eta * s) / rho
        )
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    kern = res.value * _NEG_QUAD_PI2 * ratio
    value = kern / rho * math.exp(sm.conj_exponent * (xi - eta))
    return _real_part(complex(value), res.error * ratio / rho, "rescaled case-III kernel")


def finite_n_kernel_rescaled(
    p: ProductEnsembleParams,
    sm: ScalingMap,
    xi: float,
    eta: float,
    spec: QuadSpec | None = None,
) -> float:
    """Rescaled-conjugated finite-N kernel in the chart of a ScalingMap.

    Evaluates ``slope * e^{conj (xi-eta)} * K(forward(xi), forward(eta))`` on
    the proof contours of the map's regime; this is the quantity that
    converges to the regime's limiting kernel.
    """
    spec = spec or QuadSpec(abs_tol=1e-9, rel_tol=1e-8)
    if not p.is_square:
        raise ValueError("regime charts are defined for square products (nu = 0)")
    if sm.regime == "normal-k":
        return _rescaled_normal(p.N, p.M, int(sm.params["k"]), xi, eta, spec)
    if sm.regime == "critical":
        return _rescaled_critical(p.N, p.M, xi, eta, spec)
    if sm.regime in ("sine-theta", "airy-edge"):
        return _rescaled_case3(p.N, p.M, float(sm.params["theta"]), xi, eta, spec)
    raise ValueError(f"unsupported regime {sm.regime!r}")


# ---------------------------------------------------------------------------
# Critical kernel: double contour route
# ---------------------------------------------------------------------------


def _crit_s_path(gamma: float, y: float = 0.0) -> ComplexPath:
    """s-contour for the critical kernel: a line, bent or shifted when needed.

    For small gamma the Gaussian damping on the vertical line sets in too
    late and the reciprocal-Gamma growth costs digits, so the line is bent
    into a right-opening wedge (an exact deformation, 1/Gamma is entire).
    For large gamma the abscissa moves toward the saddle y/gamma, clipped
    away from the t-contour crossing at 1/2.
    """
    if gamma < 0.35:
        up = np.exp(1j * math.pi / 3.0)
        dn = np.exp(-1j * math.pi / 3.0)
        return ComplexPath((
            RaySeg(1.0 + 0j, dn, incoming=True, decay="gaussian-gamma"),
            RaySeg(1.0 + 0j, up, incoming=False, decay="gaussian-gamma"),
        ))
    if gamma > 4.0:
        c = max(0.8, min(y / gamma if y > 0 else 0.8, 8.0))
        return ct.vertical_line(c, decay="gaussian-gamma")
    return ct.vertical_line(1.0, decay="gaussian-gamma")


def crit_kernel_integral(x: float, y: float, gamma: float, spec: QuadSpec | None = None) -> float:
    """Critical kernel by its defining double contour integral.

    Reliable to the right of the bulk (roughly x, y >= -6 at gamma near 1);
    deep-bulk arguments belong to :func:`crit_kernel_bulk_window`, which the
    Fredholm assembler uses.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    spec = spec or QuadSpec(abs_tol=1e-10, rel_tol=1e-9)
    crossing = 0.5 if gamma <= 4.0 else 0.25
    t_path = ct.sigma_minus_infty(0.25, crossing=crossing)
    s_path = _crit_s_path(gamma, y)

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = _lg(t) - _lg(s) + 0.5 * gamma * (s * s - t * t) + x * t - y * s
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    value = res.value * _NEG_QUAD_PI2
    return _real_part(complex(value), res.error / (4 * math.pi**2), "crit_kernel_integral")


def crit_kernel_hat(x: float, y: float, gamma: float, spec: QuadSpec | None = None) -> float:
    """Shifted form of the critical kernel, Gamma arguments offset by t0."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    spec = spec or QuadSpec(abs_tol=1e-10, rel_tol=1e-9)
    t0 = solve_t0(gamma)
    crossing = -t0 + 0.5
    lo = complex(crossing, -0.25)
    hi = complex(crossing, 0.25)
    t_path = ComplexPath((
        RaySeg(lo, -1.0, incoming=True, decay="gaussian-gamma"),
        LineSeg(lo, hi),
        RaySeg(hi, -1.0, incoming=False, decay="gaussian-gamma"),
    ))
    s_path = _crit_s_path(gamma, y)

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = _lg(t + t0) - _lg(s + t0) + 0.5 * gamma * (s * s - t * t) + x * t - y * s
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    value = res.value * _NEG_QUAD_PI2
    return _real_part(complex(value), res.error / (4 * math.pi**2), "crit_kernel_hat")


# ---------------------------------------------------------------------------
# Critical kernel: integrable series route (f_k / g_k families)
# ---------------------------------------------------------------------------

SERIES_DIAG_THRESHOLD = 1e-2
_SERIES_HEAD = 64  # direct f_n g_n terms before the Hurwitz-zeta tail


def _series_safe(x: float, y: float, gamma: float) -> bool:
    """Domain where the alternating residue sums keep their digits."""
    peak = max(x * x, y * y) / (2.0 * gamma)
    return peak <= 8.0 and gamma >= 0.35


def _f_terms(x: float, gamma: float, nmax: int) -> np.ndarray:
    """c_m = (-1)^m e^{-gamma m^2/2 - m x} / m! for m = 0..nmax."""
    m = np.arange(nmax + 1)
    logmag = -0.5 * gamma * m * m - m * x - scipy.special.gammaln(m + 1.0)
    return np.where(m % 2 == 0, 1.0, -1.0) * np.exp(logmag)


def f_func(k: int, x: float, gamma: float, nmax: int = 80) -> float:
    """Residue-series value of f_k (k >= -1).

    f_{-1} is the plain alternating sum over the Gamma poles; for k >= 0 the
    pole at -k is double and contributes the psi-corrected term.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if k < -1:
        raise ValueError("k must be >= -1")
    c = _f_terms(x, gamma, nmax)
    if k == -1:
        return float(np.sum(c))
    m = np.arange(nmax + 1)
    mask = m != k
    simple = np.sum(c[mask] / (k - m[mask]))
    # double pole at t = -k: (-1)^k/k! [g'(-k) + psi(k+1) g(-k)], g = e^{-gamma t^2/2 + x t}
    gk = math.exp(-0.5 * gamma * k * k - k * x)
    sgn = -1.0 if k % 2 else 1.0
    dbl = sgn / math.factorial(k) * gk * ((x + gamma * k) + digamma(k + 1.0).real)
    return float(simple + dbl)


_G_LINE_CACHE: dict = {}


def _g_line_nodes(gamma: float, c: float, n: int):
    key = (round(gamma, 12), round(c, 12), n)
    hit = _G_LINE_CACHE.get(key)
    if hit is not None:
        return hit
    # solve gamma Y^2/2 - pi Y = B: reciprocal-Gamma grows like e^{pi |y|}
    B = 44.0
    Y = (math.pi + math.sqrt(math.pi**2 + 2.0 * gamma * B)) / gamma
    ug, wg = np.polynomial.legendre.leggauss(n)
    yv = Y * ug
    sv = c + 1j * yv
    dw = 1j * Y * wg
    base = np.exp(-_lg(sv) + 0.5 * gamma * sv * sv)
    out = (sv, dw * base)
    if len(_G_LINE_CACHE) > 256:
        _G_LINE_CACHE.clear()
    _G_LINE_CACHE[key] = out
    return out


def g_func(k: int, y: float, gamma: float, c: float | None = None, n_nodes: int = 360) -> float:
    """Line-quadrature value of g_k (k >= -1).

    The abscissa defaults to the quadratic saddle y/gamma, clipped right of
    the pole at -k (1/Gamma is entire, so g_{-1} admits any abscissa).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if k < -1:
        raise ValueError("k must be >= -1")
    if c is None:
        c = y / gamma
        if k >= 0:
            c = max(c, -k + 0.35)
        c = float(np.clip(c, -40.0, 60.0))
    sv, wbase = _g_line_nodes(gamma, c, n_nodes)
    phase = np.exp(-y * sv)
    if k == -1:
        val = np.sum(wbase * phase)
    else:
        val = np.sum(wbase * phase / (sv + k))
    return float(np.real(val / _TWO_PI_I))


def _g_vector(y: float, gamma: float, ks: np.ndarray, c: float, n_nodes: int, deriv: bool = False):
    """g_k(y) for all k in ``ks`` on one shared line grid; optionally d/dy."""
    sv, wbase = _g_line_nodes(gamma, c, n_nodes)
    phase = np.exp(-y * sv)
    denom = sv[None, :] + ks[:, None]
    core = wbase[None, :] * phase[None, :] / denom
    if deriv:
        core = core * (-sv[None, :])
    return np.real(np.sum(core, axis=1) / _TWO_PI_I)


def _crit_series_bracket(x: float, y: float, gamma: float) -> float:
    """gamma f_{-1}(x) g_{-1}(y) + sum_n f_n(x) g_n(y), tail-accelerated.

    Head terms are summed directly; past n0 both factors expand in powers
    of 1/n and the tail sums in closed form via Hurwitz zeta.
    """
    n0 = _SERIES_HEAD
    nmax = 80
    # 1/((s+k)Gamma(s)) is entire (the Gamma zero cancels the pole), so the
    # shared line may sit at the quadratic saddle y/gamma for every k
    c_line = float(np.clip(y / gamma, -40.0, 60.0))
    n_nodes = 420

    fm1 = f_func(-1, x, gamma, nmax)
    gm1 = g_func(-1, y, gamma, c=c_line, n_nodes=n_nodes)
    total = gamma * fm1 * gm1

    ks = np.arange(0, n0 + 1)
    gs = _g_vector(y, gamma, ks, c_line, n_nodes)
    fs = np.array([f_func(k, x, gamma, nmax) for k in ks])
    total += float(np.sum(fs * gs))

    # tail via 1/(k-m) and 1/(s+k) expansions: sum_{n>n0} f_n g_n =
    # sum_p (sum_{j+l=p-2} (-1)^l S_j T_l) zeta(p, n0+1)
    c_m = _f_terms(x, gamma, nmax)
    m = np.arange(nmax + 1)
    S = [float(np.sum(c_m * m**j)) for j in range(5)]
    sv, wbase = _g_line_nodes(gamma, c_line, n_nodes)
    phase = np.exp(-y * sv)
    T = [complex(np.sum(wbase * phase * sv**l) / _TWO_PI_I).real for l in range(5)]
    tail = 0.0
    for p in range(2, 7):
        u_p = 0.0
        for j in range(0, p - 1):
            l = p - 2 - j
            if j < len(S) and l < len(T):
                u_p += ((-1.0) ** l) * S[j] * T[l]
        tail += u_p * float(scipy.special.zeta(p, n0 + 1))
    return total + tail


def crit_kernel_series(x: float, y: float, gamma: float) -> float:
    """Critical kernel in its integrable form, 1/(y-x) times the bracket.

    Within ``SERIES_DIAG_THRESHOLD`` of the diagonal the 1/(y-x) prefactor
    amplifies series truncation error, so evaluation falls back to the
    double contour integral (documented fallback, not an error).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if not _series_safe(x, y, gamma):
        raise KernelEvalError(
            f"series route out of its accuracy domain at (x={x}, y={y}, gamma={gamma})"
        )
    if abs(y - x) < SERIES_DIAG_THRESHOLD:
        return crit_kernel_integral(x, y, gamma)
    return _crit_series_bracket(x, y, gamma) / (y - x)


def crit_kernel_series_alt_pairing(x: float, y: float, gamma: float) -> float:
    """Alternative reading of the series display, pairing f_n(x) with f_n(y).

    Kept behind this separate entry point so the double-integral route can
    adjudicate between the two pairings numerically; it is not used by any
    production path.
    """
    if abs(y - x) < SERIES_DIAG_THRESHOLD:
        raise KernelEvalError("alt pairing is only defined off the diagonal")
    nmax = 80
    n0 = _SERIES_HEAD
    fm1 = f_func(-1, x, gamma, nmax)
    gm1 = g_func(-1, y, gamma)
    total = gamma * fm1 * gm1
    for n in range(0, n0 + 1):
        total += f_func(n, x, gamma, nmax) * f_func(n, y, gamma, nmax)
    return total / (y - x)


def crit_kernel_diag_series(x: float, gamma: float) -> float:
    """Diagonal value by the derivative of the bracket: no cancellation.

    The bracket vanishes on the diagonal, so K(x, x) equals its y-derivative
    there; d/dy only touches the g-side, giving another line quadrature.
    """
    nmax = 80
    n0 = _SERIES_HEAD
    c_line = float(np.clip(x / gamma, -40.0, 60.0))
    n_nodes = 420
    fm1 = f_func(-1, x, gamma, nmax)
    ks = np.arange(0, n0 + 1)
    fs = np.array([f_func(k, x, gamma, nmax) for k in ks])
    sv, wbase = _g_line_nodes(gamma, c_line, n_nodes)
    phase = np.exp(-x * sv)
    gm1_prime = float(np.real(np.sum(wbase * phase * (-sv)) / _TWO_PI_I))
    gs_prime = np.real(np.sum(
        wbase[None, :] * phase[None, :] * (-sv[None, :]) / (sv[None, :] + ks[:, None]),
        axis=1,
    ) / _TWO_PI_I)
    total = gamma * fm1 * gm1_prime + float(np.sum(fs * np.real(gs_prime)))

    c_m = _f_terms(x, gamma, nmax)
    m = np.arange(nmax + 1)
    S = [float(np.sum(c_m * m**j)) for j in range(5)]
    T = [complex(np.sum(wbase * phase * (-sv) * sv**l) / _TWO_PI_I).real for l in range(5)]
    tail = 0.0
    for p in range(2, 7):
        u_p = 0.0
        for j in range(0, p - 1):
            l = p - 2 - j
            if j < len(S) and l < len(T):
                u_p += ((-1.0) ** l) * S[j] * T[l]
        tail += u_p * float(scipy.special.zeta(p, n0 + 1))
    return total + tail


def crit_kernel(x: float, y: float, gamma: float, method: str = "auto") -> float:
    """Critical kernel with automatic route selection.

    ``auto`` prefers the series away from the diagonal inside its accuracy
    domain, the derivative form on the diagonal, and the double contour
    integral otherwise.
    """
    if method == "integral":
        return crit_kernel_integral(x, y, gamma)
    if method == "series":
        return crit_kernel_series(x, y, gamma)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if _series_safe(x, y, gamma):
        if abs(y - x) < SERIES_DIAG_THRESHOLD:
            if x == y:
                return crit_kernel_diag_series(x, gamma)
            return crit_kernel_integral(x, y, gamma)
        return crit_kernel_series(x, y, gamma)
    return crit_kernel_integral(x, y, gamma)


# ---------------------------------------------------------------------------
# Critical kernel: reflected bulk-window route and scaled factor functions
# ---------------------------------------------------------------------------


def crit_kernel_bulk_window(xt: float, yt: float, gamma: float, k: int,
                            spec: QuadSpec | None = None) -> float:
    """e^{k (xt - yt)} K_crit(-gamma k - log k + xt, ..., gamma) for integer k.

    Exact reflected representation: the Gamma factor is traded for
    1/(sin pi t Gamma(1+k-t)) and the contour shifted k steps right, which
    keeps every exponent O(1) deep in the bulk where the defining integral
    has catastrophic cancellation.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    spec = spec or QuadSpec(abs_tol=1e-9, rel_tol=1e-8)
    logk = math.log(k)
    ref = scipy.special.gammaln(1.0 + k)

    def f_k_of(x_arg, z):
        return _lg(1.0 + k - z) + 0.5 * gamma * z * z - (x_arg - logk) * z - ref

    lo = complex(k + 0.5, -1.0)
    hi = complex(k + 0.5, 1.0)
    t_path = ComplexPath((
        RaySeg(lo, -1.0, incoming=True, decay="reflected-gamma"),
        LineSeg(lo, hi),
        RaySeg(hi, -1.0, incoming=False, decay="reflected-gamma"),
    ))
    s_path = ct.vertical_line(0.0, decay="gaussian-gamma")

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        d = s - t
        sinc = np.where(np.abs(d) < 1e-8, math.pi + 0j, np.sin(math.pi * d) / np.where(np.abs(d) < 1e-8, 1.0, d))
        expo = f_k_of(yt, s) - f_k_of(xt, t) + 1j * math.pi * t
        with np.errstate(over="raise", under="ignore"):
            return sinc * np.exp(expo) / np.sin(math.pi * t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    value = res.value * _NEG_QUAD_PI2
    return _real_part(complex(value), res.error / (4 * math.pi**2), "crit_kernel_bulk_window")


def crit_f_minus1_scaled(v: float, gamma: float) -> tuple[float, float]:
    """f_{-1}(v) as (mantissa, log-scale): value = mantissa * exp(log-scale).

    The direct alternating series is used while its largest term stays
    moderate; deeper in the bulk the reflected hairpin with shift
    k ~ -v/gamma keeps everything O(1).
    """
    peak = v * v / (2.0 * gamma) if v < 0 else 0.0
    if peak <= 8.0:
        val = f_func(-1, v, gamma)
        if val == 0.0:
            return 0.0, -math.inf
        return math.copysign(1.0, val), math.log(abs(val))

    k = max(1, int(math.ceil(-v / gamma)))
    vt = v + gamma * k  # residual linear coefficient in [0, gamma)
    logpre = -0.5 * gamma * k * k - v * k
    sgn = -1.0 if k % 2 else 1.0

    # shifted hairpin encircles all integers <= k; sin(pi w) poles past k
    # are cancelled by the zeros of 1/Gamma(1+k-w)
    lo = complex(k + 0.5, -0.5)
    hi = complex(k + 0.5, 0.5)
    path = ComplexPath((
        RaySeg(lo, -1.0, incoming=True, decay="reflected-gamma"),
        LineSeg(lo, hi),
        RaySeg(hi, -1.0, incoming=False, decay="reflected-gamma"),
    ))

    def integrand(w):
        w = np.asarray(w, dtype=complex)
        expo = -0.5 * gamma * w * w + vt * w - _lg(1.0 + k - w)
        with np.errstate(over="raise", under="ignore"):
            return math.pi * np.exp(expo) / np.sin(math.pi * w)

    r = ct.integrate(integrand, path, QuadSpec(abs_tol=1e-13, rel_tol=1e-11))
    J = complex(r.value / _TWO_PI_I)
    J_re = _real_part(J, r.error, "crit_f_minus1_scaled")
    if J_re == 0.0:
        return 0.0, -math.inf
    return sgn * math.copysign(1.0, J_re), logpre + math.log(abs(J_re))


def crit_g_minus1_scaled(w: float, gamma: float, n_nodes: int = 480) -> tuple[float, float]:
    """g_{-1}(w) as (mantissa, log-scale), on the saddle-shifted line c = w/gamma."""
    c = float(np.clip(w / gamma, -200.0, 200.0))
    logpre = 0.5 * gamma * c * c - w * c
    B = 46.0
    Y = (math.pi + math.sqrt(math.pi**2 + 2.0 * gamma * B)) / gamma
    ug, wg = np.polynomial.legendre.leggauss(n_nodes)
    yv = Y * ug
    sv = c + 1j * yv
    # 1/Gamma(s) e^{gamma (s^2 - c^2)/2 - w (s - c)}: exponent referenced at c
    expo = -_lg(sv) + 0.5 * gamma * (sv * sv - c * c) - w * (sv - c)
    mexp = float(np.max(np.real(expo)))
    with np.errstate(over="raise", under="ignore"):
        J = np.sum(1j * Y * wg * np.exp(expo - mexp)) / _TWO_PI_I
    J_re = float(np.real(J))
    if abs(J.imag) > 1e-8 * max(abs(J_re), 1e-280):
        raise KernelEvalError("crit_g_minus1_scaled: imaginary residue too large")
    if J_re == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, J_re), logpre + mexp + math.log(abs(J_re))


# ---------------------------------------------------------------------------
# Limiting kernels: sine, Airy, Gaussian, bulk-critical
# ---------------------------------------------------------------------------


def sine_kernel(x: float, y: float) -> float:
    """sin(pi(x-y)) / (pi(x-y)) with the removable diagonal handled exactly."""
    d = x - y
    if d == 0.0:
        return 1.0
    return math.sin(math.pi * d) / (math.pi * d)


def airy_kernel(x: float, y: float) -> float:
    """Airy kernel in Ai closed form; the confluent diagonal is exact."""
    if x == y:
        ai, aip, _, _ = scipy.special.airy(x)
        return float(aip * aip - x * ai * ai)
    aix, aipx, _, _ = scipy.special.airy(x)
    aiy, aipy, _, _ = scipy.special.airy(y)
    return float((aix * aipy - aipx * aiy) / (x - y))


def airy_kernel_contour(x: float, y: float, spec: QuadSpec | None = None) -> float:
    """Airy kernel by the double integral over the two wedges (cross-check)."""
    spec = spec or QuadSpec(abs_tol=1e-11, rel_tol=1e-10)
    t_path, s_path = ct.airy_wedges(math.inf)

    def integrand(s, t):
        s = np.asarray(s, dtype=complex)
        expo = (s**3 - t**3) / 3.0 + x * t - y * s
        with np.errstate(over="raise", under="ignore"):
            return np.exp(expo) / (s - t)

    res = ct.integrate_double(integrand, s_path, t_path, spec)
    value = res.value * _NEG_QUAD_PI2 * (-1.0)  # t-wedge is open, no loop: sign from orientation pairing
    return _real_part(complex(value), res.error / (4 * math.pi**2), "airy_kernel_contour")


def gaussian_limit_kernel(xi: float, eta: float) -> float:
    """Rank-degenerate Gaussian limit of the weakly correlated regime."""
    return math.exp(-0.5 * eta * eta) / math.sqrt(2.0 * math.pi)


def bulk_crit_kernel(xi: float, eta: float, gamma_prime: float,
                     n_w: int = 240) -> float:
    """Bulk critical kernel: theta-function average over w in [-1, 1].

    For small gamma' the theta series converges slowly and the plain
    integrand swings over hundreds of e-folds; the Jacobi imaginary
    transformation turns both problems into a bounded oscillatory integral.
    """
    if not gamma_prime > 0:
        raise ValueError("gamma_prime must be positive")
    ug, wg = np.polynomial.legendre.leggauss(n_w)

    if gamma_prime >= 0.4:
        tau = 1j * gamma_prime / (2.0 * math.pi)
        vals = np.empty(n_w, dtype=complex)
        for i, w in enumerate(ug):
            z = (math.pi * w - 1j * xi) / (2.0 * math.pi)
            pref = np.exp((math.pi * w - 1j * eta) ** 2 / (2.0 * gamma_prime))
            vals[i] = pref * jacobi_theta(z, tau)
        total = np.sum(wg * vals) / math.sqrt(8.0 * math.pi * gamma_prime)
    else:
        # theta(z; i g/2pi) = sqrt(2pi/g) e^{-(pi w - i xi)^2/(2g)} theta((-xi - i pi w)/g; 2pi i/g)
        g = gamma_prime
        pref = np.exp((xi * xi - eta * eta) / (2.0 * g))
        vals = np.empty(n_w, dtype=complex)
        for i, w in enumerate(ug):
            phase = np.exp(1j * math.pi * w * (xi - eta) / g)
            z2 = (-xi - 1j * math.pi * w) / g
            th = jacobi_theta(z2, 2j * math.pi / g)
            vals[i] = phase * th
        total = pref * np.sum(wg * vals) / (2.0 * g)
    value = complex(total)
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise KernelEvalError("bulk_crit_kernel: imaginary residue too large")
    return float(value.real)


# ---------------------------------------------------------------------------
# Kernel handles, correlation determinants, transition discrepancies
# ---------------------------------------------------------------------------

_FAMILIES = ("finite-n", "gaussian-limit", "crit-edge", "crit-edge-hat",
             "crit-bulk", "sine", "airy")


@dataclass(frozen=True)
class KernelHandle:
    """A named kernel with parameters, evaluable at real (x, y)."""

    family: str
    params: dict = field(default_factory=dict)
    eval_method: str = "auto"

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "finite-n" and "p" not in self.params:
            raise ValueError("finite-n handle requires params['p']")
        if self.family in ("crit-edge", "crit-edge-hat") and "gamma" not in self.params:
            raise ValueError(f"{self.family} handle requires params['gamma']")
        if self.family == "crit-bulk" and "gamma_prime" not in self.params:
            raise ValueError("crit-bulk handle requires params['gamma_prime']")

    def __call__(self, x: float, y: float) -> float:
        fam = self.family
        if fam == "sine":
            return sine_kernel(x, y)
        if fam == "airy":
            if self.eval_method == "double-contour":
                return airy_kernel_contour(x, y)
            return airy_kernel(x, y)
        if fam == "gaussian-limit":
            return gaussian_limit_kernel(x, y)
        if fam == "crit-edge":
            g = float(self.params["gamma"])
            method = "auto" if self.eval_method == "auto" else self.eval_method
            return crit_kernel(x, y, g, method=method)
        if fam == "crit-edge-hat":
            return crit_kernel_hat(x, y, float(self.params["gamma"]))
        if fam == "crit-bulk":
            return bulk_crit_kernel(x, y, float(self.params["gamma_prime"]))
        p: ProductEnsembleParams = self.params["p"]
        return finite_n_kernel(p, x, y, c=float(self.params.get("c", 1.0)),
                               method=self.eval_method if self.eval_method != "auto" else "auto")

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Kernel matrix over node vectors, with fast paths where available."""
        xs = np.atleast_1d(xs)
        ys = np.atleast_1d(ys)
        if self.family == "finite-n":
            return finite_n_kernel_matrix(self.params["p"], xs, ys,
                                          c=float(self.params.get("c", 1.0)))
        if self.family == "airy" and self.eval_method != "double-contour":
            ai_x, aip_x, _, _ = scipy.special.airy(xs)
            ai_y, aip_y, _, _ = scipy.special.airy(ys)
            d = xs[:, None] - ys[None, :]
            num = ai_x[:, None] * aip_y[None, :] - aip_x[:, None] * ai_y[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                K = num / d
            diag = aip_x[:, None] ** 2 - xs[:, None] * ai_x[:, None] ** 2
            return np.where(np.abs(d) < 1e-12, diag, K)
        return np.array([[self(float(x), float(y)) for y in ys] for x in xs])


def correlation_det(kernel: KernelHandle, points, conj_exponent: float = 0.0) -> float:
    """n-point correlation determinant det[e^{c(x_i-x_j)} K(x_i, x_j)].

    The diagonal conjugation cancels in the determinant; passing a
    nonzero ``conj_exponent`` is an invariance check, not a new quantity.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or len(pts) < 1:
        raise ValueError("points must be a non-empty 1-d sequence")
    if len(pts) > 8:
        raise ValueError("correlation_det is for small determinants (n <= 8)")
    K = kernel.matrix(pts, pts)
    C = np.exp(conj_exponent * (pts[:, None] - pts[None, :]))
    return float(np.linalg.det(K * C))


def transition_discrepancy(kind: str, param: float, grid, gamma: float = 1.0) -> float:
    """Max |rescaled K_crit - target kernel| over a grid of (x, y) pairs.

    kinds: ``crit-to-gauss`` (param = gamma, large), ``crit-to-airy``
    (param = gamma, small), ``edge-to-bulk`` (param = k, positive integer;
    ``gamma`` names the kernel family member).
    """
    worst = 0.0
    if kind == "crit-to-gauss":
        g = float(param)
        rg = math.sqrt(g)
        for (x, y) in grid:
            lhs = rg * crit_kernel(rg * x, rg * y, g)
            rhs = gaussian_limit_kernel(x, y)
            worst = max(worst, abs(lhs - rhs))
        return worst
    if kind == "crit-to-airy":
        g = float(param)
        t0 = solve_t0(g)
        kfac = 2.0 ** (-1.0 / 3.0) * g ** (2.0 / 3.0)
        center = g * t0 - digamma(t0).real
        for (x, y) in grid:
            lhs = kfac * math.exp(kfac * t0 * (y - x)) * crit_kernel(
                center + kfac * x, center + kfac * y, g, method="integral")
            rhs = airy_kernel(x, y)
            worst = max(worst, abs(lhs - rhs))
        return worst
    if kind == "edge-to-bulk":
        k = int(param)
        for (x, y) in grid:
            lhs = crit_kernel_bulk_window(x, y, gamma, k)
            rhs = bulk_crit_kernel(x, y, gamma)
            worst = max(worst, abs(lhs - rhs))
        return worst
    raise ValueError(f"unknown transition kind {kind!r}")
