"""Integration contours in the complex plane and adaptive quadrature along them.

Paths are immutable chains of line segments, truncatable rays, and circular
arcs.  The builders construct the specific contours used by the kernel
evaluators: a rectangle around the Gamma poles ``0, -1, ..., -N+1``, the
five-piece loops around subsets of those poles, the open hairpin around all
of ``0, -1, -2, ...`` used by the critical kernel, the Airy wedges, and the
steepest-descent arc ``q_M(phi)`` for the strongly correlated regime.

Integrands passed to :func:`integrate` must accept numpy arrays of complex
nodes and return arrays (use :func:`vectorize_integrand` for plain scalar
callables).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .specfun import digamma

__all__ = [
    "LineSeg",
    "ArcSeg",
    "RaySeg",
    "ComplexPath",
    "QuadSpec",
    "QuadResult",
    "PathCollisionError",
    "QuadratureError",
    "vectorize_integrand",
    "integrate",
    "integrate_double",
    "fixed_path_nodes",
    "sigma_encircling",
    "sigma_minus",
    "sigma_plus",
    "sigma_minus_infty",
    "airy_wedges",
    "q_M",
    "h_M",
    "h_M_inverse",
    "v_M_param",
    "steepest_path_case3",
    "vertical_line",
]


class PathCollisionError(ValueError):
    """Raised when the s- and t-contours of a double integral nearly touch."""


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement fails to converge within budget."""


# ---------------------------------------------------------------------------
# Segments and paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineSeg:
    start: complex
    end: complex

    def at(self, u):
        return self.start + (self.end - self.start) * u

    def deriv(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.end - self.start, dtype=complex)

    @property
    def endpoint(self) -> complex:
        return self.end

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class ArcSeg:
    center: complex
    radius: float
    ang0: float
    ang1: float

    def at(self, u):
        ang = self.ang0 + (self.ang1 - self.ang0) * np.asarray(u)
        return self.center + self.radius * np.exp(1j * ang)

    def deriv(self, u):
        ang = self.ang0 + (self.ang1 - self.ang0) * np.asarray(u)
        return 1j * self.radius * (self.ang1 - self.ang0) * np.exp(1j * ang)

    @property
    def start(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.ang0)

    @property
    def endpoint(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.ang1)

    @property
    def length(self) -> float:
        return self.radius * abs(self.ang1 - self.ang0)


@dataclass(frozen=True)
class RaySeg:
    """Half-infinite ray anchored at a finite point.

    ``incoming`` rays are traversed from infinity toward the anchor.  The
    ``decay`` string is a certificate naming why integrands assigned to this
    path die off along the ray (e.g. gamma-function or Gaussian damping); it
    is bookkeeping for path JSON dumps, not used numerically.
    """

    anchor: complex
    direction: complex
    incoming: bool = False
    decay: str = "exponential"
    suggested_length: float = 40.0

    def __post_init__(self):
        d = complex(self.direction)
        if d == 0:
            raise ValueError("ray direction must be nonzero")
        object.__setattr__(self, "direction", d / abs(d))

    def point(self, r):
        return self.anchor + self.direction * np.asarray(r)

    @property
    def start(self) -> complex:
        return self.anchor

    @property
    def endpoint(self) -> complex:
        return self.anchor


@dataclass(frozen=True)
class ComplexPath:
    segments: tuple
    orientation: int = +1

    def __post_init__(self):
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def is_closed(self) -> bool:
        finite = [s for s in self.segments if not isinstance(s, RaySeg)]
        if len(finite) != len(self.segments) or not finite:
            return False
        return abs(finite[0].start - finite[-1].endpoint) < 1e-12

    def sample_points(self, per_segment: int = 64, ray_length: float | None = None) -> np.ndarray:
        """Coarse point cloud along the path, for separation checks and dumps."""
        pts = []
        u = np.linspace(0.0, 1.0, per_segment)
        for seg in self.segments:
            if isinstance(seg, RaySeg):
                L = ray_length if ray_length is not None else seg.suggested_length
                pts.append(seg.point(u * L))
            else:
                pts.append(seg.at(u))
        return np.concatenate(pts)

    def to_json(self) -> str:
        out = []
        for seg in self.segments:
            if isinstance(seg, LineSeg):
                out.append({"kind": "line-segment", "start": _cpair(seg.start), "end": _cpair(seg.end)})
            elif isinstance(seg, ArcSeg):
                out.append({
                    "kind": "circular-arc",
                    "center": _cpair(seg.center),
                    "radius": seg.radius,
                    "ang0": seg.ang0,
                    "ang1": seg.ang1,
                })
            else:
                out.append({
                    "kind": "ray",
                    "anchor": _cpair(seg.anchor),
                    "direction": _cpair(seg.direction),
                    "incoming": seg.incoming,
                    "decay": seg.decay,
                })
        return json.dumps({"orientation": self.orientation, "segments": out})


def _cpair(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def vertical_line(x: float, decay: str = "gaussian") -> ComplexPath:
    """Upward-oriented vertical line Re z = x as a pair of rays."""
    a = complex(x, 0.0)
    return ComplexPath((
        RaySeg(a, -1j, incoming=True, decay=decay),
        RaySeg(a, +1j, incoming=False, decay=decay),
    ))


@dataclass(frozen=True)
class QuadSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000
    ray_truncation_drop: float = 1e-16

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass
class QuadResult:
    value: complex
    error: float
    converged: bool = True
    nevals: int = 0

    def __iter__(self):
        yield self.value
        yield self.error


def vectorize_integrand(f: Callable[[complex], complex]) -> Callable[[np.ndarray], np.ndarray]:
    def fv(z: np.ndarray) -> np.ndarray:
        return np.array([f(zz) for zz in np.atleast_1d(z)], dtype=complex)

    return fv


# ---------------------------------------------------------------------------
# Adaptive quadrature: embedded Gauss pair G15/G7 with worst-first bisection
# ---------------------------------------------------------------------------

_X15, _W15 = np.polynomial.legendre.leggauss(15)
_X7, _W7 = np.polynomial.legendre.leggauss(7)


def _panel(f, seg, a: float, b: float):
    """(G15 value, |G15-G7| error) for f over seg's parameter window [a, b]."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    u15 = mid + half * _X15
    z15 = seg.at(u15)
    fz15 = np.asarray(f(z15), dtype=complex)
    dz15 = seg.deriv(u15)
    v15 = half * np.sum(_W15 * fz15 * dz15)

    u7 = mid + half * _X7
    z7 = seg.at(u7)
    fz7 = np.asarray(f(z7), dtype=complex)
    dz7 = seg.deriv(u7)
    v7 = half * np.sum(_W7 * fz7 * dz7)
    return v15, abs(v15 - v7), 22


def _adaptive_segment(f, seg, spec: QuadSpec):
    import heapq

    panels = []
    val, err, ne = _panel(f, seg, 0.0, 1.0)
    heapq.heappush(panels, (-err, 0.0, 1.0, val, err))
    total_ne = ne
    nsub = 0
    while True:
        total_val = sum(p[3] for p in panels)
        total_err = sum(p[4] for p in panels)
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
            return total_val, total_err, total_ne, True
        if nsub >= spec.max_subdivisions:
            return total_val, total_err, total_ne, False
        _, a, b, _, _ = heapq.heappop(panels)
        m = 0.5 * (a + b)
        for lo, hi in ((a, m), (m, b)):
            v, e, ne = _panel(f, seg, lo, hi)
            heapq.heappush(panels, (-e, lo, hi, v, e))
            total_ne += ne
        nsub += 1


def _truncate_ray(f, ray: RaySeg, spec: QuadSpec):
    """Truncation length and geometric tail bound for |f| along the ray."""
    def probe(r: float) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            m = float(np.max(np.abs(f(ray.point(np.array([r]))))))
        if math.isnan(m) or math.isinf(m):
            raise QuadratureError(
                f"integrand is non-finite at distance {r:.3g} along ray from "
                f"{ray.anchor}; it must decay along this ray"
            )
        return m

    rs = [0.25 * ray.suggested_length * (2.0**k) for k in range(-6, 7)]
    peak = 0.0
    L = rs[-1]
    for r in rs:
        m = probe(r)
        peak = max(peak, m)
        if peak > 0 and m <= spec.ray_truncation_drop * peak and r >= 2.0:
            L = r
            break
    else:
        # keep doubling past the table if the drop was never reached
        r = rs[-1]
        for _ in range(20):
            r *= 2.0
            m = probe(r)
            peak = max(peak, m)
            if peak == 0.0 or m <= spec.ray_truncation_drop * peak:
                break
        L = r
    m_half = probe(0.5 * L) + 1e-320
    m_end = probe(L) + 1e-320
    if m_end < m_half:
        tau = (0.5 * L) / math.log(m_half / m_end)
        tail = m_end * tau
    else:
        tail = m_end * L  # no decay detected over the last octave; be honest
    return L, tail


def integrate(f, path: ComplexPath, spec: QuadSpec | None = None) -> QuadResult:
    """Integrate ``f`` along ``path``; result carries an error estimate.

    Rays are truncated where the integrand has dropped below
    ``spec.ray_truncation_drop`` of its on-ray peak; the estimated geometric
    tail is folded into the reported error.
    """
    spec = spec or QuadSpec()
    total = 0.0 + 0.0j
    err = 0.0
    nevals = 0
    converged = True
    for seg in path.segments:
        if isinstance(seg, RaySeg):
            L, tail = _truncate_ray(f, seg, spec)
            line = LineSeg(seg.anchor, seg.anchor + seg.direction * L)
            v, e, ne, ok = _adaptive_segment(f, line, spec)
            if seg.incoming:
                v = -v
            err += tail
        else:
            v, e, ne, ok = _adaptive_segment(f, seg, spec)
        total += v
        err += e
        nevals += ne
        converged = converged and ok
    if path.orientation < 0:
        total = -total
    return QuadResult(total, err, converged, nevals)


def integrate_double(
    F,
    path_s: ComplexPath,
    path_t: ComplexPath,
    spec: QuadSpec | None = None,
    min_separation: float = 1e-8,
) -> QuadResult:
    """Iterated double contour integral, inner in s and outer in t.

    ``F(s, t)`` is called with an array of s nodes and one scalar t.  The
    paths must keep a positive distance so 1/(s-t)-type factors stay bounded.
    """
    spec = spec or QuadSpec()
    ps = path_s.sample_points(64)
    pt = path_t.sample_points(64)
    sep = np.min(np.abs(ps[:, None] - pt[None, :]))
    if sep < min_separation:
        raise PathCollisionError(
            f"s- and t-paths are {sep:.3e} apart (< {min_separation:.1e})"
        )

    inner_spec = QuadSpec(
        rel_tol=max(spec.rel_tol * 0.1, 1e-13),
        abs_tol=max(spec.abs_tol * 0.1, 1e-15),
        max_subdivisions=spec.max_subdivisions,
        ray_truncation_drop=spec.ray_truncation_drop,
    )
    inner_err_max = 0.0
    ne_count = [0]

    def outer_integrand(t_arr: np.ndarray) -> np.ndarray:
        nonlocal inner_err_max
        vals = np.empty(len(t_arr), dtype=complex)
        for i, t in enumerate(np.atleast_1d(t_arr)):
            r = integrate(lambda s: F(s, t), path_s, inner_spec)
            inner_err_max = max(inner_err_max, r.error)
            ne_count[0] += r.nevals
            vals[i] = r.value
        return vals

    outer = integrate(outer_integrand, path_t, spec)
    outer_len = sum(
        seg.length if not isinstance(seg, RaySeg) else seg.suggested_length
        for seg in path_t.segments
    )
    return QuadResult(
        outer.value,
        outer.error + inner_err_max * outer_len,
        outer.converged,
        outer.nevals + ne_count[0],
    )


def fixed_path_nodes(path: ComplexPath, n_per_segment: int = 64, ray_length: float = 40.0):
    """Composite Gauss-Legendre nodes/weights along a path, for tensorized sweeps.

    Returns ``(z, w)`` with ``sum(f(z) * w)`` approximating the path integral.
    Rays use the given truncation length; callers validate by doubling
    ``n_per_segment`` and ``ray_length``.
    """
    xg, wg = np.polynomial.legendre.leggauss(n_per_segment)
    u = 0.5 * (xg + 1.0)
    zs, ws = [], []
    for seg in path.segments:
        if isinstance(seg, RaySeg):
            # graded subpanels: rays need more resolution near the anchor
            edges = ray_length * np.linspace(0.0, 1.0, 9) ** 2
            for a, b in zip(edges[:-1], edges[1:]):
                r = a + (b - a) * u
                zs.append(seg.point(r))
                sgn = -1.0 if seg.incoming else 1.0
                ws.append(sgn * seg.direction * (b - a) * 0.5 * wg)
        else:
            zs.append(seg.at(u))
            ws.append(seg.deriv(u) * 0.5 * wg)
    z = np.concatenate(zs)
    w = np.concatenate(ws)
    if path.orientation < 0:
        w = -w
    return z, w


# ---------------------------------------------------------------------------
# Contour builders
# ---------------------------------------------------------------------------


def sigma_encircling(N: int, pad: float) -> ComplexPath:
    """Positively oriented rectangle enclosing exactly the poles 0, -1, ..., -N+1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 < pad < 0.5:
        raise ValueError(f"pad must lie in (0, 1/2), got {pad}")
    xr = pad
    xl = -(N - 1) - pad
    return ComplexPath((
        LineSeg(complex(xl, -pad), complex(xr, -pad)),
        LineSeg(complex(xr, -pad), complex(xr, pad)),
        LineSeg(complex(xr, pad), complex(xl, pad)),
        LineSeg(complex(xl, pad), complex(xl, -pad)),
    ))


def sigma_minus(a: float, N: int) -> ComplexPath:
    """Five-piece positively oriented loop around the Gamma poles left of ``a``.

    End wall sits at -N + 1/2; the loop has half-height 1/4 and a corner
    vertex on the real axis at ``a``.
    """
    if not (-N + 1 < a < 1):
        raise ValueError(f"a must lie in (-N+1, 1), got a={a}, N={N}")
    v = complex(a, 0.0)
    tl = complex(a - 0.5, 0.25)
    bl = complex(a - 0.5, -0.25)
    wall_t = complex(-N + 0.5, 0.25)
    wall_b = complex(-N + 0.5, -0.25)
    return ComplexPath((
        LineSeg(v, tl),          # up-left from the vertex
        LineSeg(tl, wall_t),     # top edge, leftward
        LineSeg(wall_t, wall_b),  # end wall, downward
        LineSeg(wall_b, bl),     # bottom edge, rightward
        LineSeg(bl, v),          # up-right back to the vertex
    ))


def sigma_plus(b: float, N: int) -> ComplexPath:
    """Five-piece positively oriented loop around the Gamma poles right of ``b``.

    End wall sits at Re z = 1; vertex on the real axis at ``b``.
    """
    if not (-N + 1 < b < 0.5):
        raise ValueError(f"b must lie in (-N+1, 1/2), got b={b}, N={N}")
    v = complex(b, 0.0)
    br = complex(b + 0.5, -0.25)
    tr = complex(b + 0.5, 0.25)
    wall_b = complex(1.0, -0.25)
    wall_t = complex(1.0, 0.25)
    return ComplexPath((
        LineSeg(v, br),          # down-right from the vertex
        LineSeg(br, wall_b),     # bottom edge, rightward
        LineSeg(wall_b, wall_t),  # wall at Re z = 1, upward
        LineSeg(wall_t, tr),     # top edge, leftward
        LineSeg(tr, v),          # down-left back to the vertex
    ))


def sigma_minus_infty(eps: float, crossing: float = 0.5, decay: str = "gaussian-gamma") -> ComplexPath:
    """Hairpin around all of 0, -1, -2, ...: in at -i*eps, out at +i*eps.

    The axis crossing defaults to 1/2, strictly between the pole at 0 and
    the s-line at Re s = 1.  Integrands must decay along the rays; the
    default certificate names the Gaussian times reciprocal-factorial decay
    of the critical-kernel integrands.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if not 0.0 < crossing < 1.0:
        raise ValueError(f"crossing must lie in (0, 1), got {crossing}")
    lo = complex(crossing, -eps)
    hi = complex(crossing, eps)
    return ComplexPath((
        RaySeg(lo, -1.0, incoming=True, decay=decay),
        LineSeg(lo, hi),
        RaySeg(hi, -1.0, incoming=False, decay=decay),
    ))


def airy_wedges(R: float = math.inf) -> tuple[ComplexPath, ComplexPath]:
    """Upward Airy contours: left wedge through -1 and right wedge through +1.

    Arms live at angles (2pi/3, pi/3) and (4pi/3, 5pi/3); finite ``R``
    truncates the arms at that length.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    d_up_left = np.exp(2j * math.pi / 3.0)
    d_dn_left = np.exp(4j * math.pi / 3.0)
    d_up_right = np.exp(1j * math.pi / 3.0)
    d_dn_right = np.exp(5j * math.pi / 3.0)
    if math.isinf(R):
        left = ComplexPath((
            RaySeg(-1.0 + 0j, d_dn_left, incoming=True, decay="cubic-exponential"),
            RaySeg(-1.0 + 0j, d_up_left, incoming=False, decay="cubic-exponential"),
        ))
        right = ComplexPath((
            RaySeg(1.0 + 0j, d_dn_right, incoming=True, decay="cubic-exponential"),
            RaySeg(1.0 + 0j, d_up_right, incoming=False, decay="cubic-exponential"),
        ))
    else:
        left = ComplexPath((
            LineSeg(-1.0 + R * d_dn_left, -1.0 + 0j),
            LineSeg(-1.0 + 0j, -1.0 + R * d_up_left),
        ))
        right = ComplexPath((
            LineSeg(1.0 + R * d_dn_right, 1.0 + 0j),
            LineSeg(1.0 + 0j, 1.0 + R * d_up_right),
        ))
    return left, right


# ---------------------------------------------------------------------------
# Strongly correlated regime: the q_M arc and its companions
# ---------------------------------------------------------------------------


def q_M(phi, M: int):
    """Steepest-descent curve (M+1)(sin(phi) e^{i phi/(M+1)} / sin((1-1/(M+1))phi) - 1).

    Vectorized in ``phi``; the removable singularity at phi = 0 evaluates to
    (M+1)/M.
    """
    phi = np.asarray(phi, dtype=float)
    eps = 1.0 / (M + 1.0)
    small = np.abs(phi) < 1e-9
    safe = np.where(small, 1.0, phi)
    val = (M + 1.0) * (np.sin(safe) * np.exp(1j * safe * eps) / np.sin((1.0 - eps) * safe) - 1.0)
    lim = (M + 1.0) / M + 0.0j
    out = np.where(small, lim, val)
    return out if out.ndim else complex(out)


def h_M(phi, M: int):
    """Real part of q_M; maps [0, pi) bijectively onto (-M-1, (M+1)/M]."""
    return np.real(q_M(phi, M))


def h_M_inverse(x: float, M: int) -> float:
    """Inverse of the decreasing map h_M on [0, pi)."""
    hi0 = (M + 1.0) / M
    if not (-(M + 1.0) < x <= hi0):
        raise ValueError(f"x={x} outside the range (-M-1, (M+1)/M] of h_M")
    import scipy.optimize

    if x >= hi0:
        return 0.0
    return float(scipy.optimize.brentq(lambda p: h_M(p, M) - x, 0.0, math.pi - 1e-12, xtol=1e-14))


def v_M_param(theta: float, M: int) -> float:
    """Spectral parametrization v_M(theta) on [0, pi), by its limit at 0."""
    if not 0.0 <= theta < math.pi:
        raise ValueError(f"theta must lie in [0, pi), got {theta}")
    eps = 1.0 / (M + 1.0)
    if theta < 1e-8:
        return M * math.log((M + 1.0) / M)
    return (
        (M + 1.0) * math.log(math.sin(theta))
        - M * math.log(math.sin((1.0 - eps) * theta))
        - math.log(math.sin(eps * theta))
        - math.log(M + 1.0)
    )


def _arc_polyline(M: int, phi_lo: float, phi_hi: float, n: int) -> list[LineSeg]:
    """Polyline approximation of the q_M arc between two angles.

    The integrands are analytic between the chord chain and the true curve,
    so the polyline computes the same contour integral exactly.
    """
    phis = np.linspace(phi_lo, phi_hi, n + 1)
    pts = q_M(phis, M)
    return [LineSeg(pts[i], pts[i + 1]) for i in range(n)]


def steepest_path_case3(theta: float, M: int, N: int, points_per_unit_angle: int = 60):
    """(t-contour, s-line) pair for the strongly correlated regime.

    The t-contour follows q_M(phi) for |phi| up to the angle at which the
    curve meets the closing wall at -(M+1) + (M+1)/(2N); the s-contour is
    the vertical line through h_M(theta).
    """
    if not 0.0 <= theta < math.pi:
        raise ValueError(f"theta must lie in [0, pi), got {theta}")
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    wall_x = -(M + 1.0) + (M + 1.0) / (2.0 * N)
    phi_w = h_M_inverse(wall_x, M)
    n = max(24, int(points_per_unit_angle * 2 * phi_w))
    segs = _arc_polyline(M, -phi_w, phi_w, n)
    p_lo = q_M(-phi_w, M)
    p_hi = q_M(phi_w, M)
    wall = LineSeg(complex(wall_x, p_hi.imag), complex(wall_x, p_lo.imag))
    # close: arc (bottom to top, counterclockwise through the right) then wall
    t_path = ComplexPath(tuple(segs) + (LineSeg(p_hi, wall.start), wall, LineSeg(wall.end, p_lo)))
    s_path = vertical_line(float(h_M(theta, M)), decay="saddle-quadratic")
    return t_path, s_path


# ---------------------------------------------------------------------------
# Small diagnostics used by tests
# ---------------------------------------------------------------------------


def winding_number(path: ComplexPath, point: complex, spec: QuadSpec | None = None) -> float:
    """Numerical winding number of a closed path about a point."""
    r = integrate(lambda z: 1.0 / (z - point), path, spec or QuadSpec(abs_tol=1e-10))
    return float(np.real(r.value / (2j * math.pi)))
