"""Cross-sections, boundary curves, curvature, and spectral classification.

A cone in R^nu is described by its cross-section on the unit sphere.  For
nu = 3 the cross-section boundary is a closed C^2 curve gamma on S^2 stored
at uniformly spaced arc-length samples; first and second derivatives come
from spectral (trigonometric) differentiation, so smooth curves are resolved
to near machine precision.  The geodesic curvature

    kappa(s) = det(gamma(s), gamma'(s), gamma''(s))

drives everything: kappa <= 0 everywhere means the complement of the cone is
convex (no eigenvalues below the essential-spectrum threshold -alpha^2),
while kappa(s0) > 0 at some point forces infinitely many.

Orientation convention: curves are traversed with the cross-section on the
left of the travel direction (gamma x gamma' points toward the inside of the
cross-section).  With this convention a latitude circle at polar angle
theta0 has kappa = cot(theta0), positive for caps smaller than a hemisphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    DegenerateRadius,
    GeometryError,
    IndeterminateSign,
    NonSimpleCurve,
    NotOnSphere,
    UnsupportedGeometry,
)

DEFAULT_SAMPLES = 512


# ---------------------------------------------------------------------------
# cross-section kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval2D:
    """Planar sector cross-section: arc of S^1 with half-aperture theta.

    The full opening is 2*theta; curvature machinery is bypassed in 2D.
    """

    theta: float

    dimension = 2

    def __post_init__(self):
        if not 0.0 < self.theta < np.pi:
            raise GeometryError(f"half-aperture must lie in (0, pi), got {self.theta}")


@dataclass(frozen=True)
class LatitudeCircle:
    """Spherical cap cross-section: all directions with polar angle < theta0."""

    theta0: float
    samples: int = DEFAULT_SAMPLES

    dimension = 3

    def __post_init__(self):
        if not 0.0 < self.theta0 < np.pi:
            raise GeometryError(f"polar angle must lie in (0, pi), got {self.theta0}")


@dataclass(frozen=True)
class SphericalGraph:
    """Star-shaped cross-section around the north pole.

    ``rho`` maps azimuth phi to the polar angle of the boundary; it must be
    2*pi-periodic, C^2, and take values in (0, pi) so the curve avoids both
    poles.  Such cross-sections are simply connected by construction.
    """

    rho: Callable[[np.ndarray], np.ndarray]
    samples: int = DEFAULT_SAMPLES
    source: Optional[str] = None  # expression text when built from a config

    dimension = 3


CrossSection = Union[Interval2D, LatitudeCircle, SphericalGraph]


@dataclass
class ConeSpec:
    """Dilation-invariant cone: vertex plus cross-section on the unit sphere."""

    cross_section: CrossSection
    vertex: np.ndarray = None

    _curve: Optional["BoundaryCurve"] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.vertex is None:
            self.vertex = np.zeros(self.cross_section.dimension)
        self.vertex = np.asarray(self.vertex, dtype=float)

    @property
    def dimension(self) -> int:
        return self.cross_section.dimension

    def boundary_curve(self) -> "BoundaryCurve":
        if self.dimension != 3:
            raise UnsupportedGeometry("boundary curves exist only for 3D cones")
        if self._curve is None:
            self._curve = boundary_curve(self.cross_section)
        return self._curve


# ---------------------------------------------------------------------------
# trigonometric series evaluation
# ---------------------------------------------------------------------------

class _TrigSeries:
    """Real periodic vector function from rfft coefficients of its samples."""

    def __init__(self, coef: np.ndarray, period: float, n_samples: int):
        self.coef = coef            # (n_comp, K) complex, rfft layout
        self.period = period
        self.n = n_samples

    @classmethod
    def from_samples(cls, samples: np.ndarray, period: float) -> "_TrigSeries":
        return cls(np.fft.rfft(samples, axis=0).T, period, samples.shape[0])

    def derivative(self) -> "_TrigSeries":
        k = np.arange(self.coef.shape[1])
        factor = 2j * np.pi * k / self.period
        coef = self.coef * factor
        if self.n % 2 == 0:
            coef[:, -1] = 0.0  # Nyquist mode has no well-defined derivative sign
        return _TrigSeries(coef, self.period, self.n)

    def sample_values(self) -> np.ndarray:
        return np.fft.irfft(self.coef.T, n=self.n, axis=0)

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        k = np.arange(self.coef.shape[1])
        phase = np.exp(2j * np.pi * np.outer(s, k) / self.period)
        weight = np.full(self.coef.shape[1], 2.0)
        weight[0] = 1.0
        if self.n % 2 == 0:
            weight[-1] = 1.0
        vals = (phase * weight) @ self.coef.T
        return vals.real / self.n


# ---------------------------------------------------------------------------
# boundary curves
# ---------------------------------------------------------------------------

SPHERE_TOL = 1e-8
UNIT_SPEED_TOL = 1e-8
TANGENCY_TOL = 1e-8


def _triple_product(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    cross = np.cross(b, c)
    return np.einsum("...i,...i->...", a, cross)


class BoundaryCurve:
    """Closed curve on S^2 in arc-length parametrization.

    Stores M uniform arc-length samples of gamma and its first two
    derivatives; values between samples come from the trigonometric
    interpolant.  Invariants (checked on construction): |gamma| = 1,
    |gamma'| = 1, and <gamma, gamma'> = 0 at every sample.
    """

    def __init__(self, gamma_samples: np.ndarray, length: float, validate: bool = True):
        gamma_samples = np.asarray(gamma_samples, dtype=float)
        if gamma_samples.ndim != 2 or gamma_samples.shape[1] != 3:
            raise GeometryError("expected (M, 3) sample array")
        self.length = float(length)
        self.n_samples = gamma_samples.shape[0]
        self._series0 = _TrigSeries.from_samples(gamma_samples, self.length)
        self._series1 = self._series0.derivative()
        self._series2 = self._series1.derivative()
        self.gamma_samples = gamma_samples
        self.dgamma_samples = self._series1.sample_values()
        self.ddgamma_samples = self._series2.sample_values()
        if validate:
            self._validate()

    def _validate(self):
        radii = np.linalg.norm(self.gamma_samples, axis=1)
        if np.max(np.abs(radii - 1.0)) > SPHERE_TOL:
            raise NotOnSphere(
                f"curve leaves the unit sphere by {np.max(np.abs(radii - 1.0)):.2e}"
            )
        speed = np.linalg.norm(self.dgamma_samples, axis=1)
        err = np.max(np.abs(speed - 1.0))
        if err > UNIT_SPEED_TOL:
            raise GeometryError(
                f"unit-speed invariant violated by {err:.2e}; "
                "increase the sample count for this curve"
            )
        tang = np.abs(np.einsum("ij,ij->i", self.gamma_samples, self.dgamma_samples))
        if np.max(tang) > TANGENCY_TOL:
            raise GeometryError(f"tangency invariant violated by {np.max(tang):.2e}")

    @property
    def sample_s(self) -> np.ndarray:
        return np.arange(self.n_samples) * (self.length / self.n_samples)

    def gamma(self, s) -> np.ndarray:
        return self._series0(s)

    def dgamma(self, s) -> np.ndarray:
        return self._series1(s)

    def ddgamma(self, s) -> np.ndarray:
        return self._series2(s)

    def max_ddgamma(self) -> float:
        return float(np.max(np.linalg.norm(self.ddgamma_samples, axis=1)))

    def kappa_samples(self) -> np.ndarray:
        """Geodesic curvature at the stored samples (exact triple product)."""
        return _triple_product(
            self.gamma_samples, self.dgamma_samples, self.ddgamma_samples
        )

    def kappa(self, s) -> np.ndarray:
        return _triple_product(self.gamma(s), self.dgamma(s), self.ddgamma(s))

    def reversed(self) -> "BoundaryCurve":
        """Same curve traversed in the opposite direction.

        Samples and series are transformed exactly (reindex, negate,
        conjugate), so kappa of the reversed curve is the exact negation of
        kappa at the matching points.
        """
        idx = (-np.arange(self.n_samples)) % self.n_samples
        rev = object.__new__(BoundaryCurve)
        rev.length = self.length
        rev.n_samples = self.n_samples
        rev.gamma_samples = self.gamma_samples[idx]
        rev.dgamma_samples = -self.dgamma_samples[idx]
        rev.ddgamma_samples = self.ddgamma_samples[idx]
        # f(L - s) has conjugated rfft coefficients; each d/ds flips the sign
        rev._series0 = _TrigSeries(np.conj(self._series0.coef), self.length, self.n_samples)
        rev._series1 = _TrigSeries(-np.conj(self._series1.coef), self.length, self.n_samples)
        rev._series2 = _TrigSeries(np.conj(self._series2.coef), self.length, self.n_samples)
        return rev


def _check_simple(points: np.ndarray, length: float) -> None:
    m = points.shape[0]
    spacing = length / m
    diff = points[:, None, :] - points[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    gap = np.minimum((i - j) % m, (j - i) % m)
    mask = gap >= 2
    if np.any(dist[mask] < 0.25 * spacing):
        raise NonSimpleCurve("curve samples self-intersect on the sample grid")


def arclength_reparametrize(
    curve: Callable[[np.ndarray], np.ndarray],
    samples: int = DEFAULT_SAMPLES,
    contains: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> BoundaryCurve:
    """Reparametrize a closed 2*pi-periodic curve on S^2 by arc length.

    ``curve`` maps an array of parameter values in [0, 2*pi) to (n, 3)
    points with |point| = 1 within 1e-8.  If ``contains`` is given (mapping
    (n, 3) points to booleans for membership in the cross-section), the
    orientation is normalized so the cross-section lies to the left of the
    traversal; otherwise the input orientation is kept.
    """
    fine = max(4 * samples, 2048)
    u = np.arange(fine) * (2 * np.pi / fine)
    pts = np.asarray(curve(u), dtype=float)
    radii = np.linalg.norm(pts, axis=1)
    if np.max(np.abs(radii - 1.0)) > SPHERE_TOL:
        raise NotOnSphere(
            f"raw curve leaves the unit sphere by {np.max(np.abs(radii - 1.0)):.2e}"
        )
    pts = pts / radii[:, None]

    series = _TrigSeries.from_samples(pts, 2 * np.pi)
    dseries = series.derivative()
    speed_samples = np.linalg.norm(dseries.sample_values(), axis=1)
    if np.min(speed_samples) <= 0.0:
        raise GeometryError("degenerate parametrization: vanishing speed")

    speed_series = _TrigSeries.from_samples(speed_samples[:, None], 2 * np.pi)
    mean_speed = speed_series.coef[0, 0].real / fine
    length = 2 * np.pi * mean_speed

    # antiderivative of (speed - mean): divide coefficients by i*k
    k = np.arange(speed_series.coef.shape[1])
    int_coef = np.zeros_like(speed_series.coef)
    int_coef[:, 1:] = speed_series.coef[:, 1:] / (1j * k[1:])
    if fine % 2 == 0:
        int_coef[:, -1] = 0.0
    osc = _TrigSeries(int_coef, 2 * np.pi, fine)

    def arclen(uu):
        return mean_speed * uu + (osc(uu)[:, 0] - osc(np.zeros(1))[0, 0])

    def speed(uu):
        return speed_series(uu)[:, 0]

    targets = np.arange(samples) * (length / samples)
    u_fine_arc = arclen(u)
    guess = np.interp(targets, u_fine_arc, u)
    for _ in range(8):
        resid = arclen(guess) - targets
        guess = guess - resid / speed(guess)
    if np.max(np.abs(arclen(guess) - targets)) > 1e-10 * max(1.0, length):
        raise GeometryError("arc-length inversion did not converge")

    gamma = np.asarray(curve(guess), dtype=float)
    gamma = gamma / np.linalg.norm(gamma, axis=1)[:, None]
    _check_simple(gamma, length)

    bc = BoundaryCurve(gamma, length)
    if contains is not None:
        probe_idx = np.linspace(0, samples - 1, 16, dtype=int)
        w = np.cross(bc.gamma_samples[probe_idx], bc.dgamma_samples[probe_idx])
        p = bc.gamma_samples[probe_idx] + 1e-4 * w
        p = p / np.linalg.norm(p, axis=1)[:, None]
        inside = np.asarray(contains(p), dtype=bool)
        if np.count_nonzero(inside) * 2 < len(probe_idx):
            bc = bc.reversed()
    return bc


@lru_cache(maxsize=64)
def boundary_curve(cross_section: CrossSection) -> BoundaryCurve:
    """Arc-length boundary curve of a 3D cross-section, orientation normalized.

    Cross-sections are immutable, so curves are cached per instance (graph
    profiles hash by the identity of their callable).
    """
    if isinstance(cross_section, LatitudeCircle):
        theta0 = cross_section.theta0

        def curve(u):
            u = np.atleast_1d(u)
            return np.stack(
                [
                    np.sin(theta0) * np.cos(u),
                    np.sin(theta0) * np.sin(u),
                    np.full_like(u, np.cos(theta0)),
                ],
                axis=1,
            )

        def contains(p):
            return np.arccos(np.clip(p[:, 2], -1.0, 1.0)) < theta0

        return arclength_reparametrize(curve, cross_section.samples, contains)

    if isinstance(cross_section, SphericalGraph):
        rho = cross_section.rho
        u_check = np.linspace(0.0, 2 * np.pi, 720, endpoint=False)
        vals = np.asarray(rho(u_check), dtype=float)
        if np.any(vals <= 0.0) or np.any(vals >= np.pi):
            raise GeometryError("graph profile must stay in (0, pi) to avoid the poles")

        def curve(u):
            u = np.atleast_1d(u)
            r = np.asarray(rho(u), dtype=float)
            return np.stack(
                [np.sin(r) * np.cos(u), np.sin(r) * np.sin(u), np.cos(r)], axis=1
            )

        def contains(p):
            phi = np.arctan2(p[:, 1], p[:, 0])
            polar = np.arccos(np.clip(p[:, 2], -1.0, 1.0))
            return polar < np.asarray(rho(phi), dtype=float)

        return arclength_reparametrize(curve, cross_section.samples, contains)

    raise UnsupportedGeometry(
        f"no boundary curve for cross-section {type(cross_section).__name__}"
    )


# ---------------------------------------------------------------------------
# curvature operations
# ---------------------------------------------------------------------------

def geodesic_curvature(curve: BoundaryCurve, s) -> np.ndarray:
    """kappa(s) = det(gamma, gamma', gamma'') at arc length s (periodic)."""
    s = np.mod(np.asarray(s, dtype=float), curve.length)
    out = curve.kappa(s)
    return out if out.ndim else float(out)


def mean_curvature(cone: ConeSpec, s: float, t: float) -> float:
    """Mean curvature kappa(s)/(2 t) of the cone boundary at radius t > 0."""
    if t <= 0.0:
        raise DegenerateRadius(f"radius must be positive, got {t}")
    curve = cone.boundary_curve()
    return float(np.atleast_1d(geodesic_curvature(curve, s))[0] / (2.0 * t))


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of the complement-convexity test with curvature evidence."""

    convex: bool
    s_at_max: Optional[float]
    kappa_max: Optional[float]
    tol: float


def curvature_tolerance(curve: BoundaryCurve) -> float:
    """Dead band for the sign test, scaled by the curve's second derivative."""
    return 1e-9 * (1.0 + curve.max_ddgamma())


def complement_is_convex(cone: ConeSpec) -> ConvexityReport:
    """Test whether the complement of the cone is convex.

    nu = 3: true iff max_s kappa(s) <= tol; the maximizing location and value
    are returned as evidence.  A maximum inside the dead band (-tol, tol)
    raises IndeterminateSign: the dichotomy is exact in theory and the
    boundary case must surface rather than silently pick a side.
    nu = 2: aperture test, complement convex iff the full opening >= pi.
    """
    cs = cone.cross_section
    if isinstance(cs, Interval2D):
        return ConvexityReport(bool(2 * cs.theta >= np.pi), None, None, 0.0)

    curve = cone.boundary_curve()
    dense = np.arange(4 * curve.n_samples) * (
        curve.length / (4 * curve.n_samples)
    )
    kappa = np.atleast_1d(geodesic_curvature(curve, dense))
    idx = int(np.argmax(kappa))
    kmax = float(kappa[idx])
    tol = curvature_tolerance(curve)
    if -tol < kmax < tol:
        raise IndeterminateSign(
            f"max curvature {kmax:.3e} within +/-{tol:.1e} of zero: "
            "convexity test is degenerate"
        )
    return ConvexityReport(kmax <= -tol or kmax < 0.0, float(dense[idx]), kmax, tol)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

class Verdict(str, Enum):
    EMPTY = "Empty"
    FINITE = "Finite"
    INFINITE = "Infinite"
    INDETERMINATE = "IndeterminateByPaper"


@dataclass(frozen=True)
class ClassificationVerdict:
    """Discrete-spectrum cardinality verdict with supporting evidence."""

    verdict: Verdict
    reason: str
    kappa_location: Optional[float] = None
    kappa_value: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value, "reason": self.reason}
        if self.kappa_value is not None:
            out["kappa"] = self.kappa_value
            out["s0"] = self.kappa_location
        return out


def classify(spec) -> ClassificationVerdict:
    """Classify the discrete spectrum below -alpha^2 as empty/finite/infinite.

    Accepts a ConeSpec or any object with ``cone`` and ``perturbation``
    attributes (a domain specification).  The verdict depends only on the
    cross-section of the associated cone and on whether a compact
    perturbation is present; it is invariant under dilations.
    """
    cone = getattr(spec, "cone", spec)
    perturbed = getattr(spec, "perturbation", None) is not None
    cs = cone.cross_section

    if isinstance(cs, Interval2D):
        if 2 * cs.theta >= np.pi:
            if perturbed:
                return ClassificationVerdict(
                    Verdict.FINITE,
                    "compactly perturbed sector with convex complement: "
                    "at most finitely many eigenvalues below -alpha^2",
                )
            return ClassificationVerdict(
                Verdict.EMPTY,
                "sector complement is convex: no spectrum below -alpha^2",
            )
        return ClassificationVerdict(
            Verdict.INDETERMINATE,
            "planar sector with non-convex complement: the implemented "
            "criteria decide infiniteness only in dimension >= 3",
        )

    if not isinstance(cs, (LatitudeCircle, SphericalGraph)):
        raise UnsupportedGeometry(
            f"classification requires a smooth simply connected cross-section, "
            f"got {type(cs).__name__}"
        )

    try:
        report = complement_is_convex(cone)
    except IndeterminateSign as exc:
        return ClassificationVerdict(
            Verdict.INDETERMINATE,
            f"curvature sign test degenerate: {exc}",
        )

    if report.convex:
        if perturbed:
            return ClassificationVerdict(
                Verdict.FINITE,
                "associated cone has convex complement: compactly perturbed "
                "domain keeps at most finitely many eigenvalues below -alpha^2",
                report.s_at_max,
                report.kappa_max,
            )
        return ClassificationVerdict(
            Verdict.EMPTY,
            "cone complement is convex: no spectrum below -alpha^2",
            report.s_at_max,
            report.kappa_max,
        )
    return ClassificationVerdict(
        Verdict.INFINITE,
        "boundary curvature is strictly positive somewhere: infinitely many "
        "eigenvalues accumulate below -alpha^2",
        report.s_at_max,
        report.kappa_max,
    )
