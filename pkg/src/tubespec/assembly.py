"""Model manifolds and the diameter-bound pipelines.

A model manifold is a thick part (whose spectral constants are declared
inputs) plus Margulis tubes.  The two-open cover has the thick part as U_1
and the union of tubes as U_2, overlapping in collars [R_a, R].  The
pipelines evaluate the covering bound twice per manifold:

* rank k+1 with the uniform section-norm cap (quadratic-in-diameter bound),
* rank 1 with the full section bound grown from the tube radii
  (quartic-times-exponential bound),

and the filling sequence pipeline walks slopes (1, i), where |b| >= R|a|
makes the uniform cap apply to the first eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covering import CoverSpec, OpenPiece, Overlap, evaluate
from .intmat import (
    IntMatrix,
    SectionData,
    assemble_section,
    section_ct_bound_general,
    section_ct_bound_single,
)
from .spectra import DEFAULT_MESH, collar_function_problem, tube_mu1
from .sturm import MeshSpec, lowest_eigenvalues
from .tube import FillingSlope, Tube

__all__ = [
    "ThickPartSpec",
    "ModelManifold",
    "BoundReport",
    "FillingReport",
    "FitResult",
    "canonical_section",
    "diameter_proxy",
    "overlap_coordinate",
    "dt_norm_ratio",
    "assemble_cover",
    "theorem1_bounds",
    "theorem2_sequence",
    "scaling_fit",
]


@dataclass(frozen=True)
class ThickPartSpec:
    """Declared spectral/geometric constants of the thick part.

    ``mu_thick`` stands in for the uniform coexact 1-form lower bound of the
    thick part and ``lambda_overlap_floor`` (when set) for the uniform
    function-eigenvalue bound on overlaps; neither is computable here, both
    exist by compactness.  ``c_prime``/``c_double_prime``/``big_C`` scale the
    section-norm bounds, ``d_thick`` is the thick part's diameter
    contribution, and ``R_a_infinity`` the limiting collar coordinate.
    """

    mu_thick: float = 1.0
    lambda_overlap_floor: float | None = None
    c_prime: float = 1.0
    c_double_prime: float = 1.0
    big_C: float = 1.0
    d_thick: float = 0.5
    R_a_infinity: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mu_thick", "c_prime", "c_double_prime", "big_C", "d_thick", "R_a_infinity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.lambda_overlap_floor is not None and not self.lambda_overlap_floor > 0:
            raise ValueError(
                f"lambda_overlap_floor must be positive, got {self.lambda_overlap_floor}"
            )


@dataclass(frozen=True)
class ModelManifold:
    """Thick part plus tubes; ``section`` defaults to the canonical
    per-tube block section built from the filling slopes."""

    thick: ThickPartSpec
    tubes: tuple[Tube, ...]
    section: SectionData | None = None

    def __post_init__(self) -> None:
        if not self.tubes:
            raise ValueError("model manifold needs at least one tube")


@dataclass(frozen=True)
class BoundReport:
    """Evaluated lower bounds with the full audit needed to reproduce them:
    re-evaluating the recorded covers returns the recorded bounds exactly."""

    d: float
    mu1_lb: float
    mu_k1_lb: float
    cover_mu1: CoverSpec
    cover_mu_k1: CoverSpec
    constants: dict


@dataclass(frozen=True)
class FillingReport:
    """One row of the filling sequence: slope (1, i) at radius R."""

    i: int
    R: float
    d: float
    regime_ok: bool
    mu1_lb: float
    normalized: float  # mu1_lb * d^2
    report: BoundReport


@dataclass(frozen=True)
class FitResult:
    """Least-squares scaling fit over a sweep of reports."""

    slope: float
    intercept: float
    residual_rms: float
    n: int


def diameter_proxy(m: ModelManifold) -> float:
    """Diameter stand-in d = d_thick + max tube radius (so d > R always)."""
    return m.thick.d_thick + max(t.R for t in m.tubes)


def overlap_coordinate(R: float, spec: ThickPartSpec) -> float:
    """Radial coordinate R_a where the thick open reaches into a tube:
    min(R/2, R_a_infinity), converging for large R."""
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    return min(0.5 * R, spec.R_a_infinity)


def _log_cosh(r: float) -> float:
    # stable for large r: log(cosh r) = r - log 2 + log1p(exp(-2r))
    return r - math.log(2.0) + math.log1p(math.exp(-2.0 * r))


def dt_norm_ratio(R: float, R_a: float) -> float:
    """Norm ratio of the core-direction harmonic form on the whole tube vs
    the collar: log cosh R / (log cosh R - log cosh R_a).

    Greater than 1, and O(R) once R_a is capped.
    """
    if not 0 < R_a < R:
        raise ValueError(f"need 0 < R_a < R, got R_a={R_a}, R={R}")
    full = _log_cosh(R)
    return full / (full - _log_cosh(R_a))


def canonical_section(tubes: tuple[Tube, ...]) -> SectionData:
    """Block section from the filling slopes: per tube a 2-dimensional
    boundary block, thick-part image spanning the first axis of each block
    and the tube generator mapping to (p, q)."""
    k = len(tubes)
    rows = 2 * k
    a_entries = [[0] * k for _ in range(rows)]
    for t in range(k):
        a_entries[2 * t][t] = 1
    b_cols = []
    r_values = []
    for t, tube in enumerate(tubes):
        if tube.slope.is_infinity:
            raise ValueError("unfilled tube has no section column")
        col = [0] * rows
        col[2 * t] = tube.slope.p
        col[2 * t + 1] = tube.slope.q
        b_cols.append(col)
        r_values.append(tube.R)
    return assemble_section(IntMatrix.from_rows(a_entries), b_cols, r_values)


def _cover_pieces(m: ModelManifold, mesh: MeshSpec, constant_weights: bool):
    """Tube spectra, overlap eigenvalue and partition gradient of the
    two-open cover."""
    spectra = tuple(tube_mu1(t, mesh, constant_weights) for t in m.tubes)
    mu_tubes = min(ts.mu1 for ts in spectra)
    widths = []
    collar_lams = []
    for t in m.tubes:
        R_a = overlap_coordinate(t.R, m.thick)
        widths.append(t.R - R_a)
        if m.thick.lambda_overlap_floor is None:
            prob = collar_function_problem(R_a, t.R, mesh, constant_weights)
            collar_lams.append(
                lowest_eigenvalues(prob, 1, drop_kernel=True).eigenvalues[0]
            )
    if m.thick.lambda_overlap_floor is not None:
        mu_overlap = m.thick.lambda_overlap_floor
    else:
        mu_overlap = min(collar_lams)
    c_rho = math.pi / (2.0 * min(widths))
    return spectra, mu_tubes, mu_overlap, c_rho


def _section_ct(m: ModelManifold, growth_exponent: float) -> tuple[float, tuple]:
    sd = m.section if m.section is not None else canonical_section(m.tubes)
    bound = section_ct_bound_general(
        sd,
        R_max=max(t.R for t in m.tubes),
        big_C=m.thick.big_C,
        c_double_prime=m.thick.c_double_prime,
        growth_exponent=growth_exponent,
    )
    return bound.value, bound.factors


def assemble_cover(
    m: ModelManifold,
    mesh: MeshSpec = DEFAULT_MESH,
    k_offset: int = 0,
    ct_mode: str = "uniform",
    ct_exponent: int = 2,
    growth_exponent: float = 1.0,
    constant_weights: bool = False,
) -> CoverSpec:
    """Two-open cover of a model manifold: U1 = thick part, U2 = union of
    tubes (eigenvalue: min over tubes), one overlap (collar eigenvalue or
    the declared floor), c_rho from a half-cosine ramp over the narrowest
    collar, and C_T per ``ct_mode`` ("uniform" cap or "section" bound)."""
    _, mu_tubes, mu_overlap, c_rho = _cover_pieces(m, mesh, constant_weights)
    if ct_mode == "uniform":
        ct = m.thick.c_prime
    elif ct_mode == "section":
        ct, _ = _section_ct(m, growth_exponent)
    else:
        raise ValueError(f"unknown ct_mode {ct_mode!r}")
    return CoverSpec(
        opens=(OpenPiece("thick", m.thick.mu_thick), OpenPiece("tubes", mu_tubes)),
        overlaps=(Overlap("thick", "tubes", mu_overlap),),
        c_rho=c_rho,
        C_T=ct,
        k_offset=k_offset,
        ct_exponent=ct_exponent,
    )


def theorem1_bounds(
    m: ModelManifold,
    mesh: MeshSpec = DEFAULT_MESH,
    ct_exponent: int = 2,
    growth_exponent: float = 1.0,
    constant_weights: bool = False,
) -> BoundReport:
    """Both lower bounds of the general diameter theorem for one manifold.

    mu_{k+1} uses the uniform section cap with rank offset k; mu_1 uses the
    radius-grown section bound (never smaller than the cap) at rank offset 0,
    so mu1_lb <= mu_k1_lb holds on every report.
    """
    spectra, mu_tubes, mu_overlap, c_rho = _cover_pieces(m, mesh, constant_weights)
    k = len(m.tubes)
    ct_uniform = m.thick.c_prime
    ct_section, ct_factors = _section_ct(m, growth_exponent)
    ct_mu1 = max(ct_section, ct_uniform)
    opens = (OpenPiece("thick", m.thick.mu_thick), OpenPiece("tubes", mu_tubes))
    overlaps = (Overlap("thick", "tubes", mu_overlap),)
    cover_mu_k1 = CoverSpec(
        opens, overlaps, c_rho, ct_uniform, k_offset=k, ct_exponent=ct_exponent
    )
    cover_mu1 = CoverSpec(
        opens, overlaps, c_rho, ct_mu1, k_offset=0, ct_exponent=ct_exponent
    )
    d = diameter_proxy(m)
    constants = {
        "k": k,
        "R_max": max(t.R for t in m.tubes),
        "d_thick": m.thick.d_thick,
        "lambda_t": tuple(ts.lambda_t for ts in spectra),
        "lambda_theta": tuple(ts.lambda_theta for ts in spectra),
        "mu_tubes": mu_tubes,
        "mu_thick": m.thick.mu_thick,
        "mu_overlap": mu_overlap,
        "c_rho": c_rho,
        "ct_uniform": ct_uniform,
        "ct_section": ct_section,
        "ct_section_factors": ct_factors,
        "ct_mu1": ct_mu1,
        "ct_exponent": ct_exponent,
        "growth_exponent": growth_exponent,
    }
    return BoundReport(
        d=d,
        mu1_lb=evaluate(cover_mu1).bound,
        mu_k1_lb=evaluate(cover_mu_k1).bound,
        cover_mu1=cover_mu1,
        cover_mu_k1=cover_mu_k1,
        constants=constants,
    )


def theorem2_sequence(
    m_template: ModelManifold,
    i_range,
    mesh: MeshSpec = DEFAULT_MESH,
    ct_exponent: int = 2,
    growth_exponent: float = 1.0,
    min_radius: float = 1.5,
    constant_weights: bool = False,
) -> list[FillingReport]:
    """Filling sequence with slopes (1, i): the radius follows the slope's
    asymptotic growth (R_i = ln(i)/alpha, floored at ``min_radius``) and the
    first eigenvalue is bounded with the uniform section cap whenever
    |b| >= R|a| holds; rows outside the regime fall back to the raw
    single-slope bound and are flagged, not dropped.
    """
    template_tube = m_template.tubes[0]
    rows = []
    for i in i_range:
        i = int(i)
        if i < 1:
            raise ValueError(f"filling index must be >= 1, got {i}")
        R_i = max(min_radius, math.log(i) / growth_exponent)
        tube = Tube(R=R_i, l=template_tube.l, slope=FillingSlope(1, i))
        manifold = ModelManifold(m_template.thick, (tube,))
        regime_ok = abs(i) >= R_i * 1.0
        spectra, mu_tubes, mu_overlap, c_rho = _cover_pieces(
            manifold, mesh, constant_weights
        )
        if regime_ok:
            ct = manifold.thick.c_prime
        else:
            ct = section_ct_bound_single(
                1, i, R_i, manifold.thick.c_prime, mode="raw"
            ).value
        opens = (
            OpenPiece("thick", manifold.thick.mu_thick),
            OpenPiece("tubes", mu_tubes),
        )
        overlaps = (Overlap("thick", "tubes", mu_overlap),)
        cover_mu1 = CoverSpec(opens, overlaps, c_rho, ct, 0, ct_exponent)
        cover_mu_k1 = CoverSpec(
            opens, overlaps, c_rho, manifold.thick.c_prime, 1, ct_exponent
        )
        d = diameter_proxy(manifold)
        mu1 = evaluate(cover_mu1).bound
        constants = {
            "k": 1,
            "R_max": R_i,
            "slope": (1, i),
            "regime_ok": regime_ok,
            "lambda_t": (spectra[0].lambda_t,),
            "lambda_theta": (spectra[0].lambda_theta,),
            "mu_tubes": mu_tubes,
            "mu_overlap": mu_overlap,
            "c_rho": c_rho,
            "ct": ct,
            "ct_exponent": ct_exponent,
            "growth_exponent": growth_exponent,
        }
        report = BoundReport(
            d=d,
            mu1_lb=mu1,
            mu_k1_lb=evaluate(cover_mu_k1).bound,
            cover_mu1=cover_mu1,
            cover_mu_k1=cover_mu_k1,
            constants=constants,
        )
        rows.append(
            FillingReport(
                i=i,
                R=R_i,
                d=d,
                regime_ok=regime_ok,
                mu1_lb=mu1,
                normalized=mu1 * d * d,
                report=report,
            )
        )
    return rows


def scaling_fit(reports, target: str = "mu_k1") -> FitResult:
    """Least-squares scaling exponent of a sweep of bound reports.

    For ``mu_k1`` fits log(mu_k1_lb) against log(d), expecting a slope near
    -2; for ``mu1`` fits log(mu1_lb * d^4) against d, expecting a slope near
    -2k.  Needs >= 4 reports spanning a factor >= 4 in d.
    """
    reports = list(reports)
    if len(reports) < 4:
        raise ValueError(f"scaling fit needs >= 4 reports, got {len(reports)}")
    ds = np.array([r.d for r in reports])
    if ds.max() < 4.0 * ds.min():
        raise ValueError(
            f"insufficient span: d ranges over factor {ds.max() / ds.min():.2f} < 4"
        )
    if target == "mu_k1":
        x = np.log(ds)
        y = np.log(np.array([r.mu_k1_lb for r in reports]))
    elif target == "mu1":
        x = ds
        ks = {r.constants.get("k", 1) for r in reports}
        if len(ks) != 1:
            raise ValueError("mixed tube counts in one fit")
        y = np.log(np.array([r.mu1_lb for r in reports]) * ds**4)
    else:
        raise ValueError(f"unknown fit target {target!r}")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n=len(reports),
    )
