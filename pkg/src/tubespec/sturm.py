"""Weighted 1-D eigenproblems by piecewise-linear finite elements.

Solves the generalized eigenproblem associated with the quotient

    integral s(r) u'(r)^2 dr  /  integral m(r) u(r)^2 dr     on [r0, r1]

with Dirichlet or Neumann conditions at each endpoint.  Assembly produces a
symmetric tridiagonal pencil (K, M); eigenvalues are isolated by
Sturm-sequence bisection (inertia counts of K - sigma*M via tridiagonal
LDL^T) and eigenvectors recovered by inverse iteration.  Weights are only
ever evaluated at element-interior Gauss points, so endpoint zeros or poles
of s and m never get sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "MeshSpec",
    "SLProblem",
    "Tridiagonal",
    "SpectrumResult",
    "ConvergenceStudy",
    "EigensolverError",
    "assemble",
    "lowest_eigenvalues",
    "rayleigh_quotient",
    "convergence_study",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
_BCS = (DIRICHLET, NEUMANN)

# 4-point Gauss-Legendre rule on [0,1]: exact through degree 7, and all
# nodes interior, which is what keeps degenerate endpoint weights finite.
_QNODES = np.array(
    [0.06943184420297371, 0.33000947820757187, 0.6699905217924281, 0.9305681557970262]
)
_QWEIGHTS = np.array(
    [0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269]
)

_BISECT_RTOL = 1.0e-12
_RESIDUAL_TOL = 1.0e-8
_MAX_ITER = 200


class EigensolverError(RuntimeError):
    """Raised when an eigenpair fails to converge; carries the bracketing
    interval of the offending eigenvalue."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        if bracket is not None:
            message = f"{message} (bracket [{bracket[0]!r}, {bracket[1]!r}])"
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class MeshSpec:
    """Mesh description: element count and grading.

    Geometric grading puts the smallest element at the left endpoint r0 and
    lets widths grow geometrically; ``ratio`` is the end-to-end width ratio
    h_first/h_last, so refining n keeps the same limiting node distribution
    (ratio 1 recovers the uniform mesh).
    """

    n: int = 2048
    grading: str = "geometric"
    ratio: float = 0.9

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"mesh needs at least 2 elements, got {self.n}")
        if self.grading not in ("uniform", "geometric"):
            raise ValueError(f"unknown grading {self.grading!r}")
        if not 0.0 < self.ratio <= 1.0:
            raise ValueError(f"grading ratio must be in (0, 1], got {self.ratio}")

    def nodes(self, r0: float, r1: float) -> np.ndarray:
        if self.grading == "uniform" or self.ratio == 1.0:
            return np.linspace(r0, r1, self.n + 1)
        growth = self.ratio ** (-1.0 / (self.n - 1))
        widths = growth ** np.arange(self.n)
        x = np.concatenate(([0.0], np.cumsum(widths)))
        x *= (r1 - r0) / x[-1]
        x += r0
        x[-1] = r1
        return x


@dataclass(frozen=True)
class SLProblem:
    """A weighted eigenproblem on [r0, r1].

    ``s`` and ``m`` are the stiffness and mass weights; both must be positive
    at every interior quadrature point (endpoint zeros/poles are fine since
    endpoints are never sampled).
    """

    s: Callable
    m: Callable
    r0: float
    r1: float
    bc_left: str
    bc_right: str
    mesh: MeshSpec = MeshSpec()

    def __post_init__(self) -> None:
        if not self.r0 < self.r1:
            raise ValueError(f"need r0 < r1, got [{self.r0}, {self.r1}]")
        for bc in (self.bc_left, self.bc_right):
            if bc not in _BCS:
                raise ValueError(f"unknown boundary condition {bc!r}")


@dataclass(frozen=True)
class Tridiagonal:
    """Symmetric tridiagonal matrix: main diagonal and one off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        if len(self.off):
            out[:-1] += self.off * v[1:]
            out[1:] += self.off * v[:-1]
        return out

    def inf_norm(self) -> float:
        a = np.abs(self.diag).copy()
        if len(self.off):
            a[:-1] += np.abs(self.off)
            a[1:] += np.abs(self.off)
        return float(a.max()) if len(a) else 0.0


@dataclass(frozen=True)
class SpectrumResult:
    """Computed low eigenvalues of a problem, with convergence metadata."""

    eigenvalues: tuple[float, ...]
    eigenvectors: np.ndarray  # one row per eigenvalue, full nodal values
    mesh_used: MeshSpec
    residual_norms: tuple[float, ...]
    estimated_order: float | None = None


@dataclass(frozen=True)
class ConvergenceStudy:
    """Mesh-doubling study of the first eigenvalue."""

    ns: tuple[int, ...]
    eigenvalues: tuple[float, ...]
    orders: tuple[float, ...]
    estimated_order: float | None
    extrapolated: float | None
    conclusive: bool


def _quadrature(problem: SLProblem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes, and per-element weight integrals S_e ~ int_e s and the three
    mass integrals (LL, LR, RR) against the local hat functions."""
    x = problem.mesh.nodes(problem.r0, problem.r1)
    h = np.diff(x)
    pts = x[:-1, None] + h[:, None] * _QNODES[None, :]
    sv = np.asarray(problem.s(pts), dtype=float)
    mv = np.asarray(problem.m(pts), dtype=float)
    for name, vals in (("stiffness", sv), ("mass", mv)):
        if not np.all(np.isfinite(vals)):
            bad = pts[~np.isfinite(vals)][0]
            raise ValueError(f"{name} weight not finite at quadrature point r={bad}")
        if np.any(vals <= 0):
            bad = pts[vals <= 0][0]
            raise ValueError(f"{name} weight not positive at quadrature point r={bad}")
    s_int = h * (sv @ _QWEIGHTS)
    m_ll = h * (mv @ (_QWEIGHTS * (1.0 - _QNODES) ** 2))
    m_lr = h * (mv @ (_QWEIGHTS * _QNODES * (1.0 - _QNODES)))
    m_rr = h * (mv @ (_QWEIGHTS * _QNODES**2))
    return x, h, np.stack([s_int, m_ll, m_lr, m_rr])


def _assemble_full(
    problem: SLProblem,
) -> tuple[np.ndarray, Tridiagonal, Tridiagonal, float]:
    x, h, parts = _quadrature(problem)
    s_int, m_ll, m_lr, m_rr = parts
    k_el = s_int / h**2
    n = len(h)
    kd = np.zeros(n + 1)
    kd[:-1] += k_el
    kd[1:] += k_el
    ke = -k_el
    md = np.zeros(n + 1)
    md[:-1] += m_ll
    md[1:] += m_rr
    me = m_lr
    # Element pencils K_e = k_el * (1,-1)(1,-1)^T dominate the assembled one,
    # so max_e of their top generalized eigenvalue brackets the full spectrum.
    det_el = m_ll * m_rr - m_lr**2
    lam_bound = float(np.max(k_el * (m_ll + 2.0 * m_lr + m_rr) / det_el))
    return x, Tridiagonal(kd, ke), Tridiagonal(md, me), lam_bound


def _constrain(problem: SLProblem, K: Tridiagonal, M: Tridiagonal):
    """Row/column elimination of Dirichlet endpoint nodes."""
    lo = 1 if problem.bc_left == DIRICHLET else 0
    hi = -1 if problem.bc_right == DIRICHLET else None
    sl = slice(lo, hi)
    off_hi = None if hi is None else -1
    Kc = Tridiagonal(K.diag[sl], K.off[slice(lo, off_hi)])
    Mc = Tridiagonal(M.diag[sl], M.off[slice(lo, off_hi)])
    return Kc, Mc, sl


def _check_mass(M: Tridiagonal) -> None:
    """Exact positive-definiteness check: all LDL^T pivots of M positive."""
    if not (np.all(np.isfinite(M.diag)) and np.all(np.isfinite(M.off))):
        raise EigensolverError("mass matrix has non-finite entries")
    zeros = [0.0] * M.n
    negative = _sturm_count(M.diag.tolist(), M.off.tolist(), zeros, zeros[:-1], 0.0, 5e-324)
    if negative > 0:
        raise EigensolverError("mass matrix is singular or indefinite")


def assemble(problem: SLProblem) -> tuple[Tridiagonal, Tridiagonal]:
    """Assemble the constrained stiffness/mass pencil of a problem.

    Element integrals use the interior 4-point Gauss rule; Dirichlet
    conditions are imposed by eliminating the endpoint row and column.
    A singular mass matrix is reported, never regularized.
    """
    _, K, M, _ = _assemble_full(problem)
    Kc, Mc, _ = _constrain(problem, K, M)
    _check_mass(Mc)
    return Kc, Mc


def _sturm_count(kd, ke, md, me, sigma: float, pivmin: float) -> int:
    """Number of pencil eigenvalues below sigma (negative LDL^T pivots of
    K - sigma*M).  Inputs are plain Python lists for speed."""
    count = 0
    d = kd[0] - sigma * md[0]
    if abs(d) < pivmin:
        d = -pivmin
    if d < 0:
        count += 1
    for i in range(1, len(kd)):
        b = ke[i - 1] - sigma * me[i - 1]
        d = (kd[i] - sigma * md[i]) - b * b / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
    return count


class _PencilSolver:
    """Bisection + inverse iteration on a constrained tridiagonal pencil."""

    def __init__(self, K: Tridiagonal, M: Tridiagonal, lam_bound: float):
        self.K = K
        self.M = M
        self.kd = K.diag.tolist()
        self.ke = K.off.tolist()
        self.md = M.diag.tolist()
        self.me = M.off.tolist()
        self.n = K.n
        _check_mass(M)
        self.lam_max = lam_bound * (1.0 + 1.0e-8) + 1.0e-300
        self.k_norm = K.inf_norm()
        self.m_norm = M.inf_norm()
        off_scale = max(self.k_norm, self.lam_max * self.m_norm, 1.0)
        self.pivmin = 1.0e-305 * max(1.0, off_scale**2)
        lo = -1.0e-8 * self.lam_max
        while self.count(lo) > 0:
            lo *= 64.0
        self.lam_min = lo

    def count(self, sigma: float) -> int:
        return _sturm_count(self.kd, self.ke, self.md, self.me, sigma, self.pivmin)

    def bisect(self, index: int) -> tuple[float, float, float]:
        """Bracket and return the index-th (1-based) smallest eigenvalue."""
        lo, hi = self.lam_min, self.lam_max
        if self.count(hi) < index:
            raise EigensolverError(
                f"eigenvalue {index} escaped the spectral bracket", (lo, hi)
            )
        floor = self.lam_max * 1.0e-25
        for _ in range(_MAX_ITER):
            width = hi - lo
            if width <= _BISECT_RTOL * max(abs(lo), abs(hi)) or width <= floor:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.count(mid) >= index:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi), lo, hi

    def _solve_shifted(self, sigma: float, rhs: np.ndarray) -> np.ndarray:
        ab = np.zeros((3, self.n))
        ab[1] = self.K.diag - sigma * self.M.diag
        if self.n > 1:
            off = self.K.off - sigma * self.M.off
            ab[0, 1:] = off
            ab[2, :-1] = off
        return solve_banded((1, 1), ab, rhs)

    def _deflate(self, v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
        for u in basis:
            v = v - (u @ self.M.matvec(v)) * u
        return v

    def eigenvector(
        self,
        lam: float,
        bracket: tuple[float, float],
        deflate: list[np.ndarray],
    ) -> tuple[np.ndarray, float]:
        """Inverse iteration at the converged shift; returns the M-normalized
        vector and its scaled residual norm."""
        n = self.n
        v = np.sin(1.7 * np.arange(1, n + 1)) + 0.25
        v = self._deflate(v, deflate)
        v /= math.sqrt(max(v @ self.M.matvec(v), 1.0e-300))
        scale = self.k_norm + abs(lam) * self.m_norm
        sigma = lam
        residual = math.inf
        for it in range(_MAX_ITER):
            try:
                w = self._solve_shifted(sigma, self.M.matvec(v))
            except LinAlgError:
                sigma = lam - (abs(lam) + self.lam_max * 1.0e-20) * 1.0e-10 * (it + 1)
                continue
            if not np.all(np.isfinite(w)):
                sigma = lam - (abs(lam) + self.lam_max * 1.0e-20) * 1.0e-10 * (it + 1)
                continue
            w = self._deflate(w, deflate)
            mnorm2 = w @ self.M.matvec(w)
            if mnorm2 <= 0:
                sigma = lam - (abs(lam) + self.lam_max * 1.0e-20) * 1.0e-10 * (it + 1)
                continue
            v = w / math.sqrt(mnorm2)
            r = self.K.matvec(v) - lam * self.M.matvec(v)
            residual = float(np.linalg.norm(r) / (scale * np.linalg.norm(v)))
            if residual <= _RESIDUAL_TOL:
                break
        else:
            raise EigensolverError(
                f"inverse iteration did not converge (residual {residual:.3e})",
                bracket,
            )
        imax = int(np.argmax(np.abs(v)))
        if v[imax] < 0:
            v = -v
        return v, residual


def _expand(v: np.ndarray, n_nodes: int, sl: slice) -> np.ndarray:
    full = np.zeros(n_nodes)
    full[sl] = v
    return full


def lowest_eigenvalues(
    problem: SLProblem, count: int, drop_kernel: bool = False
) -> SpectrumResult:
    """Smallest ``count`` eigenvalues (and eigenvectors) of the pencil.

    With ``drop_kernel`` the zero mode of a pure-Neumann problem is skipped:
    the constant vector is deflated in the M-inner product during inverse
    iteration, which matches minimizing over additive constants in the
    quotient.  Deterministic: bisection to relative width 1e-12, fixed
    starting vectors.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    x, Kf, Mf, lam_bound = _assemble_full(problem)
    K, M, sl = _constrain(problem, Kf, Mf)
    skip = 1 if drop_kernel else 0
    if count + skip > K.n:
        raise ValueError(
            f"requested {count} eigenvalues (+{skip} kernel) of a "
            f"{K.n}-dof system"
        )
    solver = _PencilSolver(K, M, lam_bound)
    deflate: list[np.ndarray] = []
    if drop_kernel:
        ones = np.ones(K.n)
        ones /= math.sqrt(ones @ M.matvec(ones))
        deflate.append(ones)
    lams: list[float] = []
    vecs: list[np.ndarray] = []
    residuals: list[float] = []
    basis = list(deflate)
    for j in range(1 + skip, count + skip + 1):
        lam, lo, hi = solver.bisect(j)
        v, res = solver.eigenvector(lam, (lo, hi), basis)
        basis.append(v)
        lams.append(lam)
        vecs.append(_expand(v, len(x), sl))
        residuals.append(res)
    return SpectrumResult(
        eigenvalues=tuple(lams),
        eigenvectors=np.array(vecs),
        mesh_used=problem.mesh,
        residual_norms=tuple(residuals),
    )


def rayleigh_quotient(problem: SLProblem, u, center: bool = False) -> float:
    """Quotient u^T K u / u^T M u of a nodal function on the full mesh.

    With ``center`` the M-weighted mean is removed first (the optimal
    additive constant).  Dirichlet endpoint values must already vanish.
    """
    _, K, M, _ = _assemble_full(problem)
    u = np.asarray(u, dtype=float)
    if u.shape != K.diag.shape:
        raise ValueError(f"expected {K.n} nodal values, got {u.shape}")
    umax = float(np.max(np.abs(u)))
    if umax == 0.0:
        raise ValueError("zero function has no Rayleigh quotient")
    for node, bc in ((0, problem.bc_left), (-1, problem.bc_right)):
        if bc == DIRICHLET and abs(u[node]) > 1.0e-12 * umax:
            raise ValueError("function violates a Dirichlet endpoint condition")
    if center:
        ones = np.ones_like(u)
        u = u - (ones @ M.matvec(u)) / (ones @ M.matvec(ones)) * ones
    num = float(u @ K.matvec(u))
    den = float(u @ M.matvec(u))
    if den <= M.inf_norm() * umax**2 * 1.0e-28:
        raise ValueError("denominator vanishes (function is in the kernel)")
    return num / den


def convergence_study(
    problem: SLProblem, ns: Sequence[int], drop_kernel: bool = False
) -> ConvergenceStudy:
    """Observed convergence order of the first eigenvalue under mesh doubling.

    Needs at least three meshes with doubling element counts; the order is
    estimated from successive eigenvalue differences and the finest triple
    gives a Richardson-extrapolated value.  A non-monotone difference
    sequence is reported as inconclusive rather than raised.
    """
    ns = list(ns)
    if len(ns) < 3:
        raise ValueError("convergence study needs at least 3 meshes")
    for a, b in zip(ns, ns[1:]):
        if b != 2 * a:
            raise ValueError(f"mesh sequence must double: {a} -> {b}")
    lams = []
    for n in ns:
        mesh = replace(problem.mesh, n=n)
        prob = replace(problem, mesh=mesh)
        lams.append(lowest_eigenvalues(prob, 1, drop_kernel).eigenvalues[0])
    diffs = [a - b for a, b in zip(lams, lams[1:])]
    conclusive = all(d > 0 for d in diffs) and all(
        d1 > d2 for d1, d2 in zip(diffs, diffs[1:])
    )
    orders = []
    for d1, d2 in zip(diffs, diffs[1:]):
        if d1 > 0 and d2 > 0:
            orders.append(math.log2(d1 / d2))
        else:
            orders.append(math.nan)
    estimated = orders[-1] if orders and math.isfinite(orders[-1]) else None
    extrapolated = None
    if estimated is not None and estimated > 0:
        extrapolated = lams[-1] - diffs[-1] / (2.0**estimated - 1.0)
    return ConvergenceStudy(
        ns=tuple(ns),
        eigenvalues=tuple(lams),
        orders=tuple(orders),
        estimated_order=estimated,
        extrapolated=extrapolated,
        conclusive=conclusive,
    )
