"""Invariant cubic polynomials and admissibility of their Hessian metrics.

A cubic q on the Hermitian space is invariant under the unipotent group
(unit-diagonal triangular elements) iff it is a combination of

    rank 2:  x2^3           and  x2 * p1
    rank 3:  d (det cubic),      p2 * p3,      p3^3

The Hessian form g(q) = -Hess(log q) restricted to the tangent space of the
level hypersurface {q = 1} is positive definite exactly for the admissible
cubics; by invariance this can be decided on the diagonal slice.  Everything
here works on flattened coordinate vectors laid out as
[diag entries | block (1,2) | block (1,3) | block (2,3)].
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .cone import ConeDescriptor, _require_euclidean
from .errors import AlgebraMismatchError, OutsideConeError, SpecError
from .nilalgebra import HermMatrix, herm_from_vector

MINOR_BAND = 1e-12  # minors within +/- band*scale count as degenerate

PD = "positive-definite"
INDEFINITE = "indefinite"
DEGENERATE = "degenerate"


# ---------------------------------------------------------------------------
# Invariant cubics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InvariantCubic:
    """Coefficients of an invariant cubic.

    rank 2: coeffs = (a, b) for q = a x2^3 + b x2 p1.
    rank 3: coeffs = (a, b, c) for q = a d + b p2 p3 + c p3^3.
    """

    cone: ConeDescriptor
    coeffs: tuple[float, ...]

    def __post_init__(self):
        want = 2 if self.cone.rank == 2 else 3
        if len(self.coeffs) != want:
            raise SpecError(f"rank-{self.cone.rank} cubic needs {want} coefficients")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def rank2_family(cls, cone: ConeDescriptor, eps: float) -> "InvariantCubic":
        """Normalized family q = x2 p1 + eps x2^3."""
        if cone.rank != 2:
            raise SpecError("rank2_family needs a rank-2 cone")
        return cls(cone, (eps, 1.0))

    @classmethod
    def rank3_family(cls, cone: ConeDescriptor, eps1: float, eps2: float) -> "InvariantCubic":
        """Normalized family q = d + eps1 p2 p3 + eps2 p3^3."""
        if cone.rank != 3:
            raise SpecError("rank3_family needs a rank-3 cone")
        return cls(cone, (1.0, eps1, eps2))

    @property
    def normalizable(self) -> bool:
        """Whether the cubic lies in the normalized one/two-parameter family
        (leading coefficient nonzero)."""
        return (self.coeffs[1] != 0.0) if self.cone.rank == 2 else (self.coeffs[0] != 0.0)

    @property
    def eps(self) -> float:
        if self.cone.rank != 2 or not self.normalizable:
            raise SpecError("eps defined for normalizable rank-2 cubics")
        return self.coeffs[0] / self.coeffs[1]

    @property
    def eps12(self) -> tuple[float, float]:
        if self.cone.rank != 3 or not self.normalizable:
            raise SpecError("eps12 defined for normalizable rank-3 cubics")
        a, b, c = self.coeffs
        return (b / a, c / a)


def _layout(cone: ConeDescriptor):
    alg = cone.algebra
    m = alg.rank
    slices = {"diag": slice(0, m)}
    pos = m
    for key in alg.offdiag_keys:
        d = alg.dim(key)
        slices[key] = slice(pos, pos + d)
        pos += d
    return slices


def _check_cubic_point(q: InvariantCubic, X: HermMatrix) -> None:
    if X.algebra is not q.cone.algebra:
        raise AlgebraMismatchError("point does not live over the cubic's algebra")


def eval_cubic(q: InvariantCubic, X: HermMatrix) -> float:
    """Exact polynomial evaluation; homogeneous of degree 3."""
    _check_cubic_point(q, X)
    alg = q.cone.algebra
    if q.cone.rank == 2:
        a, b = q.coeffs
        x1, x2 = X.diag
        p1 = x1 * x2 - alg.norm_sq((1, 2), X.offdiag[(1, 2)])
        return a * x2**3 + b * x2 * p1
    a, b, c = q.coeffs
    x1, x2, x3 = X.diag
    s0, s1, v = X.offdiag[(1, 2)], X.offdiag[(1, 3)], X.offdiag[(2, 3)]
    d = (
        x1 * x2 * x3
        - x3 * alg.norm_sq((1, 2), s0)
        - x2 * alg.norm_sq((1, 3), s1)
        - x1 * alg.norm_sq((2, 3), v)
        + 2.0 * alg.ip((1, 3), alg.mult(s0, v), s1)
    )
    p2p3 = x3 * (x2 * x3 - alg.norm_sq((2, 3), v))
    return a * d + b * p2p3 + c * x3**3


def gradient(q: InvariantCubic, X: HermMatrix) -> np.ndarray:
    """Gradient of q in flat coordinates (closed-form polynomials)."""
    _check_cubic_point(q, X)
    alg = q.cone.algebra
    lay = _layout(q.cone)
    g = np.zeros(q.cone.dim_herm)
    if q.cone.rank == 2:
        a, b = q.coeffs
        x1, x2 = X.diag
        w = X.offdiag[(1, 2)]
        gw = alg.spaces[(1, 2)].gram @ w
        g[0] = b * x2**2
        g[1] = 3.0 * a * x2**2 + 2.0 * b * x1 * x2 - b * (w @ gw)
        g[lay[(1, 2)]] = -2.0 * b * x2 * gw
        return g
    a, b, c = q.coeffs
    x1, x2, x3 = X.diag
    s0, s1, v = X.offdiag[(1, 2)], X.offdiag[(1, 3)], X.offdiag[(2, 3)]
    g0, g1, gv = (alg.spaces[k].gram for k in ((1, 2), (1, 3), (2, 3)))
    g0s0, g1s1, gvv = g0 @ s0, g1 @ s1, gv @ v
    n0, n1, nv = s0 @ g0s0, s1 @ g1s1, v @ gvv
    mu_s0_v = alg.mult(s0, v)
    g[0] = a * (x2 * x3 - nv)
    g[1] = a * (x1 * x3 - n1) + b * x3**2
    g[2] = a * (x1 * x2 - n0) + 2.0 * b * x2 * x3 - b * nv + 3.0 * c * x3**2
    # <s0 . v, s1> differentiated in each slot
    g[lay[(1, 2)]] = -2.0 * a * x3 * g0s0 + 2.0 * a * np.einsum(
        "kia,k,a->i", alg.product, g1s1, v
    )
    g[lay[(1, 3)]] = -2.0 * a * x2 * g1s1 + 2.0 * a * (g1 @ mu_s0_v)
    g[lay[(2, 3)]] = (
        -2.0 * (a * x1 + b * x3) * gvv
        + 2.0 * a * np.einsum("kia,k,i->a", alg.product, g1s1, s0)
    )
    return g


def cubic_hessian(q: InvariantCubic, X: HermMatrix) -> np.ndarray:
    """Hessian of q in flat coordinates (constant + linear polynomial entries)."""
    _check_cubic_point(q, X)
    alg = q.cone.algebra
    lay = _layout(q.cone)
    n = q.cone.dim_herm
    H = np.zeros((n, n))
    if q.cone.rank == 2:
        a, b = q.coeffs
        x1, x2 = X.diag
        w = X.offdiag[(1, 2)]
        G = alg.spaces[(1, 2)].gram
        gw = G @ w
        H[0, 1] = H[1, 0] = 2.0 * b * x2
        H[1, 1] = 6.0 * a * x2 + 2.0 * b * x1
        H[1, lay[(1, 2)]] = -2.0 * b * gw
        H[lay[(1, 2)], 1] = -2.0 * b * gw
        H[lay[(1, 2)], lay[(1, 2)]] = -2.0 * b * x2 * G
        return H
    a, b, c = q.coeffs
    x1, x2, x3 = X.diag
    s0, s1, v = X.offdiag[(1, 2)], X.offdiag[(1, 3)], X.offdiag[(2, 3)]
    G0, G1, GV = (alg.spaces[k].gram for k in ((1, 2), (1, 3), (2, 3)))
    s0sl, s1sl, vsl = lay[(1, 2)], lay[(1, 3)], lay[(2, 3)]
    H[0, 1] = H[1, 0] = a * x3
    H[0, 2] = H[2, 0] = a * x2
    H[1, 2] = H[2, 1] = a * x1 + 2.0 * b * x3
    H[2, 2] = 2.0 * b * x2 + 6.0 * c * x3
    H[0, vsl] = H[vsl, 0] = -2.0 * a * (GV @ v)
    H[1, s1sl] = H[s1sl, 1] = -2.0 * a * (G1 @ s1)
    H[2, s0sl] = H[s0sl, 2] = -2.0 * a * (G0 @ s0)
    H[2, vsl] = H[vsl, 2] = -2.0 * b * (GV @ v)
    H[s0sl, s0sl] = -2.0 * a * x3 * G0
    H[s1sl, s1sl] = -2.0 * a * x2 * G1
    H[vsl, vsl] = -2.0 * (a * x1 + b * x3) * GV
    # cross blocks from 2 <s0 . v, s1>
    mu_v = np.einsum("kia,a->ki", alg.product, v)  # S0 -> S1
    blk_01 = 2.0 * a * (mu_v.T @ G1)  # d(s0) d(s1)
    H[s0sl, s1sl] = blk_01
    H[s1sl, s0sl] = blk_01.T
    blk_0v = 2.0 * a * np.einsum("kia,k->ia", alg.product, G1 @ s1)  # d(s0) d(v)
    H[s0sl, vsl] = blk_0v
    H[vsl, s0sl] = blk_0v.T
    blk_1v = 2.0 * a * (G1 @ np.einsum("kia,i->ka", alg.product, s0))  # d(s1) d(v)
    H[s1sl, vsl] = blk_1v
    H[vsl, s1sl] = blk_1v.T
    return H


def hessian_log(q: InvariantCubic, X: HermMatrix) -> np.ndarray:
    """-Hess(log q) at X, assembled exactly as (grad q grad q^T - q Hess q) / q^2."""
    qx = eval_cubic(q, X)
    if qx == 0.0:
        raise OutsideConeError("log q singular: q(X) = 0")
    g = gradient(q, X)
    H = cubic_hessian(q, X)
    return (np.outer(g, g) - qx * H) / qx**2


# ---------------------------------------------------------------------------
# Tangent restriction and the verdict
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HessianReport:
    """Restriction of -Hess(log q) to the tangent space of {q = 1} at a point."""

    point: HermMatrix
    hessian: np.ndarray
    tangent_basis: np.ndarray  # (n, n-1), orthonormal columns spanning ker dq
    restricted: np.ndarray
    verdict: str
    leading_minors: np.ndarray

    @property
    def min_minor(self) -> float:
        return float(np.min(self.leading_minors)) if self.leading_minors.size else math.nan


def _leading_minors(R: np.ndarray) -> np.ndarray:
    return np.array([np.linalg.det(R[: k + 1, : k + 1]) for k in range(R.shape[0])])


def _verdict_from_minors(minors: np.ndarray, scale: float) -> str:
    if scale == 0.0:
        return DEGENERATE
    band = MINOR_BAND * scale
    if np.any(np.abs(minors) <= band):
        return DEGENERATE
    if np.all(minors > band):
        return PD
    return INDEFINITE


def tangent_restriction(q: InvariantCubic, X: HermMatrix) -> HessianReport:
    """Project X onto {q = 1} (requires q(X) > 0), restrict -Hess(log q) to
    an orthonormal basis of ker dq, and classify by leading principal minors.

    The minors are taken after a diagonal (Jacobi) rescaling of the
    restricted form; the rescaling is a congruence, so the sign pattern and
    the verdict agree with those of the raw form while staying meaningful
    across the huge entry scales that extreme slice points produce.
    """
    _require_euclidean(q.cone)
    qx = eval_cubic(q, X)
    if qx <= 0.0:
        raise OutsideConeError("projection onto the level set requires q(X) > 0")
    if abs(qx - 1.0) > 1e-9:
        X = herm_from_vector(q.cone.algebra, X.to_vector() / qx ** (1.0 / 3.0))
    M = hessian_log(q, X)
    g = gradient(q, X)
    gnorm = float(np.linalg.norm(g))
    n = q.cone.dim_herm
    if gnorm <= 1e-300:
        return HessianReport(
            X, M, np.zeros((n, 0)), np.zeros((0, 0)), DEGENERATE, np.array([])
        )
    # coordinate-adapted orthonormal complement of the gradient: project the
    # axes off u and drop the one most aligned with it (keeps the restricted
    # form near-block-diagonal, so the minors stay well scaled)
    u = g / gnorm
    keep = [i for i in range(n) if i != int(np.argmax(np.abs(u)))]
    basis, _ = np.linalg.qr(np.eye(n)[:, keep] - np.outer(u, u[keep]))
    R = basis.T @ M @ basis
    R = 0.5 * (R + R.T)
    d = np.sqrt(np.abs(np.diag(R)))
    d[d == 0.0] = 1.0
    Rn = R / np.outer(d, d)
    minors = _leading_minors(Rn)
    scale = float(np.max(np.abs(Rn)))
    return HessianReport(X, M, basis, R, _verdict_from_minors(minors, scale), minors)


# ---------------------------------------------------------------------------
# Diagonal-slice sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalGrid:
    """Log-uniform sampling of the free diagonal coordinates of {q = 1}."""

    lo: float = 1e-2
    hi: float = 1e2
    n: int = 100
    boundary_probes: bool = True
    probe_max: float = 1e3


@dataclass(frozen=True)
class DiagonalWitness:
    coords: tuple[float, ...]  # full diagonal (x1, x2[, x3])
    kind: str  # "constraint" | "indefinite" | "degenerate"
    min_minor: float


@dataclass(frozen=True)
class DiagonalReport:
    all_pd: bool
    checked: int
    witnesses: tuple[DiagonalWitness, ...]
    min_minor: float
    min_minor_coords: tuple[float, ...]


def _rank2_slice_points(q: InvariantCubic, grid: DiagonalGrid):
    a, b = q.coeffs
    pts = []
    if b == 0.0:
        if a <= 0.0:
            return pts
        x2 = (1.0 / a) ** (1.0 / 3.0)
        for x1 in np.geomspace(grid.lo, grid.hi, grid.n):
            pts.append((float(x1), float(x2)))
        return pts
    hi = grid.hi
    if b > 0.0 and a > 0.0:
        # x1 > 0 bounds the slice: respace inside the feasible range
        hi = min(hi, 0.999 * a ** (-1.0 / 3.0))
    for x2 in np.geomspace(grid.lo, hi, grid.n):
        x1 = (1.0 - a * x2**3) / (b * x2**2)
        if x1 > 0.0:
            pts.append((float(x1), float(x2)))
    return pts


def _rank3_x3_values(q: InvariantCubic, x2: float, grid: DiagonalGrid) -> list[float]:
    a, b, c = q.coeffs
    vals = list(np.geomspace(grid.lo, grid.hi, grid.n))
    if grid.boundary_probes and a > 0.0 and c > 0.0:
        # feasibility boundary in x3: largest positive root of c t^3 + b x2 t^2 = a-scaled 1
        roots = np.roots([c, b * x2, 0.0, -1.0])
        real = [r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 0.0]
        if real:
            t = max(real)
            vals.extend(t * (1.0 - d) for d in (1e-1, 1e-2, 1e-3, 1e-4))
        # coarse large-x3 probes (relevant when b < 0 allows feasible large x3)
        vals.extend(np.geomspace(grid.hi, grid.probe_max, 8))
    return sorted(set(float(t) for t in vals if t <= grid.probe_max))


def _rank3_slice_points(q: InvariantCubic, grid: DiagonalGrid):
    a, b, c = q.coeffs
    xs = np.geomspace(grid.lo, grid.hi, grid.n)
    pts = []
    if a == 0.0:
        # q has no x1 dependence; the slice is swept by (x1, x3)
        if b == 0.0:
            if c <= 0.0:
                return pts
            x3 = (1.0 / c) ** (1.0 / 3.0)
            return [(float(x1), float(x2), float(x3)) for x1 in xs for x2 in xs]
        for x3 in xs:
            x2 = (1.0 - c * x3**3) / (b * x3**2)
            if x2 <= 0.0:
                continue
            for x1 in xs:
                pts.append((float(x1), float(x2), float(x3)))
        return pts
    for x2 in xs:
        for x3 in _rank3_x3_values(q, float(x2), grid):
            x1 = (1.0 - b * x2 * x3**2 - c * x3**3) / (a * x2 * x3)
            if x1 > 0.0:
                pts.append((float(x1), float(x2), float(x3)))
    return pts


def _diag_point(q: InvariantCubic, coords) -> HermMatrix:
    return HermMatrix(q.cone.algebra, np.asarray(coords, dtype=float), {})


def _constraint_violated(q: InvariantCubic, coords) -> bool:
    """Sign of the vector-block diagonal of -Hess(log q): a x1 + b x3 <= 0
    forces a non-positive tangent direction (rank 3 only)."""
    if q.cone.rank != 3:
        return False
    a, b, _ = q.coeffs
    return a * coords[0] + b * coords[2] <= 0.0


def admissibility_on_diagonal(q: InvariantCubic, grid: DiagonalGrid | None = None) -> DiagonalReport:
    """Sweep the diagonal slice of {q = 1}; admissibility of an invariant
    cubic reduces to positive definiteness there."""
    _require_euclidean(q.cone)
    grid = grid or DiagonalGrid()
    pts = _rank2_slice_points(q, grid) if q.cone.rank == 2 else _rank3_slice_points(q, grid)
    if not pts:
        raise OutsideConeError("empty feasible diagonal grid")
    witnesses: list[DiagonalWitness] = []
    min_minor = math.inf
    min_coords = pts[0]
    for coords in pts:
        if _constraint_violated(q, coords):
            witnesses.append(DiagonalWitness(coords, "constraint", math.nan))
            continue
        rep = tangent_restriction(q, _diag_point(q, coords))
        mm = rep.min_minor
        if mm < min_minor:
            min_minor, min_coords = mm, coords
        if rep.verdict != PD:
            witnesses.append(DiagonalWitness(coords, rep.verdict, mm))
    return DiagonalReport(
        all_pd=not witnesses,
        checked=len(pts),
        witnesses=tuple(witnesses),
        min_minor=min_minor,
        min_minor_coords=tuple(min_coords),
    )


@dataclass(frozen=True)
class SearchGrid:
    lo: float = 0.1
    hi: float = 10.0
    n: int = 20


def find_locally_admissible_point(q: InvariantCubic, search: SearchGrid | None = None):
    """Deterministic grid search over the diagonal slice; returns the first
    point with a positive-definite restricted Hessian, or None."""
    _require_euclidean(q.cone)
    if q.cone.rank != 3:
        raise SpecError("local-admissibility search is for rank-3 cones")
    search = search or SearchGrid()
    a, b, c = q.coeffs
    if a == 0.0:
        return None
    xs = np.geomspace(search.lo, search.hi, search.n)
    for x2 in xs:
        for x3 in xs:
            x1 = (1.0 - b * x2 * x3**2 - c * x3**3) / (a * x2 * x3)
            if x1 <= 0.0:
                continue
            coords = (float(x1), float(x2), float(x3))
            if _constraint_violated(q, coords):
                continue
            rep = tangent_restriction(q, _diag_point(q, coords))
            if rep.verdict == PD:
                return rep
    return None


# ---------------------------------------------------------------------------
# Parameter-plane scan
# ---------------------------------------------------------------------------

ADMISSIBLE_ON_SAMPLE = "admissible-on-sample"
LOCALLY_ADMISSIBLE = "locally-admissible"
NOT_ADMISSIBLE = "not-admissible"


@dataclass(frozen=True)
class ScanCell:
    eps1: float
    eps2: float
    classification: str
    witness_x2: float
    witness_x3: float
    min_minor: float


def scan_parameter_plane(
    cone: ConeDescriptor,
    eps1_values,
    eps2_values,
    grid: DiagonalGrid | None = None,
    search: SearchGrid | None = None,
) -> list[ScanCell]:
    """Classify each (eps1, eps2) cell of the normalized rank-3 family by a
    diagonal sweep, falling back to a local-witness search.  Deterministic:
    rows ordered by the input value order."""
    if cone.rank != 3:
        raise SpecError("parameter-plane scan is for rank-3 cones")
    _require_euclidean(cone)
    rows = []
    for e1 in eps1_values:
        for e2 in eps2_values:
            q = InvariantCubic.rank3_family(cone, float(e1), float(e2))
            rep = admissibility_on_diagonal(q, grid)
            if rep.all_pd:
                rows.append(
                    ScanCell(
                        float(e1),
                        float(e2),
                        ADMISSIBLE_ON_SAMPLE,
                        rep.min_minor_coords[1],
                        rep.min_minor_coords[2],
                        rep.min_minor,
                    )
                )
                continue
            # a positive p3^3 coefficient breaks the slope constraint at large
            # x3, so such cells can never be admissible; PD islands at small
            # x3 do not upgrade them
            breached = float(e2) > 0.0 or any(w.kind == "constraint" for w in rep.witnesses)
            local = None if breached else find_locally_admissible_point(q, search)
            if local is not None:
                d = local.point.diag
                rows.append(
                    ScanCell(float(e1), float(e2), LOCALLY_ADMISSIBLE, d[1], d[2], local.min_minor)
                )
                continue
            w = rep.witnesses[0]
            rows.append(
                ScanCell(float(e1), float(e2), NOT_ADMISSIBLE, w.coords[1], w.coords[2], w.min_minor)
            )
    return rows


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def scan_to_csv(rows: list[ScanCell], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps1", "eps2", "classification", "witness_x2", "witness_x3", "min_minor"])
        for r in rows:
            writer.writerow(
                [
                    _fmt17(r.eps1),
                    _fmt17(r.eps2),
                    r.classification,
                    _fmt17(r.witness_x2),
                    _fmt17(r.witness_x3),
                    _fmt17(r.min_minor),
                ]
            )


# ---------------------------------------------------------------------------
# Degree bookkeeping for unimodular-invariant cubics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnimodularCubicReport:
    rank: int
    pi_sq_degree: int
    cubic_exists: bool
    description: str


def no_g0_cubic_check(cone: ConeDescriptor) -> UnimodularCubicReport:
    """Invariants of the unimodular subgroup are generated by the squared
    G-determinant, so a degree-3 invariant polynomial exists iff
    deg(pi^2) divides 3."""
    if cone.rank == 2:
        return UnimodularCubicReport(
            2, 2, False, "none exists: pi^2 has degree 2, which does not divide 3"
        )
    return UnimodularCubicReport(
        3, 3, True, "unique up to scale: the determinant cubic d"
    )
