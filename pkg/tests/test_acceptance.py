"""Acceptance gate: the library's exit criteria, one test per criterion.

Every test prints a single ``ACCEPTANCE n: PASS`` line with the measured
worst-case quantity (run pytest with ``-s`` to see them).  Tolerances are
fixed here, not configurable.
"""

import json
import time

import numpy as np
import pytest

import vinberg_cones as vc
from vinberg_cones import cli
from vinberg_cones.cubics import DEGENERATE, INDEFINITE, PD

from _support import (
    fd_hessian_log,
    max_block_error,
    project_to_level_set,
    random_orbit_point,
    rank2_cone,
    rank2_diagonal_hessian,
    rank3_cone,
    rank3_diagonal_hessian,
    rel_to_scale,
    triangular_scale,
)

SEED = 20260809

ALL_CONES = [
    ("rank2 dim_w=1", rank2_cone(1)),
    ("rank2 dim_w=4", rank2_cone(4)),
    ("rank2 dim_w=9", rank2_cone(9)),
    ("rank3 dim_v=1", rank3_cone(1)),
    ("rank3 dim_v=2", rank3_cone(2)),
    ("rank3 dim_v=4", rank3_cone(4)),
    ("rank3 dim_v=8", rank3_cone(8)),
]


def _sample(cone, rng):
    return vc.random_triangular(cone.algebra, rng, diag_range=(0.5, 2.0), off_range=(-1.0, 1.0))


def test_criterion_1_roundtrip_decomposition():
    t0 = time.time()
    worst = 0.0
    for _, cone in ALL_CONES:
        rng = np.random.default_rng(SEED)
        for _ in range(1000):
            A = _sample(cone, rng)
            got = vc.group_coordinates(cone, vc.herm_from_triangular(A)).element
            worst = max(worst, max_block_error(got, A) / triangular_scale(A))
    elapsed = time.time() - t0
    assert worst <= 1e-9
    assert elapsed < 30.0
    print(f"\nACCEPTANCE 1: PASS roundtrip decomposition, max rel err {worst:.3e}, {elapsed:.1f}s")


def test_criterion_2_squared_diagonal_identity():
    worst = 0.0
    for _, cone in ALL_CONES:
        rng = np.random.default_rng(SEED)
        m = cone.rank
        for _ in range(1000):
            A = _sample(cone, rng)
            X = vc.herm_from_triangular(A)
            ps = vc.p_polynomials(cone, X)
            for i in range(m):
                denom = float(np.prod(ps[i + 1 :])) if i + 1 < m else 1.0
                worst = max(worst, abs(A.diag[i] ** 2 * denom - ps[i]) / abs(ps[i]))
    assert worst <= 1e-10
    print(f"\nACCEPTANCE 2: PASS diagonal-coordinate identity, max rel err {worst:.3e}")


def test_criterion_3_determinant_factorization():
    worst = 0.0
    for _, cone in ALL_CONES:
        rng = np.random.default_rng(SEED)
        for _ in range(1000):
            A = _sample(cone, rng)
            X = vc.herm_from_triangular(A)
            expect = float(np.prod(A.diag)) ** 2
            got = vc.g_determinant_sq(cone, X)
            worst = max(worst, abs(got - expect) / expect)
    assert worst <= 1e-10
    print(f"\nACCEPTANCE 3: PASS squared G-determinant factorization, max rel err {worst:.3e}")


def test_criterion_4_clifford_isometry():
    worst = 0.0
    for dim_v in range(1, 9):
        module = vc.build_clifford_module(dim_v)
        worst = max(worst, vc.verify_isometry(module, 1000, seed=SEED))
    assert worst <= 1e-12
    print(f"\nACCEPTANCE 4: PASS Clifford isometry dims 1-8, max deviation {worst:.3e}")


HESSIAN_CONFIGS = [
    (rank2_cone(1), ("rank2", -1.0)),
    (rank2_cone(4), ("rank2", 0.5)),
    (rank2_cone(9), ("rank2", 2.0)),
    (rank3_cone(1), ("rank3", 0.0, 0.0)),
    (rank3_cone(4), ("rank3", 0.5, -0.25)),
    (rank3_cone(8), ("rank3", -0.5, 0.0)),
]


def _make_cubic(cone, cfg):
    if cfg[0] == "rank2":
        return vc.InvariantCubic.rank2_family(cone, cfg[1])
    return vc.InvariantCubic.rank3_family(cone, cfg[1], cfg[2])


def test_criterion_5_hessian_oracles():
    worst_fd = 0.0
    worst_closed = 0.0
    for cone, cfg in HESSIAN_CONFIGS:
        q = _make_cubic(cone, cfg)
        rng = np.random.default_rng(SEED)
        checked = 0
        while checked < 50:
            X = random_orbit_point(cone, rng)
            if vc.eval_cubic(q, X) <= 1e-6:
                continue
            X = project_to_level_set(q, X)
            worst_fd = max(worst_fd, rel_to_scale(vc.hessian_log(q, X), fd_hessian_log(q, X)))
            checked += 1
        for _ in range(50):
            if cone.rank == 2:
                x2 = float(rng.uniform(0.2, 3.0))
                x1 = (1.0 - q.eps * x2**3) / x2**2
                if x1 <= 0.0:
                    continue
                M = vc.hessian_log(q, vc.HermMatrix(cone.algebra, [x1, x2], {}))
                want = rank2_diagonal_hessian(q, x1, x2)
            else:
                e1, e2 = q.eps12
                x2, x3 = rng.uniform(0.3, 2.5, 2)
                x1 = (1.0 - e1 * x2 * x3**2 - e2 * x3**3) / (x2 * x3)
                if x1 <= 0.0:
                    continue
                M = vc.hessian_log(q, vc.HermMatrix(cone.algebra, [x1, x2, x3], {}))
                want = rank3_diagonal_hessian(q, x1, x2, x3)
            worst_closed = max(worst_closed, rel_to_scale(M, want))
    assert worst_fd <= 1e-5
    assert worst_closed <= 1e-10
    print(
        f"\nACCEPTANCE 5: PASS Hessian oracles, finite differences {worst_fd:.3e}, "
        f"closed forms {worst_closed:.3e}"
    )


def test_criterion_6_rank2_admissible_family():
    worst_margin = np.inf
    for dim_w in (1, 4, 9):
        cone = rank2_cone(dim_w)
        for eps in (-1.0, -0.1, 0.0, 0.5, 2.0):
            q = vc.InvariantCubic.rank2_family(cone, eps)
            rep = vc.admissibility_on_diagonal(q, vc.DiagonalGrid(n=100))
            assert rep.all_pd, f"dim_w={dim_w} eps={eps} not PD at {rep.witnesses[:1]}"
            assert rep.checked == 100
            assert rep.min_minor > 1e-10  # scale of the rescaled form is O(1)
            worst_margin = min(worst_margin, rep.min_minor)
    print(f"\nACCEPTANCE 6: PASS rank-2 cubics PD on diagonal, smallest minor {worst_margin:.3e}")


def test_criterion_7_rank3_admissibility():
    t0 = time.time()
    # (a) eps2 = 0: all-PD over a 30x30 grid
    for dim_v in (1, 4, 8):
        cone = rank3_cone(dim_v)
        for eps1 in (-2.0, -0.5, 0.0, 0.5, 2.0):
            q = vc.InvariantCubic.rank3_family(cone, eps1, 0.0)
            rep = vc.admissibility_on_diagonal(q, vc.DiagonalGrid(n=30))
            assert rep.all_pd, f"dim_v={dim_v} eps1={eps1}: {rep.witnesses[:1]}"
    # (b) eps2 > 0: a violating witness with x3 <= 1e3 (slope-constraint
    # breach or an indefinite restricted form)
    for dim_v in (1, 4, 8):
        cone = rank3_cone(dim_v)
        for eps2 in (0.1, 1.0):
            q = vc.InvariantCubic.rank3_family(cone, 0.0, eps2)
            rep = vc.admissibility_on_diagonal(q, vc.DiagonalGrid(n=30))
            assert not rep.all_pd
            ok = [
                w
                for w in rep.witnesses
                if w.coords[2] <= 1e3 and w.kind in ("constraint", INDEFINITE, DEGENERATE)
            ]
            assert ok, f"dim_v={dim_v} eps2={eps2}: no witness"
    # (c) eps2 < 0 with eps1 = |eps2|: a PD witness exists
    for dim_v in (1, 4, 8):
        cone = rank3_cone(dim_v)
        for eps2 in (-0.25, -1.0):
            q = vc.InvariantCubic.rank3_family(cone, abs(eps2), eps2)
            rep = vc.find_locally_admissible_point(q)
            assert rep is not None and rep.verdict == PD
    elapsed = time.time() - t0
    assert elapsed < 120.0
    print(f"\nACCEPTANCE 7: PASS rank-3 admissibility classification, {elapsed:.1f}s")


def test_criterion_8_duality():
    worst_routes = 0.0
    for dim_v in (2, 4, 8):
        cone = rank3_cone(dim_v)
        rng = np.random.default_rng(SEED)
        for _ in range(500):
            Y = vc.herm_from_triangular_star(_sample(cone, rng))
            direct = vc.d_prime(cone, Y)
            routed = vc.d_prime_via_dual(cone, Y)
            worst_routes = max(worst_routes, abs(direct - routed) / abs(direct))
    assert worst_routes <= 1e-10

    worst_pairing = np.inf
    for name, cone in ALL_CONES:
        rng = np.random.default_rng(SEED)
        for _ in range(1000):
            X = vc.herm_from_triangular(_sample(cone, rng))
            Y = vc.herm_from_triangular_star(_sample(cone, rng))
            worst_pairing = min(worst_pairing, vc.herm_pairing(X, Y))
    assert worst_pairing > 0.0

    cone = rank3_cone(1)  # dim V = dim S0 = dim S1 = 1: self-adjoint
    rng = np.random.default_rng(SEED)
    worst_selfadj = 0.0
    for _ in range(500):
        X = vc.herm_from_triangular(_sample(cone, rng))
        worst_selfadj = max(worst_selfadj, abs(vc.d_prime(cone, X) - vc.det_cubic(cone, X)))
    assert worst_selfadj <= 1e-12
    print(
        f"\nACCEPTANCE 8: PASS duality, route gap {worst_routes:.3e}, "
        f"min pairing {worst_pairing:.3e}, self-adjoint gap {worst_selfadj:.3e}"
    )


def test_criterion_9_degenerate_cubics_never_pd():
    cone2 = rank2_cone(4)
    q = vc.InvariantCubic(cone2, (1.0, 0.0))  # q = x2^3
    rep = vc.admissibility_on_diagonal(q, vc.DiagonalGrid(n=50))
    assert not rep.all_pd
    assert len(rep.witnesses) == rep.checked
    assert all(w.kind in (DEGENERATE, INDEFINITE) for w in rep.witnesses)

    count = 0
    for dim_v in (1, 4):
        cone3 = rank3_cone(dim_v)
        for coeffs in ((0.0, 1.0, 0.0), (0.0, 1.0, 0.5), (0.0, 1.0, -0.5)):
            q = vc.InvariantCubic(cone3, coeffs)
            rep = vc.admissibility_on_diagonal(q, vc.DiagonalGrid(n=8))
            assert not rep.all_pd
            assert len(rep.witnesses) == rep.checked
            assert all(w.kind in (DEGENERATE, INDEFINITE) for w in rep.witnesses)
            count += rep.checked
    print(f"\nACCEPTANCE 9: PASS degenerate cubics never positive-definite ({count} rank-3 points)")


def test_criterion_10_cli_determinism(tmp_path):
    t0 = time.time()
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"rank": 3, "dim_v": 1, "multiplicity": 1}))
    args = [
        "scan",
        "--spec",
        str(spec),
        "--eps1=-1:1:0.5",
        "--eps2=-0.5:0.5:0.25",
        "--grid",
        "8",
    ]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(out1)]) == 0
    assert cli.main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()

    rc = cli.main(["selftest", "--spec", str(spec), "--seed", "1"])
    assert rc == 0
    spec8 = tmp_path / "spec8.json"
    spec8.write_text(json.dumps({"rank": 3, "dim_v": 8, "multiplicity": 1}))
    rc = cli.main(["selftest", "--spec", str(spec8), "--seed", "1"])
    assert rc == 0
    elapsed = time.time() - t0
    assert elapsed < 120.0
    print(f"\nACCEPTANCE 10: PASS scan byte-determinism and selftest, {elapsed:.1f}s")
