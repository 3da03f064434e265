"""Batch command-line front end.

Subcommands: build a cone from a JSON spec, evaluate invariants on a point,
scan the invariant-cubic parameter plane to CSV, and run the self-test
suite.  Exit codes: 0 success, 1 invariant/domain failure, 2 usage or parse
error, 3 unsupported configuration.  Identical inputs produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import cone as cone_mod
from . import cubics as cubics_mod
from .clifford import (
    CliffordModule,
    MetricSpace,
    build_clifford_module,
    clifford_bilinear,
    clifford_mult,
    verify_isometry,
)
from .errors import IndefiniteSignatureError, OutsideConeError, SpecError, VinbergError
from .nilalgebra import (
    anti_transpose,
    herm_from_json,
    herm_from_triangular,
    herm_from_triangular_star,
    herm_from_vector,
    herm_pairing,
    random_triangular,
    rank2_algebra,
    rank3_special,
    triangular_product,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3

_SPEC_KEYS = {
    2: {"rank", "dim_w", "signature", "seed"},
    3: {"rank", "dim_v", "multiplicity", "mult", "signature", "seed"},
}


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, str):
        return json.dumps(x)
    if x is None:
        return "null"
    if isinstance(x, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items())
        return "{" + items + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x)}")


def dumps17(obj) -> str:
    """JSON with floats rendered at 17 significant digits."""
    return _fmt(obj)


class _CorruptGamma:
    """Test hook: returns a copy of a module with one gamma entry bumped."""

    @staticmethod
    def apply(module: CliffordModule) -> CliffordModule:
        gam = np.array(module.gammas, dtype=np.int64)
        gam[0, 0, 0] += 1
        return CliffordModule(
            module.v_space,
            module.s0_space,
            module.s1_space,
            gam,
            multiplicity=module.multiplicity,
        )


def parse_spec(obj: dict):
    """Validate a cone spec and build the descriptor. Unknown keys rejected."""
    if not isinstance(obj, dict):
        raise SpecError("spec must be a JSON object")
    rank = obj.get("rank")
    if rank not in (2, 3):
        raise SpecError("spec needs rank 2 or 3")
    unknown = set(obj) - _SPEC_KEYS[rank]
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    try:
        seed = int(obj.get("seed", 0))
        sig = obj.get("signature")
        if rank == 2:
            if "dim_w" not in obj:
                raise SpecError("rank-2 spec needs dim_w")
            dim_w = int(obj["dim_w"])
            space = MetricSpace.canonical(*sig) if sig else MetricSpace.euclidean(dim_w)
            if space.dim != dim_w:
                raise SpecError("signature inconsistent with dim_w")
            algebra = rank2_algebra(space)
            module = None
        else:
            if "dim_v" not in obj:
                raise SpecError("rank-3 spec needs dim_v")
            if "multiplicity" in obj and "mult" in obj:
                raise SpecError("give either multiplicity or mult, not both")
            dim_v = int(obj["dim_v"])
            mult = int(obj.get("multiplicity", obj.get("mult", 1)))
            signature = tuple(int(x) for x in sig) if sig else None
            module = build_clifford_module(dim_v, signature, mult)
            algebra = rank3_special(module)
    except SpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad spec value: {exc}") from exc
    return cone_mod.cone_from_algebra(algebra), module, seed


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read JSON from {path}: {exc}") from exc


def _parse_range(text: str) -> list[float]:
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise SpecError(f"range must be LO:HI:STEP, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise SpecError(f"bad range {text!r}")
    n = int(round((hi - lo) / step)) + 1
    return [lo + k * step for k in range(n)]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_build(args) -> int:
    cone, module, _ = parse_spec(_load_json(args.spec))
    alg = cone.algebra
    out = {
        "rank": cone.rank,
        "dim_herm": cone.dim_herm,
        "block_dims": {f"{i}{j}": alg.dim((i, j)) for (i, j) in alg.offdiag_keys},
        "exponents": [float(e) for e in cone.exponents],
        "euclidean": alg.is_euclidean,
    }
    if module is not None:
        out["dim_s"] = module.dim_s
    print(dumps17(out))
    return EXIT_OK


_EVAL_OPS = ("p", "d", "dprime", "chi", "membership", "decompose")


def cmd_eval(args) -> int:
    cone, _, _ = parse_spec(_load_json(args.spec))
    if args.op not in _EVAL_OPS:
        print(f"unknown op {args.op!r}; choose from {_EVAL_OPS}", file=sys.stderr)
        return EXIT_USAGE
    X = herm_from_json(cone.algebra, _load_json(args.point))
    result: dict = {"op": args.op}
    if args.op == "p":
        result["p"] = list(cone_mod.p_polynomials(cone, X))
    elif args.op == "d":
        result["d"] = cone_mod.det_cubic(cone, X)
    elif args.op == "dprime":
        result["dprime"] = cone_mod.d_prime(cone, X)
    elif args.op == "chi":
        result["chi"] = cone_mod.characteristic_function(cone, X)
    elif args.op == "membership":
        result["member"] = cone_mod.membership(cone, X)
    else:
        gc = cone_mod.group_coordinates(cone, X)
        A = gc.element
        result["diag"] = list(A.diag)
        result["offdiag"] = {f"{i}{j}": list(A.offdiag[(i, j)]) for (i, j) in cone.algebra.offdiag_keys}
        result["residual"] = gc.max_residual
    print(dumps17(result))
    return EXIT_OK


def cmd_scan(args) -> int:
    cone, _, _ = parse_spec(_load_json(args.spec))
    if cone.rank != 3:
        print("scan requires a rank-3 cone", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if not cone.is_euclidean:
        print("scan requires a Euclidean cone", file=sys.stderr)
        return EXIT_UNSUPPORTED
    eps1 = _parse_range(args.eps1)
    eps2 = _parse_range(args.eps2)
    grid = cubics_mod.DiagonalGrid(n=args.grid)
    search = cubics_mod.SearchGrid(n=max(8, args.grid))
    rows = cubics_mod.scan_parameter_plane(cone, eps1, eps2, grid, search)
    cubics_mod.scan_to_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


# -- selftest ----------------------------------------------------------------


def _invariant_suite(cone, module, seed: int):
    """Yield (name, residual, threshold) triples for every library invariant."""
    rng = np.random.default_rng(seed)
    alg = cone.algebra
    n_round = 200

    if module is not None:
        yield "clifford-isometry", verify_isometry(module, 1000, seed), 1e-12
        worst = 0.0
        g0, g1, gv = module.s0_space.gram, module.s1_space.gram, module.v_space.gram
        gam = np.asarray(module.gammas, dtype=float)
        for a in range(module.dim_v):
            for b in range(module.dim_v):
                lhs = gam[a].T @ g1 @ gam[b] + gam[b].T @ g1 @ gam[a]
                worst = max(worst, float(np.max(np.abs(lhs - 2.0 * gv[a, b] * g0))))
        yield "clifford-polarized-relation", worst, 1e-12
        worst = 0.0
        for _ in range(50):
            s1 = rng.uniform(-1, 1, module.dim_s)
            s0 = rng.uniform(-1, 1, module.dim_s)
            out = clifford_bilinear(module, s1, s0)
            for a in range(module.dim_v):
                e = np.zeros(module.dim_v)
                e[a] = 1.0
                lhs = module.v_space.ip(out, e)
                rhs = module.s1_space.ip(s1, clifford_mult(module, e, s0))
                worst = max(worst, abs(lhs - rhs))
        yield "clifford-adjunction", worst, 1e-12

    worst = 0.0
    for _ in range(50):
        A, B, C = (random_triangular(alg, rng) for _ in range(3))
        left = triangular_product(triangular_product(A, B), C)
        right = triangular_product(A, triangular_product(B, C))
        worst = max(
            worst,
            float(np.max(np.abs(left.diag - right.diag))),
            max(
                float(np.max(np.abs(left.offdiag[k] - right.offdiag[k])))
                for k in alg.offdiag_keys
            ),
        )
    yield "triangular-associativity", worst, 1e-12

    samples = [random_triangular(alg, rng) for _ in range(n_round)]
    worst_rt = worst_eq = worst_det = 0.0
    for A in samples:
        X = herm_from_triangular(A)
        gc = cone_mod.group_coordinates(cone, X)
        R = gc.element
        scale = max(1.0, float(np.max(np.abs(A.diag))))
        err = float(np.max(np.abs(R.diag - A.diag))) / scale
        for k in alg.offdiag_keys:
            err = max(err, float(np.max(np.abs(R.offdiag[k] - A.offdiag[k]), initial=0.0)) / scale)
        worst_rt = max(worst_rt, err)
        ps = cone_mod.p_polynomials(cone, X)
        m = cone.rank
        for i in range(m):
            denom = float(np.prod(ps[i + 1 :])) if i + 1 < m else 1.0
            lhs = R.diag[i] ** 2 * denom
            worst_eq = max(worst_eq, abs(lhs - ps[i]) / abs(ps[i]))
        det = cone_mod.g_determinant_sq(cone, X)
        expect = float(np.prod(A.diag)) ** 2
        worst_det = max(worst_det, abs(det - expect) / expect)
    yield "decomposition-roundtrip", worst_rt, 1e-9
    yield "diag-coordinate-identity", worst_eq, 1e-10
    yield "determinant-factorization", worst_det, 1e-10

    worst_p = worst_chi = 0.0
    for _ in range(100):
        U = random_triangular(alg, rng)
        U = type(U)(alg, np.ones(alg.rank), U.offdiag)  # unit diagonal
        B = random_triangular(alg, rng)
        X = herm_from_triangular(triangular_product(U, B))
        Y = herm_from_triangular(B)
        for px, py in zip(cone_mod.p_polynomials(cone, X), cone_mod.p_polynomials(cone, Y)):
            worst_p = max(worst_p, abs(px - py) / abs(py))
        cx = cone_mod.characteristic_function(cone, X)
        cy = cone_mod.characteristic_function(cone, Y)
        worst_chi = max(worst_chi, abs(cx - cy) / abs(cy))
    yield "unipotent-invariance-p", worst_p, 1e-9
    yield "unipotent-invariance-chi", worst_chi, 1e-9

    if cone.rank == 3:
        worst = 0.0
        for _ in range(n_round):
            A = random_triangular(alg, rng)
            Y = herm_from_triangular_star(A)
            direct = cone_mod.d_prime(cone, Y)
            via = cone_mod.d_prime_via_dual(cone, Y)
            expect = float(np.prod(A.diag)) ** 2
            worst = max(worst, abs(direct - via) / abs(expect), abs(direct - expect) / expect)
        yield "dual-determinant-two-routes", worst, 1e-10

        worst_pair = -np.inf
        for _ in range(300):
            X = herm_from_triangular(random_triangular(alg, rng))
            Y = herm_from_triangular_star(random_triangular(alg, rng))
            worst_pair = max(worst_pair, -herm_pairing(X, Y))
        yield "dual-pairing-positivity", worst_pair, 0.0

    X = herm_from_triangular(random_triangular(alg, rng))
    back = anti_transpose(anti_transpose(X))
    worst = float(np.max(np.abs(back.to_vector() - X.to_vector())))
    yield "anti-transpose-involution", worst, 1e-15

    if cone.is_euclidean:
        if cone.rank == 2:
            cubs = [cubics_mod.InvariantCubic.rank2_family(cone, e) for e in (0.0, 0.5)]
        else:
            cubs = [
                cubics_mod.InvariantCubic.rank3_family(cone, 0.0, 0.0),
                cubics_mod.InvariantCubic.rank3_family(cone, 0.5, -0.25),
            ]
        worst = 0.0
        for q in cubs:
            for _ in range(5):
                X = herm_from_triangular(random_triangular(alg, rng))
                qx = cubics_mod.eval_cubic(q, X)
                if qx <= 1e-6:
                    continue
                X = herm_from_vector(alg, X.to_vector() / qx ** (1.0 / 3.0))
                M = cubics_mod.hessian_log(q, X)
                fd = _fd_hessian_log(q, X)
                scale = float(np.max(np.abs(M)))
                worst = max(worst, float(np.max(np.abs(M - fd))) / scale)
        yield "hessian-log-vs-finite-differences", worst, 1e-5


def _fd_hessian_log(q, X, h: float = 1e-5) -> np.ndarray:
    x0 = X.to_vector()
    alg = q.cone.algebra

    def f(z):
        return -np.log(cubics_mod.eval_cubic(q, herm_from_vector(alg, z)))

    n = x0.size
    H = np.zeros((n, n))
    f0 = f(x0)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        H[i, i] = (f(x0 + ei) - 2.0 * f0 + f(x0 - ei)) / h**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            val = (f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)) / (
                4.0 * h**2
            )
            H[i, j] = H[j, i] = val
    return H


def cmd_selftest(args) -> int:
    spec = _load_json(args.spec) if args.spec else {"rank": 3, "dim_v": 1, "multiplicity": 1}
    cone, module, spec_seed = parse_spec(spec)
    seed = args.seed if args.seed is not None else spec_seed
    if args.corrupt_gamma:
        if module is None:
            print("corrupt-gamma requires a rank-3 spec", file=sys.stderr)
            return EXIT_UNSUPPORTED
        module = _CorruptGamma.apply(module)
        cone = cone_mod.cone_from_algebra(rank3_special(module))
    failures = 0
    for name, residual, threshold in _invariant_suite(cone, module, seed):
        ok = residual <= threshold
        failures += 0 if ok else 1
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: residual={_fmt(residual)} threshold={_fmt(threshold)}")
    print(f"selftest {'passed' if failures == 0 else 'FAILED'} ({failures} failing invariants)")
    return EXIT_OK if failures == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vinberg-cones", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="print the cone descriptor for a spec")
    b.add_argument("--spec", required=True)
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("eval", help="evaluate an invariant at a point")
    e.add_argument("--spec", required=True)
    e.add_argument("--op", required=True)
    e.add_argument("point", help="JSON file with the Hermitian matrix")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("scan", help="classify the invariant-cubic parameter plane")
    s.add_argument("--spec", required=True)
    s.add_argument("--eps1", required=True, help="LO:HI:STEP")
    s.add_argument("--eps2", required=True, help="LO:HI:STEP")
    s.add_argument("--grid", type=int, default=12)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("selftest", help="run the invariant suite")
    t.add_argument("--spec")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--corrupt-gamma", action="store_true", help="negative control")
    t.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IndefiniteSignatureError as exc:
        print(f"unsupported configuration: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (OutsideConeError, VinbergError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
