"""``psdkit`` command line.

Exit codes: 0 success or true verdict, 1 false verdict, 2 usage or I/O
error, 3 numerical failure.  Reports go to stdout as JSON (or CSV for
matrix outputs with ``--format csv``); diagnostics go to stderr.  The
environment variable ``PSDKIT_TOL`` overrides the default tolerance.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from psdkit import bloch, channel, io, matcore, positivity, relax, schur, selftest, toeplitz
from psdkit.errors import (CapacityError, ConsistencyError, DomainError, NotPSDError,
                           PsdkitError, ResidualError)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_tol() -> float:
    raw = os.environ.get("PSDKIT_TOL")
    if raw is None:
        return matcore.DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"PSDKIT_TOL={raw!r} is not a number") from None
    if not value > 0:
        raise UsageError("PSDKIT_TOL must be positive")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return value


def _emit(obj, out):
    out.write(io.dumps(obj) + "\n")


def _emit_matrix(M, args, out):
    if args.format == "csv":
        out.write(io.matrix_to_csv(M))
    else:
        _emit(io.matrix_to_obj(M), out)


def _read_vector(path) -> np.ndarray:
    data = io.read_json(path)
    if isinstance(data, dict):
        data = data.get("beta", data.get("beta0"))
    v = np.asarray(data, dtype=float)
    if v.ndim != 1:
        raise DomainError("expected a JSON array of reals")
    return v


def cmd_check(args, out) -> int:
    P = io.read_matrix(args.file)
    if args.method == "all":
        verdicts = positivity.consensus(P, args.tol)
        is_psd = verdicts["p2"].is_psd
        report = {"is_psd": is_psd, "verdicts": {m: v.to_dict() for m, v in verdicts.items()}}
    else:
        v = positivity.check(P, args.method, args.tol)
        is_psd = v.is_psd
        report = {"is_psd": is_psd, "verdicts": {args.method: v.to_dict()}}
    _emit(report, out)
    return EXIT_OK if is_psd else EXIT_FALSE


def cmd_schur(args, out) -> int:
    if args.action == "extract":
        S = io.read_matrix(args.file)
        try:
            params = schur.extract(S, args.block, args.root, args.tol)
        except NotPSDError as exc:
            _emit({"is_psd": False, "error": str(exc), "witness": exc.witness}, out)
            return EXIT_FALSE
        _emit(io.params_to_obj(params), out)
        return EXIT_OK
    params = io.params_from_obj(io.read_json(args.file))
    if args.action == "reconstruct":
        _emit_matrix(schur.reconstruct(params), args, out)
        return EXIT_OK
    if args.action == "det":
        S = schur.reconstruct(params)
        _emit({"det_formula": schur.determinant_formula(params), "det_lu": matcore.det_lu(S).real}, out)
        return EXIT_OK
    verdict = schur.is_rank_one(params)
    _emit({"rank_one": verdict, "numerical_rank": matcore.numerical_rank(schur.reconstruct(params))}, out)
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_bloch(args, out) -> int:
    basis = bloch.gellmann(args.dim)
    if args.action == "to-beta":
        _emit(bloch.to_bloch(io.read_matrix(args.file), basis, args.tol).beta.tolist(), out)
        return EXIT_OK
    vec = _read_vector(args.file)
    if args.action == "from-beta":
        _emit_matrix(bloch.from_bloch(vec, basis), args, out)
        return EXIT_OK
    if args.action == "pure":
        verdict = bloch.is_pure(vec, basis)
        _emit({"pure": verdict}, out)
        return EXIT_OK if verdict else EXIT_FALSE
    rho, beta, kappa = bloch.represent_from_beta0(vec, basis, args.tol)
    _emit({
        "rho": io.matrix_to_obj(rho),
        "beta": beta.beta.tolist(),
        "kappa": kappa,
        "psd": positivity.check_p2_eigen(rho, max(args.tol, 1e-9)).is_psd,
    }, out)
    return EXIT_OK


def _choi_from_file(args) -> channel.ChoiMatrix:
    M = io.read_matrix(args.file)
    if args.din is None or args.dout is None:
        raise UsageError("--din and --dout are required for a Choi matrix input")
    return channel.ChoiMatrix(args.din, args.dout, M)


def cmd_channel(args, out) -> int:
    if args.action == "choi":
        K = io.kraus_from_obj(io.read_json(args.file))
        if (args.din, args.dout) != (None, None) and (args.din, args.dout) != (K.d_in, K.d_out):
            raise UsageError("--din/--dout disagree with the Kraus set")
        _emit_matrix(channel.choi_from_kraus(K).matrix, args, out)
        return EXIT_OK
    S = _choi_from_file(args)
    if args.action == "kraus":
        try:
            K = channel.kraus_from_choi(S, args.tol)
        except NotPSDError as exc:
            _emit({"cp": False, "error": str(exc), "witness": exc.witness}, out)
            return EXIT_FALSE
        _emit(io.kraus_to_obj(K), out)
        return EXIT_OK
    report = channel.verdicts(S, args.tol)
    _emit(report, out)
    return EXIT_OK if report["cp"]["is_psd"] else EXIT_FALSE


def cmd_toeplitz(args, out) -> int:
    M = io.read_matrix(args.file)
    if args.action == "ppt":
        v = toeplitz.ppt_verdict(M, args.d1, args.d2, args.tol)
        _emit({"ppt": v.is_psd, "verdict": v.to_dict()}, out)
        return EXIT_OK if v.is_psd else EXIT_FALSE
    groups = M.shape[0] // args.block
    ok = toeplitz.param_transpose_check(M, args.block)
    _emit({
        "toeplitz": toeplitz.is_toeplitz(M, 1),
        "block_toeplitz": toeplitz.is_toeplitz(M, args.block),
        "permutation_identity": toeplitz.pt_identity_check(M, args.block),
        "param_transpose": ok,
        "ppt": toeplitz.ppt_verdict(M, groups, args.block, args.tol).is_psd,
    }, out)
    return EXIT_OK if ok else EXIT_FALSE


def _rates_matrix(value, N: int, symmetric: bool) -> np.ndarray:
    if value is None:
        return np.zeros((N, N))
    if isinstance(value, dict):
        if symmetric:
            return relax.symmetric_from_pairs(value, N)
        M = np.zeros((N, N))
        for key, rate in value.items():
            k, n = relax._pair(key, N)
            M[k, n] = float(rate)
        return M
    return np.asarray(value, dtype=float)


def cmd_relax(args, out) -> int:
    data = io.read_json(args.rates)
    if args.action == "check4":
        if "Gamma_d" not in data:
            raise DomainError("rates file needs a 'Gamma_d' object")
        report = relax.cp_constraints_n4(data["Gamma_d"], args.tol)
        _emit(report.to_dict(), out)
        return EXIT_OK if report.verdict else EXIT_FALSE
    N = args.levels
    rates = relax.RelaxationRates(
        N,
        _rates_matrix(data.get("gamma"), N, symmetric=False),
        _rates_matrix(data.get("Gamma_p"), N, symmetric=True),
        _rates_matrix(data.get("Gamma_d"), N, symmetric=True),
    )
    _emit_matrix(relax.build_LD(rates), args, out)
    return EXIT_OK


def cmd_selftest(args, out) -> int:
    report = selftest.run(args.seed)
    _emit(report, out)
    return EXIT_OK if report["pass"] else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=None,
                        help="tolerance (default 1e-10, or $PSDKIT_TOL)")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format for matrix results")

    parser = _Parser(prog="psdkit", description="Positive-matrix parametrizations and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="positivity verdict for a Hermitian matrix")
    p.add_argument("file")
    p.add_argument("--method", choices=(*positivity.METHODS, "all"), default="p2")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("schur", parents=[common], help="Schur-Constantinescu parameters")
    p.add_argument("action", choices=("extract", "reconstruct", "det", "rankone"))
    p.add_argument("file")
    p.add_argument("--block", type=int, default=1)
    p.add_argument("--root", choices=schur.ROOT_CHOICES, default="sqrt")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("bloch", parents=[common], help="Bloch vectors in the Gell-Mann basis")
    p.add_argument("action", choices=("to-beta", "from-beta", "pure", "represent"))
    p.add_argument("file")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("channel", parents=[common], help="Choi and Kraus representations")
    p.add_argument("action", choices=("choi", "kraus", "verdicts"))
    p.add_argument("file")
    p.add_argument("--din", type=int)
    p.add_argument("--dout", type=int)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("toeplitz", parents=[common], help="Toeplitz PPT checks")
    p.add_argument("action", choices=("ppt", "ptcheck"))
    p.add_argument("file")
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--block", type=int)
    p.set_defaults(func=cmd_toeplitz)

    p = sub.add_parser("relax", parents=[common], help="relaxation-rate constraints")
    p.add_argument("action", choices=("check4", "ld"))
    p.add_argument("--rates", required=True)
    p.add_argument("--levels", type=int, default=4)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("selftest", parents=[common], help="seeded randomized invariant suite")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_selftest)
    return parser


def _validate(args):
    if args.command == "toeplitz":
        if args.action == "ppt" and (args.d1 is None or args.d2 is None):
            raise UsageError("toeplitz ppt needs --d1 and --d2")
        if args.action == "ptcheck" and args.block is None:
            raise UsageError("toeplitz ptcheck needs --block")
    if getattr(args, "block", None) is not None and args.block < 1:
        raise UsageError("--block must be positive")
    if args.command == "bloch" and args.dim < 2:
        raise UsageError("--dim must be at least 2")


def dispatch(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        if args.tol is None:
            args.tol = _default_tol()
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"psdkit: usage error: {exc}\n")
        return EXIT_USAGE
    except (OSError, DomainError, CapacityError) as exc:
        err.write(f"psdkit: error: {exc}\n")
        return EXIT_USAGE
    except NotPSDError as exc:
        err.write(f"psdkit: {exc}\n")
        return EXIT_FALSE
    except (ResidualError, ConsistencyError, PsdkitError, np.linalg.LinAlgError) as exc:
        err.write(f"psdkit: numerical failure: {exc}\n")
        return EXIT_NUMERIC


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
