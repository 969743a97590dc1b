"""
Command-line frontend.

    csdsynth synth matrix.txt --out circuit.qasm
    csdsynth random 3 --seed 7 > u.txt
    csdsynth verify circuit.qasm u.txt
    csdsynth counts 2 3 4
    csdsynth simulate circuit.qasm

Exit codes: 0 success, 2 parse or argument error, 3 input not unitary,
4 verification failure, 5 width mismatch.
"""
import argparse
import sys

from .circuit import reconstruct
from .exceptions import (
    CircuitSyntaxError,
    IndexOutOfRangeError,
    NotPowerOfTwoError,
    NotSquareError,
    NotUnitaryError,
    ReconstructionFailure,
    ShapeMismatchError,
)
from .formats import MatrixFormatError, emit_matrix, emit_text, parse_matrix, parse_phases, parse_text
from .matcore import frobenius_distance, haar_random_unitary
from .synth import cnot_lower_bound, expected_cnot_count, expected_one_qubit_count, synthesize, synthesize_diagonal

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_UNITARY = 3
EXIT_VERIFY = 4
EXIT_WIDTH = 5

DEFAULT_TOL = 1e-8
MAX_RANDOM_QUBITS = 10


class CliError(Exception):
    def __init__(self, message, code):
        self.code = code
        super().__init__(message)


def _read(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from exc


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_matrix(path):
    try:
        return parse_matrix(_read(path))
    except MatrixFormatError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


def _load_circuit(path):
    try:
        return parse_text(_read(path))
    except (CircuitSyntaxError, IndexOutOfRangeError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


def cmd_synth(args):
    try:
        if args.diagonal:
            phases = parse_phases(_read(args.input))
            circuit, report = synthesize_diagonal(phases, prune_zero=args.prune_zero, verify=args.verify)
        else:
            u = _load_matrix(args.input)
            circuit, report = synthesize(
                u, mirror=args.mirror, prune_zero=args.prune_zero, verify=args.verify, tol=args.tol
            )
    except MatrixFormatError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_PARSE) from exc
    except (NotSquareError, NotPowerOfTwoError) as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_PARSE) from exc
    except NotUnitaryError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_NOT_UNITARY) from exc
    except ReconstructionFailure as exc:
        raise CliError(f"decomposition failed: {exc}", EXIT_VERIFY) from exc
    except ValueError as exc:
        # non-finite entries and similar malformed input
        raise CliError(f"{args.input}: {exc}", EXIT_PARSE) from exc

    _write(args.out, emit_text(circuit, args.format))
    # keep stdout clean for the circuit when it goes there
    stream = sys.stdout if args.out not in (None, "-") else sys.stderr
    stream.write(report.format())
    if args.verify and not report.reconstruction_error <= args.tol:
        print(f"verification failed: error {report.reconstruction_error:.3e} > tol {args.tol:.1e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_random(args):
    if not 1 <= args.n <= MAX_RANDOM_QUBITS:
        raise CliError(f"n must be in 1..{MAX_RANDOM_QUBITS}, got {args.n}", EXIT_PARSE)
    if args.seed < 0:
        raise CliError("seed must be non-negative", EXIT_PARSE)
    u = haar_random_unitary(args.n, args.seed)
    _write(args.out, emit_matrix(u.matrix, args.format))
    return EXIT_OK


def cmd_verify(args):
    circuit = _load_circuit(args.circuit)
    m = _load_matrix(args.matrix)
    if m.shape[0] != 1 << circuit.n:
        raise CliError(
            f"circuit acts on {circuit.n} qubits (dim {1 << circuit.n}) but the matrix has dim {m.shape[0]}",
            EXIT_WIDTH,
        )
    err = frobenius_distance(reconstruct(circuit), m)
    print(f"frobenius_error={err:.3e}")
    return EXIT_OK if err <= args.tol else EXIT_VERIFY


def cmd_counts(args):
    for n in args.n:
        if n < 1:
            raise CliError(f"n must be positive, got {n}", EXIT_PARSE)
    for n in args.n:
        cnot = expected_cnot_count(n) if n >= 2 else 0
        print(f"n={n} cnot={cnot} one_qubit={expected_one_qubit_count(n)} lower_bound={cnot_lower_bound(n)}")
    return EXIT_OK


def cmd_simulate(args):
    circuit = _load_circuit(args.circuit)
    _write(args.out, emit_matrix(reconstruct(circuit).matrix, args.format))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="csdsynth", description="Synthesize CNOT/Ry/Rz circuits for unitary matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a circuit for a matrix file ('-' for stdin)")
    s.add_argument("input")
    s.add_argument("--out", help="circuit output path; the report then goes to stdout")
    s.add_argument("--format", choices=("qasm", "json"), default="qasm")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL, help="unitarity and verification tolerance")
    s.add_argument("--no-mirror", dest="mirror", action="store_false")
    s.add_argument("--prune-zero", action="store_true")
    s.add_argument("--no-verify", dest="verify", action="store_false")
    s.add_argument("--diagonal", action="store_true", help="input is a list of 2^n phases")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("random", help="Haar-random unitary in the matrix text format")
    r.add_argument("n", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--out")
    r.set_defaults(func=cmd_random)

    v = sub.add_parser("verify", help="compare a circuit against a matrix")
    v.add_argument("circuit")
    v.add_argument("matrix")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counts", help="closed-form gate counts and the CNOT lower bound")
    c.add_argument("n", type=int, nargs="+")
    c.set_defaults(func=cmd_counts)

    m = sub.add_parser("simulate", help="matrix of a circuit")
    m.add_argument("circuit")
    m.add_argument("--format", choices=("text", "json"), default="text")
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except CliError as exc:
        print(f"csdsynth: error: {exc}", file=sys.stderr)
        return exc.code
    except ShapeMismatchError as exc:
        print(f"csdsynth: error: {exc}", file=sys.stderr)
        return EXIT_WIDTH


if __name__ == "__main__":
    sys.exit(main())
