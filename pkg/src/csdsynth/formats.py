"""
Text serialisation of circuits and matrices.

Circuits use either a qasm-like line format::

    qubits 2
    rz(0.5) q[1];
    cx q[0], q[1];
    gphase(0.25);

or JSON ``{"n": 2, "gates": [{"kind": "rz", "qubit": 1, "angle": 0.5}, ...]}``.
Wire indices are 0-based in both (wire = qubit - 1). Angles are written with
17 significant digits so parsing restores the exact doubles.

Matrices use ``dim d`` followed by ``d`` rows of ``re,im`` tokens, or JSON
``{"dim": d, "re": [[...]], "im": [[...]]}``.
"""
import json
import re

import numpy as np

from .circuit import Circuit, Cnot, GlobalPhase, Rot
from .exceptions import CircuitSyntaxError, IndexOutOfRangeError, UnknownGateError

FORMATS = ("qasm", "json")

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?(?:inf|nan)"
_HEADER = re.compile(r"qubits\s+(\d+)\s*$")
_CX = re.compile(r"cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\]\s*;\s*$")
_ROT = re.compile(r"(ry|rz)\s*\(\s*(" + _NUM + r")\s*\)\s*q\[(\d+)\]\s*;\s*$")
_GPHASE = re.compile(r"gphase\s*\(\s*(" + _NUM + r")\s*\)\s*;\s*$")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def format_real(x):
    """Shortest-safe decimal with 17 significant digits."""
    return format(float(x), ".17g")


def _strip_comment(line):
    i = line.find("#")
    return line if i < 0 else line[:i]


def looks_like_json(text):
    return text.lstrip().startswith("{")


# ---- circuits ------------------------------------------------------------

def emit_qasm(circuit):
    lines = [f"qubits {circuit.n}"]
    for g in circuit.gates:
        if isinstance(g, Cnot):
            lines.append(f"cx q[{g.control - 1}], q[{g.target - 1}];")
        elif isinstance(g, Rot):
            lines.append(f"r{g.axis.lower()}({format_real(g.angle)}) q[{g.qubit - 1}];")
        else:
            lines.append(f"gphase({format_real(g.angle)});")
    return "\n".join(lines) + "\n"


def emit_json(circuit):
    gates = []
    for g in circuit.gates:
        if isinstance(g, Cnot):
            gates.append({"kind": "cx", "control": g.control - 1, "target": g.target - 1})
        elif isinstance(g, Rot):
            gates.append({"kind": "r" + g.axis.lower(), "qubit": g.qubit - 1, "angle": float(g.angle)})
        else:
            gates.append({"kind": "gphase", "angle": float(g.angle)})
    return json.dumps({"n": circuit.n, "gates": gates}, indent=1) + "\n"


def emit_text(circuit, fmt="qasm"):
    """Serialise ``circuit`` as ``"qasm"`` or ``"json"`` text."""
    if fmt == "qasm":
        return emit_qasm(circuit)
    if fmt == "json":
        return emit_json(circuit)
    raise ValueError(f"unknown circuit format {fmt!r}")


def _wire(text, n, line, column):
    w = int(text)
    if not 0 <= w < n:
        raise IndexOutOfRangeError(f"line {line}, column {column}: wire {w} outside 0..{n - 1}")
    return w + 1


def _column_of(raw, body):
    return len(raw) - len(raw.lstrip()) + 1 if body else 1


def parse_qasm(text):
    n = None
    gates = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        body = _strip_comment(raw).strip()
        if not body:
            continue
        col = _column_of(raw, body)
        if n is None:
            m = _HEADER.match(body)
            if not m:
                raise CircuitSyntaxError("expected header 'qubits <n>'", lineno, col)
            n = int(m.group(1))
            if n < 1:
                raise CircuitSyntaxError("qubit count must be positive", lineno, col)
            continue
        if m := _CX.match(body):
            c = _wire(m.group(1), n, lineno, col)
            t = _wire(m.group(2), n, lineno, col)
            if c == t:
                raise CircuitSyntaxError("cx control equals target", lineno, col)
            gates.append(Cnot(c, t))
        elif m := _ROT.match(body):
            gates.append(Rot(m.group(1)[1].upper(), _wire(m.group(3), n, lineno, col), _angle(m.group(2), lineno, col)))
        elif m := _GPHASE.match(body):
            gates.append(GlobalPhase(_angle(m.group(1), lineno, col)))
        else:
            word = _WORD.match(body)
            if word and word.group(0) not in ("cx", "ry", "rz", "gphase", "qubits"):
                raise UnknownGateError(f"unknown gate {word.group(0)!r}", lineno, col)
            raise CircuitSyntaxError(f"cannot parse {body!r}", lineno, col)
    if n is None:
        raise CircuitSyntaxError("missing header 'qubits <n>'", 1, 1)
    return _build(n, gates)


def _angle(text, line, column):
    x = float(text)
    if not np.isfinite(x):
        raise CircuitSyntaxError(f"angle {text} is not finite", line, column)
    return x


def _build(n, gates):
    try:
        return Circuit(n, gates)
    except IndexOutOfRangeError:
        raise
    except ValueError as exc:
        raise CircuitSyntaxError(str(exc), 1, 1) from exc


def _json_error(exc):
    return CircuitSyntaxError(exc.msg, exc.lineno, exc.colno)


def parse_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _json_error(exc) from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("n"), int) or not isinstance(obj.get("gates"), list):
        raise CircuitSyntaxError("expected an object with integer 'n' and list 'gates'", 1, 1)
    n = obj["n"]
    if n < 1:
        raise CircuitSyntaxError("qubit count must be positive", 1, 1)
    gates = []
    for i, g in enumerate(obj["gates"]):
        # there is no line information once decoded; report the gate index
        where = i + 1
        if not isinstance(g, dict) or "kind" not in g:
            raise CircuitSyntaxError(f"gate {i} is not an object with 'kind'", where, 1)
        kind = g["kind"]
        try:
            if kind == "cx":
                c = _json_wire(g["control"], n, where)
                t = _json_wire(g["target"], n, where)
                if c == t:
                    raise CircuitSyntaxError("cx control equals target", where, 1)
                gates.append(Cnot(c, t))
            elif kind in ("ry", "rz"):
                gates.append(Rot(kind[1].upper(), _json_wire(g["qubit"], n, where), _json_angle(g["angle"], where)))
            elif kind == "gphase":
                gates.append(GlobalPhase(_json_angle(g["angle"], where)))
            else:
                raise UnknownGateError(f"unknown gate kind {kind!r}", where, 1)
        except KeyError as exc:
            raise CircuitSyntaxError(f"gate {i} lacks field {exc.args[0]!r}", where, 1) from exc
    return _build(n, gates)


def _json_wire(w, n, where):
    if not isinstance(w, int) or isinstance(w, bool):
        raise CircuitSyntaxError(f"wire {w!r} is not an integer", where, 1)
    if not 0 <= w < n:
        raise IndexOutOfRangeError(f"gate {where}: wire {w} outside 0..{n - 1}")
    return w + 1


def _json_angle(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
        raise CircuitSyntaxError(f"angle {x!r} is not a finite number", where, 1)
    return float(x)


def parse_text(text, fmt=None):
    """Inverse of :func:`emit_text`; ``fmt=None`` detects JSON by a leading ``{``."""
    if fmt is None:
        fmt = "json" if looks_like_json(text) else "qasm"
    if fmt == "qasm":
        return parse_qasm(text)
    if fmt == "json":
        return parse_json(text)
    raise ValueError(f"unknown circuit format {fmt!r}")


# ---- matrices ------------------------------------------------------------

class MatrixFormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def emit_matrix(m, fmt="text"):
    m = np.asarray(m, dtype=np.complex128)
    if fmt == "json":
        obj = {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}
        return json.dumps(obj) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown matrix format {fmt!r}")
    lines = [f"dim {m.shape[0]}"]
    for row in m:
        lines.append(" ".join(f"{format_real(z.real)},{format_real(z.imag)}" for z in row))
    return "\n".join(lines) + "\n"


def _parse_complex(token, lineno):
    parts = token.split(",")
    if len(parts) != 2:
        raise MatrixFormatError(f"expected 're,im', got {token!r}", lineno)
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise MatrixFormatError(f"bad number in {token!r}", lineno) from None


def parse_matrix(text):
    """Parse the text or JSON matrix format into a square complex array."""
    if looks_like_json(text):
        try:
            obj = json.loads(text)
            d = int(obj["dim"])
            m = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MatrixFormatError(f"bad JSON matrix: {exc}") from exc
        if m.shape != (d, d):
            raise MatrixFormatError(f"declared dim {d} but arrays have shape {m.shape}")
        return m
    d = None
    rows = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        body = _strip_comment(raw).strip()
        if not body:
            continue
        if d is None:
            head = body.split()
            if len(head) != 2 or head[0] != "dim" or not head[1].isdigit() or int(head[1]) < 1:
                raise MatrixFormatError("expected header 'dim <d>'", lineno)
            d = int(head[1])
            continue
        row = [_parse_complex(tok, lineno) for tok in body.split()]
        if len(row) != d:
            raise MatrixFormatError(f"expected {d} entries, got {len(row)}", lineno)
        rows.append(row)
    if d is None:
        raise MatrixFormatError("empty matrix file")
    if len(rows) != d:
        raise MatrixFormatError(f"expected {d} rows, got {len(rows)}")
    return np.array(rows, dtype=np.complex128)


def parse_phases(text):
    """Phase list for diagonal synthesis: whitespace-separated reals or a JSON array."""
    s = text.strip()
    try:
        if s.startswith("[") or s.startswith("{"):
            obj = json.loads(s)
            if isinstance(obj, dict):
                obj = obj["phases"]
            v = np.array(obj, dtype=float)
        else:
            v = np.array([float(t) for line in text.split("\n") for t in _strip_comment(line).split()], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"bad phase list: {exc}") from exc
    if v.ndim != 1 or v.size == 0:
        raise MatrixFormatError("phase list must be a non-empty flat list")
    return v
