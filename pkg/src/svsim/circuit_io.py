"""Text format for circuits.

A circuit file is UTF-8 text, one statement per line. ``#`` starts a
comment (whole-line or trailing), blank lines are skipped. The first
statement must be ``qubits <n>``. After that, each line is one gate:

    x 0                 named single-qubit gate on target 0 (i, x, y, z, h)
    u 1 <8 reals>       arbitrary 2x2 gate: re/im pairs of q11 q12 q21 q22
    cx 0 2              controlled named gate: control 0, target 2
    cu 0 2 <8 reals>    controlled arbitrary gate

Indices are validated against the declared qubit count at parse time, and
every error carries the 1-based line number it came from.
"""

from __future__ import annotations

from .core import Circuit, Gate2x2, GateOp, is_unitary, standard_gate
from .errors import ParseError, ValidationError

UNITARY_TOL = 1e-10

STANDARD_NAMES = ("i", "x", "y", "z", "h")

# reverse table for the formatter, keyed on exact entry values
_NAMED = {
    tuple(
        complex(z) for z in standard_gate(name).matrix.ravel()
    ): name
    for name in STANDARD_NAMES
}


def _parse_int(tok: str, what: str, lineno: int) -> int:
    try:
        return int(tok, 10)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def _parse_reals(toks: list[str], lineno: int) -> Gate2x2:
    vals = []
    for tok in toks:
        try:
            vals.append(float(tok))
        except ValueError:
            raise ParseError(f"bad real number {tok!r}", lineno) from None
    g = Gate2x2(
        complex(vals[0], vals[1]),
        complex(vals[2], vals[3]),
        complex(vals[4], vals[5]),
        complex(vals[6], vals[7]),
    )
    if not is_unitary(g, UNITARY_TOL):
        raise ParseError("gate matrix is not unitary", lineno)
    return g


def _check_index(idx: int, n: int, what: str, lineno: int) -> int:
    if not 0 <= idx < n:
        raise ParseError(f"{what} {idx} out of range for {n} qubits", lineno)
    return idx


def parse_circuit(text: str) -> Circuit:
    """Parse circuit-file text into a Circuit.

    Raises ParseError with the offending line number on any problem.
    """
    n: int | None = None
    ops: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if n is None:
            if toks[0] != "qubits":
                raise ParseError(
                    f"expected 'qubits <n>' header, got {toks[0]!r}", lineno
                )
            if len(toks) != 2:
                raise ParseError("'qubits' takes exactly one argument", lineno)
            n = _parse_int(toks[1], "qubit count", lineno)
            if n < 1:
                raise ParseError(f"qubit count must be >= 1, got {n}", lineno)
            continue

        name = toks[0]
        if name in STANDARD_NAMES:
            if len(toks) != 2:
                raise ParseError(f"'{name}' takes exactly one target index", lineno)
            t = _check_index(_parse_int(toks[1], "target", lineno), n, "target", lineno)
            ops.append(GateOp("single", standard_gate(name), t))
        elif name == "u":
            if len(toks) != 10:
                raise ParseError("'u' takes a target index and 8 reals", lineno)
            t = _check_index(_parse_int(toks[1], "target", lineno), n, "target", lineno)
            ops.append(GateOp("single", _parse_reals(toks[2:], lineno), t))
        elif name == "cu":
            if len(toks) != 11:
                raise ParseError(
                    "'cu' takes control and target indices and 8 reals", lineno
                )
            c = _check_index(
                _parse_int(toks[1], "control", lineno), n, "control", lineno
            )
            t = _check_index(_parse_int(toks[2], "target", lineno), n, "target", lineno)
            if c == t:
                raise ParseError("control and target must differ", lineno)
            ops.append(GateOp("controlled", _parse_reals(toks[3:], lineno), t, c))
        elif name.startswith("c") and name[1:] in STANDARD_NAMES:
            if len(toks) != 3:
                raise ParseError(
                    f"'{name}' takes control and target indices", lineno
                )
            c = _check_index(
                _parse_int(toks[1], "control", lineno), n, "control", lineno
            )
            t = _check_index(_parse_int(toks[2], "target", lineno), n, "target", lineno)
            if c == t:
                raise ParseError("control and target must differ", lineno)
            ops.append(GateOp("controlled", standard_gate(name[1:]), t, c))
        else:
            raise ParseError(f"unknown operation {name!r}", lineno)

    if n is None:
        raise ParseError("no 'qubits <n>' header found")
    try:
        return Circuit(n, tuple(ops))
    except ValidationError as exc:  # pragma: no cover - parse checks precede this
        raise ParseError(str(exc)) from exc


def parse_circuit_file(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def _fmt_real(x: float) -> str:
    # repr() gives the shortest string that round-trips the double
    return repr(float(x))


def _fmt_gate_reals(g: Gate2x2) -> str:
    parts = []
    for z in (g.q11, g.q12, g.q21, g.q22):
        z = complex(z)
        parts.append(_fmt_real(z.real))
        parts.append(_fmt_real(z.imag))
    return " ".join(parts)


def format_circuit(circuit: Circuit) -> str:
    """Render a Circuit back into file text. parse_circuit of the result
    reconstructs an equal circuit (named gates stay named, arbitrary gates
    round-trip exactly through repr floats)."""
    lines = [f"qubits {circuit.n}"]
    for op in circuit.ops:
        key = tuple(complex(z) for z in op.gate.matrix.ravel())
        name = _NAMED.get(key)
        if op.kind == "single":
            if name is not None:
                lines.append(f"{name} {op.target}")
            else:
                lines.append(f"u {op.target} {_fmt_gate_reals(op.gate)}")
        else:
            if name is not None:
                lines.append(f"c{name} {op.control} {op.target}")
            else:
                lines.append(f"cu {op.control} {op.target} {_fmt_gate_reals(op.gate)}")
    return "\n".join(lines) + "\n"
