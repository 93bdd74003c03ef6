"""Plain-text update stream formats for both applications.

CNF streams hold one operation per line:

    + <lit> <lit> ...     insert a clause (signed 1-based literals, an
                          optional trailing 0 terminator is ignored)
    - <index>             delete the clause with that insertion index

Coloring streams start with a header line

    n <n> delta <delta> seed-palettes <seed>
    n <n> delta <delta> palettes-file <path>

followed by edge operations:

    + <u> <v>             insert edge
    - <u> <v>             delete edge

Blank lines and lines starting with '#' or 'c' are skipped everywhere.
A palettes file holds one line of space-separated colors per vertex.
"""

from __future__ import annotations

from .errors import StreamParseError

CnfOp = tuple  # ("+", tuple[int, ...]) | ("-", int)
EdgeOp = tuple  # ("+", u, v) | ("-", u, v)


def _payload_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.split()[0] == "c":
            continue
        yield lineno, line


def parse_cnf_stream(text: str) -> list[CnfOp]:
    ops: list[CnfOp] = []
    for lineno, line in _payload_lines(text):
        parts = line.split()
        try:
            if parts[0] == "+":
                lits = [int(p) for p in parts[1:]]
                if lits and lits[-1] == 0:
                    lits.pop()
                if not lits:
                    raise ValueError("empty clause")
                ops.append(("+", tuple(lits)))
            elif parts[0] == "-":
                if len(parts) != 2:
                    raise ValueError("deletion takes one index")
                ops.append(("-", int(parts[1])))
            else:
                raise ValueError(f"unknown operation {parts[0]!r}")
        except ValueError as exc:
            raise StreamParseError(f"line {lineno}: {exc}") from exc
    return ops


def write_cnf_stream(ops) -> str:
    lines = []
    for op in ops:
        if op[0] == "+":
            lines.append("+ " + " ".join(str(lit) for lit in op[1]))
        elif op[0] == "-":
            lines.append(f"- {op[1]}")
        else:
            raise ValueError(f"unknown op {op!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_coloring_stream(text: str) -> tuple[dict, list[EdgeOp]]:
    lines = _payload_lines(text)
    try:
        _, header_line = next(lines)
    except StopIteration:
        raise StreamParseError("missing coloring header") from None
    parts = header_line.split()
    if len(parts) != 6 or parts[0] != "n" or parts[2] != "delta":
        raise StreamParseError(f"bad header: {header_line!r}")
    try:
        header = {"n": int(parts[1]), "delta": int(parts[3])}
    except ValueError as exc:
        raise StreamParseError(f"bad header: {header_line!r}") from exc
    if parts[4] == "seed-palettes":
        try:
            header["seed_palettes"] = int(parts[5])
        except ValueError as exc:
            raise StreamParseError(f"bad palette seed: {parts[5]!r}") from exc
    elif parts[4] == "palettes-file":
        header["palettes_file"] = parts[5]
    else:
        raise StreamParseError(f"bad header: {header_line!r}")
    ops: list[EdgeOp] = []
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("+", "-"):
            raise StreamParseError(f"line {lineno}: bad edge op {line!r}")
        try:
            ops.append((parts[0], int(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise StreamParseError(f"line {lineno}: {exc}") from exc
    return header, ops


def write_coloring_stream(header: dict, ops) -> str:
    if "seed_palettes" in header:
        tail = f"seed-palettes {header['seed_palettes']}"
    elif "palettes_file" in header:
        tail = f"palettes-file {header['palettes_file']}"
    else:
        raise ValueError("header needs seed_palettes or palettes_file")
    lines = [f"n {header['n']} delta {header['delta']} {tail}"]
    for kind, u, v in ops:
        lines.append(f"{kind} {u} {v}")
    return "\n".join(lines) + "\n"


def parse_palettes(text: str) -> list[tuple[int, ...]]:
    palettes = []
    for lineno, line in _payload_lines(text):
        try:
            palettes.append(tuple(int(p) for p in line.split()))
        except ValueError as exc:
            raise StreamParseError(f"line {lineno}: {exc}") from exc
    return palettes


def write_palettes(palettes) -> str:
    return "\n".join(" ".join(str(c) for c in pal) for pal in palettes) + "\n"
