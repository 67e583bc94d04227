"""Matrix Market coordinate I/O.

Only real (or integer) ``coordinate`` matrices with the ``general`` or
``symmetric`` qualifier are read. Indices are 1-based in files and 0-based
in :class:`~krylov.sparse.CsrMatrix`.
"""

import io
from pathlib import Path

import numpy as np

from krylov.errors import (BannerError, FieldError, IndexRangeError,
                           TruncatedError, UnsupportedFormatError)
from krylov.sparse import CsrMatrix

BANNER = "%%MatrixMarket"


def _parse_banner(line, lineno=1):
    tokens = line.strip().split()
    if len(tokens) != 5 or tokens[0] != BANNER or tokens[1].lower() != "matrix":
        raise BannerError(f"malformed banner {line.strip()!r}", lineno)
    fmt, field, symmetry = (t.lower() for t in tokens[2:])
    if fmt not in ("coordinate", "array"):
        raise BannerError(f"unknown storage format {fmt!r}", lineno)
    if field not in ("real", "integer", "double", "complex", "pattern"):
        raise BannerError(f"unknown field {field!r}", lineno)
    if symmetry not in ("general", "symmetric", "skew-symmetric", "hermitian"):
        raise BannerError(f"unknown symmetry qualifier {symmetry!r}", lineno)
    return fmt, field, symmetry


def _data_lines(lines, start):
    """Yield ``(lineno, stripped)`` for non-comment, non-blank lines."""
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        s = raw.strip()
        if s and not s.startswith("%"):
            yield lineno, s


def parse_matrix_market(text):
    """Parse Matrix Market text into a :class:`CsrMatrix`.

    ``symmetric`` files have their stored triangle mirrored (the diagonal is
    kept once). Duplicate coordinates are summed.

    Raises
    ------
    BannerError
        Missing or malformed ``%%MatrixMarket`` header.
    UnsupportedFormatError
        Dense ``array`` storage, or skew-symmetric/hermitian qualifiers.
    FieldError
        Complex or pattern fields, or an entry value that is not a real number.
    IndexRangeError
        An index outside the declared shape.
    TruncatedError
        Fewer entries than the size line announces, or a short entry line.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()
    if not lines:
        raise BannerError("empty input", 1)
    fmt, field, symmetry = _parse_banner(lines[0])
    if fmt == "array":
        raise UnsupportedFormatError("dense 'array' format is not supported", 1)
    if field in ("complex", "pattern"):
        raise FieldError(f"field {field!r} is not real-valued", 1)
    if symmetry not in ("general", "symmetric"):
        raise UnsupportedFormatError(f"symmetry qualifier {symmetry!r} is not supported", 1)

    body = _data_lines(lines, 1)
    try:
        lineno, size_line = next(body)
    except StopIteration:
        raise TruncatedError("missing size line", len(lines) + 1) from None
    parts = size_line.split()
    try:
        n_rows, n_cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise BannerError(f"malformed size line {size_line!r}", lineno) from None
    if min(n_rows, n_cols, nnz) < 0:
        raise BannerError("negative size", lineno)
    if symmetry == "symmetric" and n_rows != n_cols:
        raise BannerError("symmetric matrix must be square", lineno)

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    k = 0
    for lineno, s in body:
        if k == nnz:
            raise TruncatedError(f"more entries than the declared {nnz}", lineno)
        parts = s.split()
        if len(parts) < 3:
            raise TruncatedError(f"entry line has {len(parts)} fields, expected 3", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise IndexRangeError(f"non-integer index in {s!r}", lineno) from None
        try:
            v = float(parts[2])
        except ValueError:
            raise FieldError(f"value {parts[2]!r} is not a real number", lineno) from None
        if np.isnan(v):
            raise FieldError("NaN value", lineno)
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise IndexRangeError(f"index ({i}, {j}) outside {n_rows}x{n_cols}", lineno)
        rows[k], cols[k], vals[k] = i - 1, j - 1, v
        k += 1
    if k < nnz:
        raise TruncatedError(f"found {k} of {nnz} entries", len(lines) + 1)

    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (np.concatenate([rows, cols[off]]),
                            np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, vals[off]]))
    return CsrMatrix.from_coo(rows, cols, vals, (n_rows, n_cols))


def read_matrix_market(path):
    return parse_matrix_market(Path(path).read_text())


def format_matrix_market(A, symmetric=False, comment=None):
    """Serialize ``A`` as coordinate real text with 17 significant digits.

    With ``symmetric=True`` only the lower triangle is written; the caller is
    responsible for ``A`` actually being symmetric.
    """
    buf = io.StringIO()
    qualifier = "symmetric" if symmetric else "general"
    buf.write(f"{BANNER} matrix coordinate real {qualifier}\n")
    if comment:
        for line in comment.splitlines():
            buf.write(f"% {line}\n")
    rows = A.row_indices()
    cols, vals = A.col_idx, A.values
    if symmetric:
        keep = rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    buf.write(f"{A.n_rows} {A.n_cols} {rows.size}\n")
    for i, j, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        buf.write(f"{i + 1} {j + 1} {v:.17g}\n")
    return buf.getvalue()


def write_matrix_market(path, A, symmetric=False, comment=None):
    Path(path).write_text(format_matrix_market(A, symmetric, comment))


def read_vector(path):
    """Read a right-hand side: Matrix Market (array or coordinate) or one value per line."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if lines and lines[0].startswith(BANNER):
        fmt, field, _ = _parse_banner(lines[0])
        if field in ("complex", "pattern"):
            raise FieldError(f"field {field!r} is not real-valued", 1)
        if fmt == "coordinate":
            M = parse_matrix_market(text)
            if M.n_cols != 1:
                raise UnsupportedFormatError("vector file must have a single column", 1)
            return M.to_dense()[:, 0]
        body = list(_data_lines(lines, 1))
        if not body:
            raise TruncatedError("missing size line", len(lines) + 1)
        n_rows, n_cols = (int(p) for p in body[0][1].split()[:2])
        if n_cols != 1:
            raise UnsupportedFormatError("vector file must have a single column", body[0][0])
        entries = body[1:]
        if len(entries) < n_rows:
            raise TruncatedError(f"found {len(entries)} of {n_rows} entries", len(lines) + 1)
        return _floats(entries[:n_rows])
    return _floats(list(_data_lines(lines, 0)))


def _floats(entries):
    out = np.empty(len(entries))
    for k, (lineno, s) in enumerate(entries):
        try:
            out[k] = float(s.split()[0])
        except ValueError:
            raise FieldError(f"value {s!r} is not a real number", lineno) from None
    if np.isnan(out).any():
        raise FieldError("NaN value in vector")
    return out


def format_vector(x):
    return "".join(f"{v:.17g}\n" for v in np.asarray(x, dtype=np.float64).tolist())
