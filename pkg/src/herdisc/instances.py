"""Instance generators and CSV matrix I/O.

Random families draw from ``numpy.random.Generator(PCG64(seed))`` so a given
``(family, m, n, seed)`` reproduces the same matrix on every platform that
ships numpy's PCG64 bit generator.
"""

from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidSpec, ParseError
from .linalg import as_matrix

FAMILIES = (
    "identity",
    "hadamard",
    "intervals",
    "three_copy_hadamard",
    "random_pm1",
    "random_gaussian",
    "random_unit_columns",
    "csv",
)
SQUARE_FAMILIES = ("identity", "hadamard", "intervals", "three_copy_hadamard")
RANDOM_FAMILIES = ("random_pm1", "random_gaussian", "random_unit_columns")


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    n: int | None = None
    m: int | None = None
    seed: int = 0
    path: str | None = None

    def validate(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.family == "csv":
            if not self.path:
                raise InvalidSpec("csv family needs a path")
            return self
        if self.n is None or self.n < 1:
            raise InvalidSpec(f"{self.family}: n must be a positive integer, got {self.n}")
        if self.family in ("hadamard", "three_copy_hadamard") and self.n & (self.n - 1):
            raise InvalidSpec(f"{self.family}: n must be a power of 2, got {self.n}")
        if self.family in RANDOM_FAMILIES:
            if self.rows < 1:
                raise InvalidSpec(f"{self.family}: m must be a positive integer, got {self.m}")
            if not 0 <= self.seed < 2**64:
                raise InvalidSpec(f"seed must fit in 64 bits, got {self.seed}")
        elif self.m is not None and self.m != self.n:
            raise InvalidSpec(f"{self.family} is square: m={self.m} must equal n={self.n}")
        return self

    @property
    def rows(self):
        return self.n if self.m is None else self.m


def sylvester_hadamard(n):
    H = np.ones((1, 1))
    while H.shape[0] < n:
        H = np.block([[H, H], [H, -H]])
    return H


def generate(spec):
    """Build the matrix described by ``spec`` (deterministic in all fields)."""
    spec.validate()
    fam, n = spec.family, spec.n
    if fam == "csv":
        return load_matrix_csv(spec.path)
    if fam == "identity":
        return np.eye(n)
    if fam == "hadamard":
        return sylvester_hadamard(n)
    if fam == "intervals":
        return np.tril(np.ones((n, n)))
    if fam == "three_copy_hadamard":
        return np.repeat(sylvester_hadamard(n), 3, axis=1)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    shape = (spec.rows, n)
    if fam == "random_pm1":
        return 2.0 * rng.integers(0, 2, size=shape) - 1.0
    G = rng.standard_normal(shape)
    if fam == "random_gaussian":
        return G
    norms = np.linalg.norm(G, axis=0)
    norms[norms == 0] = 1.0
    return G / norms


def _format_entry(x):
    x = float(x)
    if x == 0:
        return "0"
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return format(x, ".17g")


def save_matrix_csv(A, path):
    """Write ``A`` as header-less CSV, 17 significant digits, LF line endings."""
    A = as_matrix(A)
    text = "".join(",".join(_format_entry(x) for x in row) + "\n" for row in A)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write matrix to {path}: {exc.strerror}") from exc


def matrix_to_csv(A):
    A = as_matrix(A)
    return "".join(",".join(_format_entry(x) for x in row) + "\n" for row in A)


def parse_matrix_csv(text, path=None):
    rows = []
    width = None
    for r, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            where = f"{path}: " if path else ""
            raise FormatError(f"{where}row {r} has {len(fields)} fields, expected {width} (ragged rows)")
        row = []
        for c, field in enumerate(fields, start=1):
            try:
                val = float(field.strip())
            except ValueError:
                raise ParseError(r, c, field, path) from None
            if not math.isfinite(val):
                raise ParseError(r, c, field, path)
            row.append(val)
        rows.append(row)
    if not rows:
        raise FormatError(f"{path or 'input'}: no matrix rows found")
    return np.array(rows, dtype=np.float64)


def load_matrix_csv(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix_csv(text, path=str(path))
