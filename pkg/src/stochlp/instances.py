"""Instance file I/O and the bundled random-instance generator.

Instances are JSON documents with keys "A" (array of rows), "b", "c",
optional "R", "L" and "name".  The writer serializes every float with 17
significant digits so written instances parse back to identical programs.
"""

import json
import math

import numpy as np

from .errors import InstanceFormatError
from .model import LinearProgram


def load_instance(path):
    """Parse an instance file.  Returns (LinearProgram, name-or-None)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{path}: top level must be an object")
    for key in ("A", "b", "c"):
        if key not in doc:
            raise InstanceFormatError(f"{path}: missing key {key!r}")
    rows = doc["A"]
    if (not isinstance(rows, list) or not rows
            or not all(isinstance(r, list) for r in rows)):
        raise InstanceFormatError(f"{path}: 'A' must be a non-empty array of rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InstanceFormatError(
                f"{path}: row {i} of 'A' has length {len(row)}, expected {width}")
    if len(doc["b"]) != len(rows):
        raise InstanceFormatError(
            f"{path}: 'b' has length {len(doc['b'])}, expected {len(rows)}")
    if len(doc["c"]) != width:
        raise InstanceFormatError(
            f"{path}: 'c' has length {len(doc['c'])}, expected {width}")
    r_bound = doc.get("R")
    if r_bound is None:
        # loose default; the solve report flags ||x_hat||_1 > R
        r_bound = 1000.0 * (1.0 + float(np.abs(np.asarray(doc["b"],
                                                          dtype=float)).sum()))
    try:
        lp = LinearProgram(np.asarray(rows, dtype=float),
                           np.asarray(doc["b"], dtype=float),
                           np.asarray(doc["c"], dtype=float),
                           R=float(r_bound),
                           L=None if doc.get("L") is None else float(doc["L"]))
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
    return lp, doc.get("name")


def _fmt(value):
    return format(float(value), ".17g")


def write_instance(path, lp, name=None):
    """Write an instance file that parses back to an identical program."""
    lines = ["{"]
    if name is not None:
        lines.append(f'  "name": {json.dumps(str(name))},')
    rows = ",\n".join(
        "    [" + ", ".join(_fmt(v) for v in row) + "]" for row in lp.A)
    lines.append('  "A": [\n' + rows + "\n  ],")
    lines.append('  "b": [' + ", ".join(_fmt(v) for v in lp.b) + "],")
    lines.append('  "c": [' + ", ".join(_fmt(v) for v in lp.c) + "],")
    lines.append(f'  "R": {_fmt(lp.R)},')
    lines.append(f'  "L": {_fmt(lp.L)}')
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def random_lp(rng, d, n):
    """A random feasible standard-form instance with an honest diameter bound.

    The first row of A is uniform in [1, 2] and the rest standard normal;
    b = A x0 for x0 uniform in (0.5, 1.5)^n, c standard normal and
    R = 2 ||x0||_1.  The positive row pins sum_i pi_i x_i = pi.x0 with
    pi_i >= 1, so every feasible x has ||x||_1 <= pi.x0 <= 2 ||x0||_1 = R:
    the polytope is bounded with l1 diameter at most R by construction.
    (A fully Gaussian A almost never yields a bounded polytope once n
    noticeably exceeds d, which would void every diameter-based guarantee.)
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    while True:
        a = np.vstack([rng.uniform(1.0, 2.0, size=(1, n)),
                       rng.standard_normal((d - 1, n))]) if d > 1 else \
            rng.uniform(1.0, 2.0, size=(1, n))
        x0 = rng.uniform(0.5, 1.5, size=n)
        c = rng.standard_normal(n)
        try:
            return LinearProgram(a, a @ x0, c, R=2.0 * float(np.abs(x0).sum()))
        except Exception:
            continue  # astronomically rare rank-deficient draw; redraw


def random_suite(seed, count, d_range=(3, 10), n_range=(6, 30),
                 max_bases=200_000):
    """Seeded suite of random instances sized for the enumeration oracle.

    Draws d and n uniformly from the given ranges, redrawing n while C(n, d)
    exceeds max_bases so the brute-force oracle stays fast.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(d_range[0], d_range[1] + 1))
        lo = max(n_range[0], d + 1)
        while True:
            n = int(rng.integers(lo, n_range[1] + 1))
            if math.comb(n, d) <= max_bases:
                break
        out.append(random_lp(rng, d, n))
    return out
