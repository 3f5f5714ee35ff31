"""State files and Wigner CSV tables.

Floats are written with 17 significant digits so files round-trip exactly
and identical inputs give identical bytes.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .grid import make_grid
from .states import FV, USUAL, FVState
from .wigner import WignerComponents

FORMAT_VERSION = 1
WIGNER_COLUMNS = ("p", "q", "w_pp", "w_mm", "re_w_pm", "im_w_pm")


def fmt(x) -> str:
    return "%.17g" % float(x)


def _complex_list(arr):
    return "[" + ", ".join(f"[{fmt(z.real)}, {fmt(z.imag)}]" for z in arr) + "]"


def _grid_json(grid):
    return ", ".join(f'"{k}": {fmt(v) if k != "n" else v}' for k, v in grid.to_dict().items())


def state_to_text(state) -> str:
    return (
        "{\n"
        f'  "format_version": {FORMAT_VERSION},\n'
        f'  "grid": {{{_grid_json(state.grid)}}},\n'
        f'  "representation": "{state.representation}",\n'
        f'  "psi_plus": {_complex_list(state.psi_plus)},\n'
        f'  "psi_minus": {_complex_list(state.psi_minus)}\n'
        "}\n"
    )


def state_hash(state) -> str:
    return hashlib.sha256(state_to_text(state).encode()).hexdigest()[:16]


def write_state(state, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(state_to_text(state))


def _parse_complex(rows, n, name):
    arr = np.asarray(rows, dtype=float)
    if arr.shape != (n, 2):
        raise ValueError(f"{name} must be a list of {n} [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def read_state(path):
    try:
        with open(path, encoding="ascii") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read state file {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValueError(f"state file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"state file {path} has unsupported format_version")
    try:
        g = doc["grid"]
        grid = make_grid(g["n"], g["p_max"], g["hbar"], g["mass"], g["c"])
        rep = doc["representation"]
        if rep not in (FV, USUAL):
            raise ValueError(f"unknown representation {rep!r}")
        plus = _parse_complex(doc["psi_plus"], grid.n, "psi_plus")
        minus = _parse_complex(doc["psi_minus"], grid.n, "psi_minus")
    except KeyError as exc:
        raise ValueError(f"state file {path} lacks field {exc}") from None
    return FVState(grid, plus, minus, rep)


def write_wigner_csv(w, path, state=None):
    g = w.grid
    p = np.repeat(g.p, g.n)
    q = np.tile(g.q, g.n)
    cols = [p, q, w.w_pp.real.ravel(), w.w_mm.real.ravel(), w.w_pm.real.ravel(), w.w_pm.imag.ravel()]
    table = np.column_stack(cols)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# grid {_grid_json(g)}\n")
        if state is not None:
            fh.write(f"# state_sha256 {state_hash(state)}\n")
        fh.write(",".join(WIGNER_COLUMNS) + "\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")


def read_wigner_csv(path):
    try:
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None
    grid = None
    for line in lines:
        if line.startswith("# grid "):
            g = json.loads("{" + line[len("# grid ") :].strip() + "}")
            grid = make_grid(g["n"], g["p_max"], g["hbar"], g["mass"], g["c"])
    if grid is None:
        raise ValueError(f"{path} has no '# grid' metadata line")
    body = [line for line in lines if line and not line.startswith("#")]
    if not body or tuple(body[0].split(",")) != WIGNER_COLUMNS:
        raise ValueError(f"{path} header must be {','.join(WIGNER_COLUMNS)}")
    n = grid.n
    values = np.loadtxt(body[1:], delimiter=",", ndmin=2) if len(body) > 1 else np.empty((0, 6))
    if values.shape != (n * n, len(WIGNER_COLUMNS)):
        raise ValueError(f"{path} must have {n * n} data rows")
    shape = (n, n)
    w_pm = (values[:, 4] + 1j * values[:, 5]).reshape(shape)
    return WignerComponents(
        grid, values[:, 2].reshape(shape), values[:, 3].reshape(shape), w_pm, np.conj(w_pm)
    )
