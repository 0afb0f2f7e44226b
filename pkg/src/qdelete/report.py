"""Run reports: build the document, write it with stable ordering and exact floats."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Sequence

import numpy as np

from . import __version__
from .core import DensityMatrix, PauliDecomposition
from .protocol import SignallingReport, Sweep


def fmt_float(x: float) -> str:
    """17 significant digits, always readable back as a float."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    s = "%.17g" % x
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def plain(obj: Any) -> Any:
    """Convert numpy values and complex numbers to JSON-friendly builtins."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with sorted keys and :func:`fmt_float` numbers."""

    def emit(o, level):
        pad, inner = " " * (indent * level), " " * (indent * (level + 1))
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{inner}{json.dumps(k)}: {emit(o[k], level + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(emit(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(inner + emit(v, level + 1) for v in o) + "\n" + pad + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o)
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return emit(plain(obj), 0) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)


def matrix_doc(rho: DensityMatrix) -> dict:
    return {"register": list(rho.register), "real": rho.matrix.real, "imag": rho.matrix.imag}


def pauli_doc(d: PauliDecomposition) -> dict:
    return {"m": d.m, "n": d.n, "C": d.C}


def basis_doc(b) -> dict:
    return {"theta": b.theta, "phi": b.phi}


def state_doc(basis, rho: DensityMatrix, pauli: PauliDecomposition, bit: str) -> dict:
    return {**basis_doc(basis), "bit": bit, "rho": matrix_doc(rho), "pauli": pauli_doc(pauli)}


def pair_doc(i: int, j: int, r: SignallingReport) -> dict:
    return {
        "i": i,
        "j": j,
        "trace_distance": r.distance,
        "discrimination_probability": r.discrimination_probability,
        "verdict": r.verdict,
    }


def sweep_doc(s: Sweep, reference) -> dict:
    best = s.reports[s.argmax].basis_b
    return {
        "reference": basis_doc(reference),
        "argmax": s.argmax,
        "argmax_basis": basis_doc(best),
        "max_distance": s.max_distance,
        "distances": [r.distance for r in s.reports],
    }


def run_document(*, config: dict, seed: int, states: list[dict], pairs: list[dict],
                 sweep: dict, invariants: dict, verdict: str) -> dict:
    return {
        "version": __version__,
        "seed": seed,
        "config": config,
        "bit_encoding": {"0": "computational basis", "1": "any other basis"},
        "states": states,
        "pairs": pairs,
        "sweep": sweep,
        "invariants": invariants,
        "verdict": verdict,
    }


CSV_COLUMNS = ("theta", "phi", "trace_distance", "discrimination_probability", "verdict")


def sweep_csv(reports: Sequence[SignallingReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        b = r.basis_b
        w.writerow([fmt_float(b.theta), fmt_float(b.phi), fmt_float(r.distance),
                    fmt_float(r.discrimination_probability), r.verdict])
    return buf.getvalue()
