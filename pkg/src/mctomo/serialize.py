"""JSON wire formats for states, matrices, records, and results.

Complex data is stored as parallel real/imag arrays, row-major for
matrices. Every document carries a "kind" discriminator so the CLI can
accept files without extra flags.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

import numpy as np

from .completion import PartialMatrix
from .measure import ShotRecord
from .tomography import ReconstructionResult
from .validation import num_qubits

KIND_STATE = "state_vector"
KIND_MATRIX = "density_matrix"
KIND_PARTIAL = "partial_matrix"
KIND_RECORDS = "shot_records"
KIND_RESULT = "reconstruction_result"


def state_to_json(psi: np.ndarray) -> dict:
    psi = np.asarray(psi, dtype=complex)
    return {
        "kind": KIND_STATE,
        "n": num_qubits(psi.shape[0]),
        "re": psi.real.tolist(),
        "im": psi.imag.tolist(),
    }


def state_from_json(doc: dict) -> np.ndarray:
    psi = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    if "n" in doc and (1 << int(doc["n"])) != psi.shape[0]:
        raise ValueError("state length does not match its declared qubit count")
    return psi


def matrix_to_json(m: np.ndarray, *, kind: str = KIND_MATRIX) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "kind": kind,
        "d": m.shape[0],
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    m = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix document is not square")
    return m


def partial_matrix_to_json(pm: PartialMatrix) -> dict:
    doc = matrix_to_json(pm.entries, kind=KIND_PARTIAL)
    doc["known"] = pm.known.tolist()
    return doc


def partial_matrix_from_json(doc: dict) -> PartialMatrix:
    entries = matrix_from_json(doc)
    known = np.asarray(doc["known"], dtype=bool)
    return PartialMatrix(entries, known)


def record_to_json(record: ShotRecord) -> dict:
    return {
        "setting": record.setting,
        "counts": record.counts.tolist(),
        "shots": int(record.shots),
    }


def record_from_json(doc: dict) -> ShotRecord:
    return ShotRecord(doc["setting"], np.asarray(doc["counts"], dtype=np.int64),
                      int(doc["shots"]))


def records_to_json(records: Sequence[ShotRecord], n: int) -> dict:
    return {
        "kind": KIND_RECORDS,
        "n": n,
        "records": [record_to_json(r) for r in records],
    }


def records_from_json(doc: dict) -> list[ShotRecord]:
    return [record_from_json(r) for r in doc["records"]]


def result_to_json(result: ReconstructionResult,
                   fidelity: Optional[float] = None) -> dict:
    doc = {
        "kind": KIND_RESULT,
        "estimate": state_to_json(result.estimate),
        "raw_matrix": matrix_to_json(result.raw_matrix),
        "settings_used": int(result.settings_used),
        "shots_used": int(result.shots_used),
        "flags": {
            "rotated": bool(result.rotated),
            "degenerate_eig": bool(result.degenerate_eig),
            "sparse_failure_recovered": bool(result.sparse_failure_recovered),
        },
    }
    if fidelity is not None:
        doc["fidelity"] = fidelity
    return doc


def load_document(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_document(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
