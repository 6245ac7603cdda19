"""JSON channel documents.

A document stores one map in one representation:

    {
      "n": 2,
      "rep": "superop" | "choi" | "kraus" | "ptm",
      "kind": "channel" | "generator",
      "data": <matrix>            (for "kraus": a list of matrices),
      "meta": {"...": "..."}      (optional string map)
    }

Matrices are row-major nested arrays of [re, im] pairs. Serialization uses
Python's shortest-round-trip float formatting, so load(store(doc)) is
bit-exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    ChoiMatrix,
    KrausSet,
    PauliTransferMatrix,
    Superoperator,
    to_choi,
    to_kraus,
    to_ptm,
    to_superop,
)

REPS = ("superop", "choi", "kraus", "ptm")
KINDS = ("channel", "generator")


class DocumentError(ValueError):
    """Malformed channel document (validation failure, exit code 2 in the CLI)."""


def matrix_to_pairs(M: np.ndarray) -> list:
    """Row-major nested [re, im] pairs."""
    A = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def pairs_to_matrix(data, rows: int, cols: int, what: str) -> np.ndarray:
    """Parse and validate a nested [re, im] array of the given shape."""
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.shape != (rows, cols, 2):
        raise DocumentError(
            f"{what}: expected shape {rows} x {cols} of [re, im] pairs, "
            f"got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise DocumentError(f"{what}: entries must be finite")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class ChannelDocument:
    """Validated in-memory form of a channel JSON document."""

    n: int
    rep: str
    kind: str
    data: object
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DocumentError(f"n must be a positive integer, got {self.n!r}")
        if self.rep not in REPS:
            raise DocumentError(f"rep must be one of {REPS}, got {self.rep!r}")
        if self.kind not in KINDS:
            raise DocumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.rep == "ptm" and self.n != 2:
            raise DocumentError("rep 'ptm' requires n = 2")
        if not isinstance(self.meta, dict):
            raise DocumentError("meta must be an object")

    def to_superoperator(self) -> Superoperator:
        d = self.n * self.n
        if self.rep == "superop":
            return Superoperator(self.n, pairs_to_matrix(self.data, d, d, "superop data"))
        if self.rep == "choi":
            return to_superop(ChoiMatrix(self.n, pairs_to_matrix(self.data, d, d, "choi data")))
        if self.rep == "kraus":
            if not isinstance(self.data, list) or not self.data:
                raise DocumentError("kraus data must be a nonempty list of matrices")
            ops = [pairs_to_matrix(K, self.n, self.n, f"kraus operator {i}")
                   for i, K in enumerate(self.data)]
            return to_superop(KrausSet(self.n, ops))
        P = pairs_to_matrix(self.data, 4, 4, "ptm data")
        if np.max(np.abs(P.imag)) > 0.0:
            raise DocumentError("ptm data must have zero imaginary parts")
        return to_superop(PauliTransferMatrix(P.real))


def from_superoperator(s: Superoperator, rep: str = "superop",
                       kind: str = "channel", meta: dict | None = None
                       ) -> ChannelDocument:
    """Encode a superoperator in the requested representation."""
    if rep == "superop":
        data = matrix_to_pairs(s.mat)
    elif rep == "choi":
        data = matrix_to_pairs(to_choi(s).mat)
    elif rep == "kraus":
        data = [matrix_to_pairs(K) for K in to_kraus(to_choi(s)).operators]
    elif rep == "ptm":
        data = matrix_to_pairs(to_ptm(s).mat.astype(complex))
    else:
        raise DocumentError(f"rep must be one of {REPS}, got {rep!r}")
    return ChannelDocument(n=s.n, rep=rep, kind=kind, data=data, meta=meta or {})


def to_json(doc: ChannelDocument) -> str:
    """Deterministic serialization: sorted keys, shortest-round-trip floats."""
    payload = {"n": doc.n, "rep": doc.rep, "kind": doc.kind, "data": doc.data}
    if doc.meta:
        payload["meta"] = doc.meta
    return json.dumps(payload, sort_keys=True, separators=(", ", ": ")) + "\n"


def from_json(text: str) -> ChannelDocument:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise DocumentError("document must be a JSON object")
    unknown = set(payload) - {"n", "rep", "kind", "data", "meta"}
    if unknown:
        raise DocumentError(f"unknown document fields: {sorted(unknown)}")
    for key in ("n", "rep", "kind", "data"):
        if key not in payload:
            raise DocumentError(f"document is missing field {key!r}")
    doc = ChannelDocument(
        n=payload["n"],
        rep=payload["rep"],
        kind=payload["kind"],
        data=payload["data"],
        meta=payload.get("meta", {}),
    )
    doc.to_superoperator()  # validates payload dimensions and finiteness
    return doc


def store(doc: ChannelDocument, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_json(doc))


def load(path: str) -> ChannelDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(fh.read())


def json_default(obj):
    """JSON encoder hook for report payloads (complex -> [re, im], arrays -> lists)."""
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
