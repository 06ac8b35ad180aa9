"""JSON interchange for operators and generator inventories.

Complex numbers serialize as two-element ``[re, im]`` arrays and matrices
row-major.  ``dumps_canonical`` fixes key order and layout so that
parse/serialize round trips are byte-identical for canonical documents.
Parse failures carry a field path (or the JSON line number) so the CLI
can point at the offending input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._errors import DocumentError
from .classification import ToleranceConfig
from .core import KreinOperator, KreinSpace
from .generators import GeneratorSpec

__all__ = [
    "OperatorDocument",
    "dumps_canonical",
    "generator_spec_from_json",
    "generator_spec_to_json",
    "load_operator_document",
    "parse_operator_document",
]


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def complex_to_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def pair_to_complex(pair, where: str) -> complex:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
    ):
        raise DocumentError(f"{where}: expected a [re, im] number pair, got {pair!r}")
    return complex(pair[0], pair[1])


def matrix_to_json(a: np.ndarray) -> list[list[list[float]]]:
    return [[complex_to_pair(z) for z in row] for row in np.asarray(a)]


def matrix_from_json(rows, dim: int, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != dim:
        raise DocumentError(f"{where}: expected {dim} rows")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise DocumentError(f"{where}[{i}]: expected {dim} entries")
        for j, pair in enumerate(row):
            out[i, j] = pair_to_complex(pair, f"{where}[{i}][{j}]")
    return out


_TOLERANCE_FIELDS = (
    "cluster_tol",
    "rank_tol",
    "definiteness_tol",
    "normality_tol",
    "contour_nodes",
)


@dataclass
class OperatorDocument:
    """Serializable (space, operator) pair with optional tolerance
    overrides and free-form string metadata."""

    dim: int
    gram: np.ndarray
    matrix: np.ndarray
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    tolerance_overrides: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "gram": matrix_to_json(self.gram),
            "matrix": matrix_to_json(self.matrix),
        }
        if self.tolerance_overrides:
            out["tolerances"] = dict(sorted(self.tolerance_overrides.items()))
        if self.metadata:
            out["metadata"] = dict(sorted(self.metadata.items()))
        return out

    def to_json(self) -> str:
        return dumps_canonical(self.to_json_dict())

    def build(self) -> tuple[KreinSpace, KreinOperator]:
        """Instantiate the certified operator; raises on invalid Gram or
        non-normal matrix."""
        try:
            space = KreinSpace(self.gram)
        except ValueError as exc:
            raise DocumentError(f"gram: {exc}") from exc
        operator = KreinOperator(
            self.matrix, space, normality_tol=self.tolerances.normality_tol
        )
        return space, operator


def parse_operator_document(text: str) -> OperatorDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise DocumentError("top level: expected a JSON object")
    known = {"dim", "gram", "matrix", "tolerances", "metadata"}
    unknown = set(raw) - known
    if unknown:
        raise DocumentError(f"unknown fields: {sorted(unknown)}")
    if "dim" not in raw or not isinstance(raw["dim"], int) or isinstance(raw["dim"], bool):
        raise DocumentError("dim: expected a positive integer")
    dim = raw["dim"]
    if dim < 1:
        raise DocumentError("dim: expected a positive integer")
    for name in ("gram", "matrix"):
        if name not in raw:
            raise DocumentError(f"{name}: missing")
    gram = matrix_from_json(raw["gram"], dim, "gram")
    matrix = matrix_from_json(raw["matrix"], dim, "matrix")

    overrides = {}
    if "tolerances" in raw:
        tols = raw["tolerances"]
        if not isinstance(tols, dict):
            raise DocumentError("tolerances: expected an object")
        unknown = set(tols) - set(_TOLERANCE_FIELDS)
        if unknown:
            raise DocumentError(f"tolerances: unknown fields {sorted(unknown)}")
        overrides = dict(tols)
    try:
        cfg = ToleranceConfig(**overrides)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"tolerances: {exc}") from exc

    metadata = raw.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise DocumentError("metadata: expected a string-to-string object")

    return OperatorDocument(
        dim=dim,
        gram=gram,
        matrix=matrix,
        tolerances=cfg,
        tolerance_overrides=overrides,
        metadata=metadata,
    )


def load_operator_document(path: str) -> OperatorDocument:
    import sys

    if path == "-":
        return parse_operator_document(sys.stdin.read())
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_operator_document(fh.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def generator_spec_to_json(spec: GeneratorSpec) -> dict:
    return {
        "signature": list(spec.signature),
        "positive_type_eigs": [
            {"value": complex_to_pair(v), "mult": m} for v, m in spec.positive_type_eigs
        ],
        "negative_type_eigs": [
            {"value": complex_to_pair(v), "mult": m} for v, m in spec.negative_type_eigs
        ],
        "neutral_pairs": [
            [complex_to_pair(a), complex_to_pair(b)] for a, b in spec.neutral_pairs
        ],
        "neutral_jordan": [complex_to_pair(v) for v in spec.neutral_jordan],
        "conjugation": None
        if spec.cond_bound is None
        else {"cond_bound": spec.cond_bound},
        "seed": spec.seed,
    }


def generator_spec_from_json(raw: dict) -> GeneratorSpec:
    if not isinstance(raw, dict):
        raise DocumentError("generator spec: expected a JSON object")
    try:
        signature = tuple(int(x) for x in raw["signature"])
        if len(signature) != 2:
            raise DocumentError("signature: expected [p, q]")
        mults = []
        for key in ("positive_type_eigs", "negative_type_eigs"):
            entries = []
            for i, item in enumerate(raw.get(key, [])):
                entries.append(
                    (
                        pair_to_complex(item["value"], f"{key}[{i}].value"),
                        int(item["mult"]),
                    )
                )
            mults.append(tuple(entries))
        pairs = tuple(
            (
                pair_to_complex(item[0], f"neutral_pairs[{i}][0]"),
                pair_to_complex(item[1], f"neutral_pairs[{i}][1]"),
            )
            for i, item in enumerate(raw.get("neutral_pairs", []))
        )
        jordans = tuple(
            pair_to_complex(item, f"neutral_jordan[{i}]")
            for i, item in enumerate(raw.get("neutral_jordan", []))
        )
        conj = raw.get("conjugation")
        cond_bound = None if conj is None else float(conj["cond_bound"])
        seed = int(raw.get("seed", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"generator spec: {exc!r}") from exc
    try:
        return GeneratorSpec(
            signature=signature,
            positive_type_eigs=mults[0],
            negative_type_eigs=mults[1],
            neutral_pairs=pairs,
            neutral_jordan=jordans,
            cond_bound=cond_bound,
            seed=seed,
        )
    except ValueError as exc:
        raise DocumentError(f"generator spec: {exc}") from exc
