"""Exact cosine-similarity retrieval with weighted query composition."""

from __future__ import annotations

import numpy as np

from .errors import ArtifactFormatError, DegenerateQueryError, ValidationError
from .persist import read_artifact, write_artifact

KIND = "retrieval_index"

_EPS_NORM = 1e-12


def _unit(v: np.ndarray, what: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm < _EPS_NORM:
        raise ValidationError(f"{what} has zero norm")
    return v / norm


def cosine_similarity(a, b) -> float:
    """Dot product over the norm product; in [-1, 1] up to rounding."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < _EPS_NORM or nb < _EPS_NORM:
        raise ValidationError("cosine similarity is undefined for zero-norm input")
    return float(np.dot(a, b) / (na * nb))


def compose_query(terms: list[tuple[np.ndarray, float]]) -> np.ndarray:
    """Unit-normalized weighted sum of unit-normalized term vectors.

    Negative weights subtract a concept; a weighted sum that cancels to
    (numerically) nothing is a degenerate query.
    """
    if not terms:
        raise ValidationError("query needs at least one term")
    q = None
    for vec, weight in terms:
        weight = float(weight)
        if not np.isfinite(weight):
            raise ValidationError("term weight must be finite")
        unit = _unit(vec, "query term")
        q = weight * unit if q is None else q + weight * unit
    norm = float(np.linalg.norm(q))
    if norm < 1e-9:
        raise DegenerateQueryError(
            "query terms cancel out; the composed vector has no direction")
    return q / norm


class RetrievalIndex:
    """Ordered ids over unit rows; immutable once built."""

    def __init__(self, ids: list[str], matrix: np.ndarray):
        self.ids = list(ids)
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self._pos = {id_: i for i, id_ in enumerate(ids)}

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, id_: str) -> bool:
        return id_ in self._pos

    def vector(self, id_: str) -> np.ndarray:
        """Stored unit vector for one id."""
        if id_ not in self._pos:
            raise ValidationError(f"id {id_!r} is not in the index")
        return self.matrix[self._pos[id_]]


class RankedResult:
    """Descending-score ranking; ties are broken by ascending id."""

    def __init__(self, items: list[tuple[str, float]]):
        self.items = items

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def ids(self) -> list[str]:
        return [id_ for id_, _ in self.items]

    def scores(self) -> list[float]:
        return [s for _, s in self.items]


def build_index(items: list[tuple[str, np.ndarray]], dim: int | None = None) -> RetrievalIndex:
    """Normalize and stack (id, vector) pairs, insertion order preserved.

    An empty item list builds a valid empty index (dim then comes from
    the argument, default 0).
    """
    ids = []
    seen = set()
    rows = []
    for id_, vec in items:
        if id_ in seen:
            raise ValidationError(f"duplicate index id {id_!r}")
        seen.add(id_)
        vec = np.asarray(vec, dtype=np.float64)
        if vec.ndim != 1:
            raise ValidationError(f"id {id_!r}: vector must be 1-d, got shape {vec.shape}")
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise ValidationError(
                f"id {id_!r}: vector length {vec.shape[0]} != index dim {dim}")
        norm = float(np.linalg.norm(vec))
        if norm < _EPS_NORM:
            raise ValidationError(f"id {id_!r}: zero vector cannot be indexed")
        rows.append((vec / norm).astype(np.float32))
        ids.append(id_)
    matrix = (np.vstack(rows) if rows
              else np.zeros((0, dim or 0), dtype=np.float32))
    return RetrievalIndex(ids, matrix)


def query_nearest(index: RetrievalIndex, q: np.ndarray, k: int) -> RankedResult:
    """Exact top-k by cosine score via a dense scan.

    Ordering is total: descending score, then ascending id. k larger than
    the index returns everything.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if len(index) == 0:
        return RankedResult([])
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (index.dim,):
        raise ValidationError(f"query must have length {index.dim}, got shape {q.shape}")
    norm = float(np.linalg.norm(q))
    if norm < _EPS_NORM:
        raise DegenerateQueryError("query vector has zero norm")
    scores = index.matrix @ (q / norm)
    order = np.argsort(-scores, kind="stable")
    # stable sort leaves equal scores in insertion order; re-sort each
    # equal-score run by id for a total, id-deterministic ordering
    out = []
    n = len(order)
    i = 0
    while i < n and len(out) < k:
        j = i
        while j < n and scores[order[j]] == scores[order[i]]:
            j += 1
        run = sorted(order[i:j], key=lambda p: index.ids[p])
        out.extend(run)
        i = j
    out = out[:k]
    return RankedResult([(index.ids[p], float(scores[p])) for p in out])


def save_index(index: RetrievalIndex, path) -> None:
    write_artifact(path, KIND, {"ids": index.ids, "dim": index.dim},
                   {"rows": index.matrix.astype("<f4")})


def load_index(path) -> RetrievalIndex:
    meta, arrays = read_artifact(path, expect_kind=KIND)
    rows = arrays["rows"]
    if rows.shape != (len(meta["ids"]), int(meta["dim"])):
        raise ArtifactFormatError(
            f"{path}: row matrix shape {rows.shape} disagrees with header")
    return RetrievalIndex(meta["ids"], rows)
