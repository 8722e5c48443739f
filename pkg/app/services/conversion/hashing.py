"""Hashing trick: categorical (field, token) pairs to sparse binary vectors."""
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from app.schemas.conversion import HashedFeatureVector
from app.schemas.records import Feature, ImpressionRecord

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

MIN_BITS = 10
MAX_BITS = 28

# Field index of the time-since-last-click token appended to every context.
RECENCY_FIELD = -1

_RECENCY_EDGES: Tuple[Tuple[int, str], ...] = (
    (3600, "lt1h"),
    (6 * 3600, "lt6h"),
    (86400, "lt1d"),
    (3 * 86400, "lt3d"),
    (7 * 86400, "lt7d"),
    (30 * 86400, "lt30d"),
)


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


@lru_cache(maxsize=1 << 20)
def _feature_hash(field_index: int, token: str) -> int:
    return fnv1a_64(f"{field_index}:{token}".encode("utf-8"))


def feature_index(feature: Feature, bits: int) -> int:
    return _feature_hash(feature[0], feature[1]) & ((1 << bits) - 1)


def _check_bits(bits: int) -> None:
    if not MIN_BITS <= bits <= MAX_BITS:
        raise ValueError(f"hash bits must lie in [{MIN_BITS}, {MAX_BITS}], got {bits}")


def hash_features(features: Iterable[Feature], bits: int) -> HashedFeatureVector:
    """FNV-1a of "field_index:token" modulo 2**bits, deduplicated and sorted."""
    _check_bits(bits)
    indices = sorted({feature_index(f, bits) for f in features})
    return HashedFeatureVector(indices=tuple(indices), bits=bits)


def hash_matrix(feature_lists: Sequence[Iterable[Feature]], bits: int) -> sparse.csr_matrix:
    """CSR design matrix with one binary row per feature list."""
    _check_bits(bits)
    indptr = np.zeros(len(feature_lists) + 1, dtype=np.int64)
    columns = []
    for row, features in enumerate(feature_lists):
        active = sorted({feature_index(f, bits) for f in features})
        columns.extend(active)
        indptr[row + 1] = indptr[row] + len(active)
    indices = np.asarray(columns, dtype=np.int64)
    data = np.ones(indices.shape[0], dtype=float)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(feature_lists), 1 << bits))


def vectors_matrix(vectors: Sequence[HashedFeatureVector], bits: int) -> sparse.csr_matrix:
    """CSR matrix of already hashed vectors."""
    for vector in vectors:
        if vector.bits != bits:
            raise ValueError(f"vector hashed with {vector.bits} bits, model expects {bits}")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    np.cumsum([len(v.indices) for v in vectors], out=indptr[1:])
    indices = np.fromiter((i for v in vectors for i in v.indices), dtype=np.int64, count=int(indptr[-1]))
    data = np.ones(indices.shape[0], dtype=float)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), 1 << bits))


def recency_bucket(delta_c: Optional[float]) -> str:
    """Bucketed time since the last click: none, lt1h, lt6h, lt1d, lt3d, lt7d, lt30d or ge30d."""
    if delta_c is None or delta_c != delta_c:
        return "none"
    for edge, token in _RECENCY_EDGES:
        if delta_c < edge:
            return token
    return "ge30d"


def context_features(record: ImpressionRecord, delta_c: Optional[float], recency: bool = True) -> Tuple[Feature, ...]:
    """The record's categorical features, plus the recency token when enabled."""
    if not recency:
        return record.features
    return record.features + ((RECENCY_FIELD, recency_bucket(delta_c)),)
