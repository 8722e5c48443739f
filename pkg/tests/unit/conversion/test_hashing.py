"""Unit tests for app/services/conversion/hashing.py"""
import math

import pytest


class TestFnv1a64:
    """Tests for fnv1a_64 function."""

    @pytest.mark.parametrize(
        "data, expected",
        [
            (b"", 0xCBF29CE484222325),
            (b"a", 0xAF63DC4C8601EC8C),
            (b"foobar", 0x85944171F73967E8),
        ],
    )
    def test_reference_vectors(self, data, expected):
        """Should match the published FNV-1a 64-bit test vectors."""
        from app.services.conversion import fnv1a_64

        assert fnv1a_64(data) == expected


class TestHashFeatures:
    """Tests for hash_features and hash_matrix functions."""

    def test_deterministic_and_sorted(self):
        """Should give the same sorted indices on every call."""
        from app.services.conversion import hash_features

        features = ((0, "red"), (1, "fr"), (2, "mobile"))

        first = hash_features(features, bits=16)

        assert first == hash_features(tuple(reversed(features)), bits=16)
        assert list(first.indices) == sorted(first.indices)
        assert all(0 <= i < 1 << 16 for i in first.indices)

    def test_field_separates_tokens(self):
        """Should hash the same token under different fields independently."""
        from app.services.conversion import feature_index

        assert feature_index((0, "x"), 28) != feature_index((1, "x"), 28)

    def test_duplicates_collapse(self):
        """Should keep one index per repeated feature."""
        from app.services.conversion import hash_features

        assert len(hash_features(((0, "a"), (0, "a")), bits=12).indices) == 1

    @pytest.mark.parametrize("bits", [9, 29])
    def test_bits_out_of_range(self, bits):
        """Should reject hash sizes outside [10, 28]."""
        from app.services.conversion import hash_features

        with pytest.raises(ValueError):
            hash_features(((0, "a"),), bits=bits)

    def test_matrix_matches_vectors(self):
        """Should place the hashed indices of each row in the CSR matrix."""
        from app.services.conversion import hash_features, hash_matrix

        rows = [((0, "a"), (1, "b")), (), ((0, "c"),)]

        X = hash_matrix(rows, bits=16)

        assert X.shape == (3, 1 << 16)
        for row, features in enumerate(rows):
            assert tuple(X[row].indices.tolist()) == hash_features(features, 16).indices
        assert X.sum() == 3


class TestRecencyBucket:
    """Tests for recency_bucket and context_features."""

    @pytest.mark.parametrize(
        "delta_c, token",
        [
            (None, "none"),
            (math.nan, "none"),
            (0, "lt1h"),
            (3599, "lt1h"),
            (3600, "lt6h"),
            (86399, "lt1d"),
            (2 * 86400, "lt3d"),
            (6 * 86400, "lt7d"),
            (10 * 86400, "lt30d"),
            (30 * 86400, "ge30d"),
        ],
    )
    def test_buckets(self, delta_c, token):
        """Should map the time since the last click to its bucket."""
        from app.services.conversion import recency_bucket

        assert recency_bucket(delta_c) == token

    def test_context_without_recency(self, make_record):
        """Should return the record features unchanged when recency is off."""
        from app.services.conversion import context_features

        record = make_record(features=((0, "a"),))

        assert context_features(record, 10, recency=False) == ((0, "a"),)
        assert context_features(record, 10) == ((0, "a"), (-1, "lt1h"))
