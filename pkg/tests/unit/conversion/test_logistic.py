"""Unit tests for app/services/conversion/logistic.py"""
import numpy as np
import pytest
from scipy import sparse


def random_problem(seed, n=40, bits=10):
    rng = np.random.default_rng(seed)
    dense = (rng.random((n, 1 << bits)) < 0.01).astype(float)
    targets = rng.random(n)
    return sparse.csr_matrix(dense), targets


class TestLogisticLoss:
    """Tests for logistic_loss function."""

    def test_zero_params(self):
        """Should equal n log 2 at zero parameters."""
        from app.services.conversion import logistic_loss

        X, targets = random_problem(0)

        loss, _ = logistic_loss(np.zeros(X.shape[1] + 1), X, targets, l2=1.0)

        assert loss == pytest.approx(X.shape[0] * np.log(2.0))

    @pytest.mark.parametrize("seed", range(3))
    def test_gradient_matches_finite_differences(self, seed):
        """Should match central differences on active coordinates and the bias."""
        from app.services.conversion import logistic_loss

        X, targets = random_problem(seed)
        rng = np.random.default_rng(50 + seed)
        params = rng.normal(scale=0.3, size=X.shape[1] + 1)

        _, grad = logistic_loss(params, X, targets, l2=0.5)

        coordinates = list(np.unique(X.indices)[:5]) + [X.shape[1]]
        for i in coordinates:
            h = 1e-5
            step = np.zeros_like(params)
            step[i] = h
            upper, _ = logistic_loss(params + step, X, targets, 0.5)
            lower, _ = logistic_loss(params - step, X, targets, 0.5)
            numeric = (upper - lower) / (2 * h)
            assert grad[i] == pytest.approx(numeric, rel=1e-5, abs=1e-6)

    def test_bias_not_penalized(self):
        """Should leave the bias out of the L2 term."""
        from app.services.conversion import logistic_loss

        X = sparse.csr_matrix((2, 1 << 10))
        targets = np.array([0.5, 0.5])
        params = np.zeros(X.shape[1] + 1)
        params[-1] = 3.0

        unpenalized, _ = logistic_loss(params, X, targets, l2=0.0)
        penalized, _ = logistic_loss(params, X, targets, l2=10.0)

        assert penalized == unpenalized


class TestTrain:
    """Tests for train, train_on_clicks and fit_logistic functions."""

    def test_symmetric_problem(self):
        """Should find opposite weights and a zero bias for mirrored examples."""
        from app.services.conversion import hash_features, train

        a = hash_features(((0, "a"),), bits=16)
        b = hash_features(((0, "b"),), bits=16)

        model = train([(a, 1.0, True), (b, 0.0, False)], l2=1.0)

        w_a = model.weights[a.indices[0]]
        w_b = model.weights[b.indices[0]]
        assert abs(model.bias) < 1e-4
        assert w_a > 0 > w_b
        assert w_a == pytest.approx(-w_b, abs=1e-4)
        assert model.bits == 16

    def test_improves_on_zero_weights(self):
        """Should reach a lower loss than the all-zero model."""
        from app.services.conversion import fit_logistic, logistic_loss

        X, targets = random_problem(7, n=200)

        model = fit_logistic(X, targets, l2=1.0)

        fitted = np.append(model.weights, model.bias)
        assert logistic_loss(fitted, X, targets, 1.0)[0] < logistic_loss(np.zeros_like(fitted), X, targets, 1.0)[0]

    def test_single_class(self):
        """Should refuse data without negative weight."""
        from app.core.exceptions import TrainingError
        from app.services.conversion import fit_logistic

        X, _ = random_problem(1)

        with pytest.raises(TrainingError) as info:
            fit_logistic(X, np.ones(X.shape[0]))

        assert info.value.details["n_examples"] == X.shape[0]

    def test_empty_examples(self):
        """Should refuse an empty example list."""
        from app.core.exceptions import TrainingError
        from app.services.conversion import train

        with pytest.raises(TrainingError):
            train([])

    def test_train_on_clicks(self, three_click_conversion):
        """Should train on labeled clicks and rank the positive context higher."""
        from app.schemas.records import LabeledClick
        from app.services.conversion import hash_features, predict, train_on_clicks

        record = three_click_conversion[0]
        clicks = [
            LabeledClick(record=record, features=((0, "good"),), weight=1.0),
            LabeledClick(record=record, features=((0, "good"),), weight=0.5),
            LabeledClick(record=record, features=((0, "bad"),), weight=0.0),
            LabeledClick(record=record, features=((0, "bad"),), weight=0.0),
        ]

        model = train_on_clicks(clicks, bits=12, l2=0.1)

        good = predict(model, hash_features(((0, "good"),), 12))
        bad = predict(model, hash_features(((0, "bad"),), 12))
        assert good > bad
