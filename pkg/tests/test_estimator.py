import numpy as np
import pytest
from sklearn.base import clone

from qmin import generators as gen
from qmin.estimator import AdaptedBasisTransformer, MINEstimator, check_state, check_states
from qmin.exceptions import ShapeError, TraceError


def test_check_state_inference():
    rho = gen.bell_state()
    assert check_state(rho) is rho
    assert check_state(rho.entries, dim_a=2).shape == (2, 2)
    assert check_state(np.eye(6) / 6, dim_b=3).shape == (2, 3)
    with pytest.raises(ShapeError):
        check_state(rho.entries)
    with pytest.raises(ShapeError):
        check_state(rho, dim_a=3)
    with pytest.raises(TraceError):
        check_state(np.eye(4), dim_a=2)


def test_check_states_batches():
    a, b = gen.bell_state(), gen.ginibre_random_mixed(2, 2, seed=1)
    assert len(check_states([a, b])) == 2
    assert len(check_states(np.stack([a.entries, b.entries]), dim_a=2)) == 2
    assert len(check_states(a)) == 1
    with pytest.raises(ShapeError):
        check_states(np.zeros((2, 2, 2, 2)), dim_a=2)


def test_min_estimator():
    states = [gen.bell_state(), gen.product_state(np.eye(2) / 2, np.diag([0.3, 0.7]))]
    est = MINEstimator(seed=3)
    feats = est.fit_transform(states)
    assert feats.shape == (2, 4)
    np.testing.assert_allclose(est.values_, [0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(est.transform(states), feats)
    assert list(est.get_feature_names_out()) == ["value", "residual", "upper_bound_blockwise", "upper_bound_global"]
    params = est.get_params()
    assert params["seed"] == 3 and params["restarts"] is None
    assert clone(est).get_params() == params
    est.set_params(restarts=4)
    assert est._config().restarts == 4


def test_adapted_basis_transformer_round_trip():
    rho = gen.engineered_degenerate(3, 2, [2, 1], seed=2)
    other = gen.ginibre_random_mixed(3, 2, seed=5)
    tr = AdaptedBasisTransformer().fit(rho)
    assert tr.spectrum_.deg_count == 1
    c = tr.transform([rho, other])
    assert c.shape == (2, 9, 4)
    np.testing.assert_allclose(np.sum(c**2, axis=(1, 2)), [rho.purity(), other.purity()], atol=1e-12)
    np.testing.assert_allclose(tr.inverse_transform(c[1]), other.entries, atol=1e-12)
    np.testing.assert_allclose(tr.inverse_transform(c)[0], rho.entries, atol=1e-12)


def test_transformer_requires_fit():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        AdaptedBasisTransformer().transform(gen.bell_state())
