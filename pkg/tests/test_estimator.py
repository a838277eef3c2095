import numpy as np
import pytest

from microloc import NotFitted, WavefrontDetector
from microloc.fixtures import jump_1d


@pytest.fixture(scope="module")
def fitted():
    return WavefrontDetector(q=1.0, p=1.0, s=1.0, method="fl").fit(jump_1d())


def test_predict_codes(fitted):
    X = np.array([[0.0, 1.0], [0.0, -1.0], [3.0, 1.0], [1.0, 1.0]])
    codes = fitted.predict(X)
    assert codes.tolist() == [1, 1, 0, 0]


def test_predict_records(fitted):
    est = fitted.predict_records([[0.0, 1.0]])
    assert len(est.records) == 1
    assert est.records[0].verdict_fl.kind == "divergent"


def test_both_methods_demand_agreement():
    det = WavefrontDetector(q=1.0, s=1.0, method="both").fit(jump_1d())
    codes = det.predict([[0.0, 1.0], [1.0, 1.0]])
    assert codes.tolist() == [1, 0]


def test_score(fitted):
    X = [[0.0, 1.0], [3.0, 1.0]]
    assert fitted.score(X, [1, 0]) == 1.0
    assert fitted.score(X, [0, 1]) == 0.0


def test_get_set_params_round_trip():
    det = WavefrontDetector(q=2.0, s=0.5, aperture_deg=15.0)
    params = det.get_params()
    clone = WavefrontDetector(**params)  # sklearn-style clone
    assert clone.get_params() == params
    det.set_params(q=1.0, margin=0.2)
    assert det.q == 1.0 and det.margin == 0.2
    with pytest.raises(ValueError):
        det.set_params(bogus=1)


def test_not_fitted_and_input_validation():
    det = WavefrontDetector()
    with pytest.raises(NotFitted):
        det.predict([[0.0, 1.0]])
    with pytest.raises(TypeError):
        det.fit(np.zeros(8))
    det.fit(jump_1d(n=2048))
    with pytest.raises(ValueError):
        det.predict([[0.0, 1.0, 2.0]])  # wrong row width for d = 1


def test_fit_from_path(tmp_path):
    from microloc import save_signal

    f = jump_1d(n=2048)
    save_signal(f, tmp_path / "sig")
    det = WavefrontDetector(q=1.0, s=1.0, method="fl").fit(tmp_path / "sig.json")
    assert det.predict([[0.0, 1.0]]).tolist() == [1]


def test_invalid_method_rejected():
    with pytest.raises(ValueError):
        WavefrontDetector(method="nope").fit(jump_1d(n=2048))
