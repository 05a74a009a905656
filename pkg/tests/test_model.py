import json

import numpy as np
import pytest

from tubecast import (ArimaSpec, DimensionError, SeriesWindow, SpecError, UnivariateArmaSpec,
                      VarmaSpec, load_model, load_series, validate_spec)
from tubecast.model import as_varma, block_params, dumps_model, loads_model, spec_from_dict


def test_arma11_is_valid_and_causal():
    rep = validate_spec(UnivariateArmaSpec([0.5], [0.3], 1.0))
    assert rep.valid and rep.causal and rep.invertible
    assert rep.ar_min_root_modulus == pytest.approx(2.0)
    assert rep.warnings == ()


def test_explosive_ar_warns_but_is_structurally_valid():
    rep = validate_spec(UnivariateArmaSpec([1.2], [], 1.0))
    assert not rep.causal
    assert rep.ar_min_root_modulus == pytest.approx(1 / 1.2)
    assert any("causal" in w for w in rep.warnings)


def test_varma_dimension_mismatch_raises_naming_matrix():
    with pytest.raises(SpecError, match="Phi"):
        VarmaSpec(2, [np.zeros((2, 3))])


@pytest.mark.parametrize("kwargs", [dict(sigma2=0.0), dict(sigma2=-1.0), dict(phi=[np.nan]),
                                    dict(mean=np.inf)])
def test_univariate_rejects_bad_values(kwargs):
    with pytest.raises(SpecError):
        UnivariateArmaSpec(**kwargs)


def test_negative_d_rejected():
    with pytest.raises(SpecError):
        ArimaSpec(UnivariateArmaSpec(), -1)
    with pytest.raises(SpecError):
        VarmaSpec(1, d=-1)


@pytest.mark.parametrize("sigma", [[[1.0, 0.5], [0.4, 1.0]], [[1.0, 2.0], [2.0, 1.0]], [[1.0]]])
def test_sigma_z_must_be_symmetric_pd_and_m_by_m(sigma):
    with pytest.raises(SpecError):
        VarmaSpec(2, sigmaZ=sigma)


def test_varma_defaults_and_readonly():
    spec = VarmaSpec(3)
    assert np.array_equal(spec.sigmaZ, np.eye(3))
    assert np.array_equal(spec.mean, np.zeros(3))
    assert spec.p == spec.q == 0
    with pytest.raises(ValueError):
        spec.sigmaZ[0, 0] = 2.0


def test_orders_and_min_window():
    arma = UnivariateArmaSpec([0.5, 0.1], [0.3], 2.0)
    assert (arma.p, arma.q, arma.d, arma.m, arma.min_window) == (2, 1, 0, 1, 4)
    ar = ArimaSpec(arma, 2)
    assert (ar.p, ar.q, ar.d, ar.min_window) == (2, 1, 2, 6)
    assert ar.phi == arma.phi and ar.sigma2 == 2.0


def test_block_params_scalar():
    Phi, Theta, S, d, mean = block_params(ArimaSpec(UnivariateArmaSpec([0.5], [0.2], 3.0, 1.5), 1))
    assert Phi.shape == (1, 1, 1) and Theta.shape == (1, 1, 1)
    assert S.tolist() == [[3.0]] and d == 1 and mean.tolist() == [1.5]


def test_as_varma_matches_block_params():
    spec = ArimaSpec(UnivariateArmaSpec([0.5], [0.2], 3.0), 2)
    v = as_varma(spec)
    assert v.m == 1 and v.d == 2 and v.sigmaZ.tolist() == [[3.0]]


@pytest.mark.parametrize("spec", [
    UnivariateArmaSpec([0.5, -0.25], [0.125], 0.1, 3.0),
    ArimaSpec(UnivariateArmaSpec([0.1], [], 2.0), 0),
    ArimaSpec(UnivariateArmaSpec([], [0.7], 1.0), 2),
    VarmaSpec(2, [[[0.5, 0.1], [0.0, 0.2]]], [], [[1.0, 0.1], [0.1, 2.0]], d=1, mean=[1.0, -2.0]),
])
def test_config_round_trip(spec):
    assert loads_model(dumps_model(spec)) == spec
    assert type(loads_model(dumps_model(spec))) is type(spec)


def test_json_and_toml_files(tmp_path):
    spec = UnivariateArmaSpec([0.5], [0.3], 2.0)
    (tmp_path / "m.toml").write_text(dumps_model(spec))
    (tmp_path / "m.json").write_text(json.dumps({"phi": [0.5], "theta": [0.3], "sigma2": 2.0}))
    assert load_model(tmp_path / "m.toml") == spec
    assert load_model(tmp_path / "m.json") == spec


@pytest.mark.parametrize("doc", [{"phi": [0.5], "bogus": 1}, {"p": 2, "phi": [0.5]}, {"m": 0},
                                 {"d": 1.5}, {"m": 2, "Phi": [[[1, 0, 0], [0, 1, 0]]]}, "x"])
def test_malformed_configs(doc):
    with pytest.raises(SpecError):
        spec_from_dict(doc)


def test_unparseable_and_missing_config(tmp_path):
    (tmp_path / "bad.toml").write_text("phi = [")
    with pytest.raises(SpecError):
        load_model(tmp_path / "bad.toml")
    with pytest.raises(SpecError):
        load_model(tmp_path / "absent.toml")


def test_vector_config_sigma2_default():
    spec = spec_from_dict({"m": 2, "sigma2": 2.0})
    assert np.array_equal(spec.sigmaZ, 2 * np.eye(2))


def test_series_window_checks():
    with pytest.raises(DimensionError):
        SeriesWindow([1.0, np.nan])
    with pytest.raises(DimensionError):
        SeriesWindow(np.zeros((2, 2, 2)))
    spec = UnivariateArmaSpec([0.5], [0.3])
    with pytest.raises(DimensionError):
        SeriesWindow([1.0, 2.0]).check_for(spec)
    SeriesWindow([1.0, 2.0, 3.0]).check_for(spec)
    with pytest.raises(DimensionError):
        SeriesWindow(np.ones((5, 2))).check_for(spec)


def test_load_series_with_and_without_header(tmp_path):
    (tmp_path / "a.csv").write_text("x\n1\n2\n3\n")
    (tmp_path / "b.csv").write_text("1,2\n3,4\n")
    assert load_series(tmp_path / "a.csv").values.tolist() == [1.0, 2.0, 3.0]
    assert load_series(tmp_path / "b.csv").values.tolist() == [[1.0, 2.0], [3.0, 4.0]]
    (tmp_path / "c.csv").write_text("x\n")
    with pytest.raises(DimensionError):
        load_series(tmp_path / "c.csv")
