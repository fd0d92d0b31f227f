import numpy as np
import pytest

from eislab.aggregator import CustomAggregator, EpsteinZin
from eislab.certainty import CRRACurvature, MultiPrior, crra
from eislab.errors import DistributionError, DomainError
from eislab.setting import (CustomTerminal, IncomeBlock, LinearTerminal, Period, Setting,
                            StateSpace, validate_setting)


def simple_setting(horizon=3, psi=2.0, gamma=4.0):
    returns = np.array([[1.05, 0.95], [1.10, 0.85]])
    return Setting.iid(EpsteinZin(0.9, psi), crra(gamma), returns, [0.5, 0.5], horizon)


def test_state_space_validation():
    with pytest.raises(DistributionError):
        StateSpace(np.array([0.5, 0.4]))
    with pytest.raises(DistributionError):
        StateSpace(np.array([1.2, -0.2]))
    s = StateSpace(np.array([0.25, 0.75]))
    assert s.n == 2
    prod = StateSpace.product(s, StateSpace.uniform(3))
    assert prod.n == 6
    assert prod.probs.sum() == pytest.approx(1.0, abs=1e-15)


def test_period_validation():
    states = StateSpace(np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        Period(EpsteinZin(0.9, 2.0), crra(2.0), np.array([[1.0, -0.5]]), states)
    with pytest.raises(DistributionError):
        Period(EpsteinZin(0.9, 2.0), crra(2.0), np.array([[1.0, 1.0, 1.0]]), states)
    mp = MultiPrior(CRRACurvature(2.0), [[0.6, 0.4]])
    Period(EpsteinZin(0.9, 2.0), mp, np.array([[1.0, 1.1]]), states)  # dims agree
    with pytest.raises(DistributionError):
        Period(EpsteinZin(0.9, 2.0), MultiPrior(CRRACurvature(2.0), [[0.3, 0.3, 0.4]]),
               np.array([[1.0, 1.1]]), states)


def test_standard_setting_certified():
    report = validate_setting(simple_setting())
    assert report.strongly_regular_ae
    assert not report.failed()
    assert "strongly regular" in report.summary()


def test_nonzero_terminal_normalization_flagged():
    s = simple_setting()
    bad = Setting(s.periods, CustomTerminal(lambda c: c + 1.0))
    report = validate_setting(bad)
    assert not report.strongly_regular_ae
    names = [c.name for c in report.failed()]
    assert any("u_T(0)=0" in n for n in names)


def test_missing_inada_flag_warns():
    base = EpsteinZin(0.9, 2.0)
    no_inada = CustomAggregator(base.f, base.f_c, base.f_v, base.f_cc, base.f_cv, base.f_vv,
                                homogeneous_degree_one=True, inada=False)
    states = StateSpace(np.array([1.0]))
    setting = Setting((Period(no_inada, crra(2.0), np.array([[1.05]]), states),))
    report = validate_setting(setting)
    assert report.strongly_regular_ae  # warning only
    assert any("Inada" in c.name for c in report.warnings)


def test_multi_prior_smoothness_warns():
    states = StateSpace(np.array([0.5, 0.5]))
    mp = MultiPrior(CRRACurvature(2.0), [[0.5, 0.5], [0.8, 0.2]])
    setting = Setting((Period(EpsteinZin(0.9, 2.0), mp, np.array([[1.05, 0.95]]), states),))
    report = validate_setting(setting)
    assert any("smooth" in c.name for c in report.warnings)


def test_income_block_validation_and_warning():
    returns = np.array([[1.05, 0.95]])
    income = IncomeBlock(1.0, (np.array([1.0, 1.0]),) * 2, (np.array([1.1, 0.9]),) * 2)
    s = Setting.iid(EpsteinZin(0.9, 2.0), crra(2.0), returns, [0.5, 0.5], 2, income=income)
    report = validate_setting(s)
    assert any("W(0,theta)" in c.name for c in report.warnings)
    with pytest.raises(DomainError):
        IncomeBlock(1.0, (np.array([0.0, 1.0]),), (np.array([1.0, 1.0]),))
    with pytest.raises(DistributionError):
        Setting.iid(EpsteinZin(0.9, 2.0), crra(2.0), returns, [0.5, 0.5], 3, income=income)


def test_digest_stability_and_sensitivity():
    a = simple_setting()
    b = simple_setting()
    assert a.digest() == b.digest()
    c = simple_setting(psi=2.5)
    assert a.digest() != c.digest()


def test_terminal_scale_broadcast():
    s = simple_setting()
    assert np.allclose(s.terminal_scale(), [1.0, 1.0])
    with pytest.raises(DomainError):
        Setting(s.periods, LinearTerminal(np.array([1.0, -1.0])))
    with pytest.raises(DistributionError):
        Setting(s.periods, LinearTerminal(np.array([1.0, 1.0, 1.0])))
