"""Numerical laboratory for consumption-savings-portfolio problems with recursive preferences."""

from .aggregator import (CobbDouglas, CustomAggregator, EpsteinZin, as_custom,
                         consumption_devaluation, make_aggregator, monotone_transform,
                         substitution_elasticity)
from .certainty import (CRRACurvature, CustomCurvature, MultiPrior, QuasiArithmetic,
                        SmoothAmbiguity, crra, eval_certainty_equivalent)
from .environment import Environment, ShockPath, homothetic_environment, power_environment
from .setting import (CobbDouglasTechnology, EntrepreneurBlock, GeneralTechnology,
                      IncomeBlock, LinearTerminal, CustomTerminal, Period, Setting,
                      StateSpace, validate_setting)

__all__ = [
    "CobbDouglas", "CustomAggregator", "EpsteinZin", "as_custom",
    "consumption_devaluation", "make_aggregator", "monotone_transform",
    "substitution_elasticity",
    "CRRACurvature", "CustomCurvature", "MultiPrior", "QuasiArithmetic",
    "SmoothAmbiguity", "crra", "eval_certainty_equivalent",
    "Environment", "ShockPath", "homothetic_environment", "power_environment",
    "CobbDouglasTechnology", "EntrepreneurBlock", "GeneralTechnology",
    "IncomeBlock", "LinearTerminal", "CustomTerminal", "Period", "Setting",
    "StateSpace", "validate_setting",
]
