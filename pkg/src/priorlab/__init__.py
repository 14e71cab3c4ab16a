"""Numerical laboratory for limits of prior and posterior sequences."""

from .convergence import (
    CompactSup,
    ConvergesTo,
    Diverges,
    Dominated,
    Monotone,
    NGrid,
    NoVerdict,
    check_density_criterion,
    check_q_vague,
    mass_escape,
    median_split,
    moment_trends,
)
from .families import MeasureFamily, ig_jcp_is_proper, jcp_family, location_family, scale_family
from .hypothesis import PointNullMixture, limit_regime, null_posterior_prob, prior_vague_limit
from .measures import RadonMeasure, TestFunction
from .posterior import Likelihood, check_narrow_convergence, estimator_limit, posterior, posterior_family

__all__ = [
    "CompactSup",
    "ConvergesTo",
    "Diverges",
    "Dominated",
    "Likelihood",
    "MeasureFamily",
    "Monotone",
    "NGrid",
    "NoVerdict",
    "PointNullMixture",
    "RadonMeasure",
    "TestFunction",
    "check_density_criterion",
    "check_narrow_convergence",
    "check_q_vague",
    "estimator_limit",
    "ig_jcp_is_proper",
    "jcp_family",
    "limit_regime",
    "location_family",
    "mass_escape",
    "median_split",
    "moment_trends",
    "null_posterior_prob",
    "posterior",
    "posterior_family",
    "prior_vague_limit",
    "scale_family",
]

__version__ = "0.1.0"
