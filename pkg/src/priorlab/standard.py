"""Ready-made proper and improper measures used by families, tests and the catalog."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .measures import Atom, Continuous, Discrete, RadonMeasure
from .numerics import Finite, Infinite, Interval

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _src(density: str, **params: float) -> dict:
    return {"density": density, "params": {k: float(v) for k, v in params.items()}}


def normal(mu: float = 0.0, sigma: float = 1.0) -> RadonMeasure:
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    def log_density(x: np.ndarray) -> np.ndarray:
        z = (x - mu) / sigma
        return -0.5 * z * z - LOG_SQRT_2PI - math.log(sigma)

    return RadonMeasure(
        Continuous(Interval.real_line()),
        log_density=log_density,
        mass_hint=Finite(1.0),
        landmarks=tuple(mu + sigma * k for k in (-8, -4, -2, -1, 0, 1, 2, 4, 8)),
        label=f"N({mu:g},{sigma:g}^2)",
        source=_src("exp(-(theta-mu)^2/(2*sigma^2))/(sqrt(2*pi)*sigma)", mu=mu, sigma=sigma),
    )


def uniform(a: float, b: float) -> RadonMeasure:
    """Uniform law on [a, b], as a measure on the whole line."""
    if not a < b:
        raise ValueError("need a < b")
    height = 1.0 / (b - a)

    def density(x: np.ndarray) -> np.ndarray:
        return np.where((x >= a) & (x <= b), height, 0.0)

    return RadonMeasure(
        Continuous(Interval.real_line()),
        density=density,
        mass_hint=Finite(1.0),
        landmarks=(a, b),
        label=f"U([{a:g},{b:g}])",
        source=_src("indicator(theta >= a)*indicator(theta <= b)/(b-a)", a=a, b=b),
    )


def cauchy(loc: float = 0.0, scale: float = 1.0) -> RadonMeasure:
    def density(x: np.ndarray) -> np.ndarray:
        z = (x - loc) / scale
        return 1.0 / (math.pi * scale * (1.0 + z * z))

    return RadonMeasure(
        Continuous(Interval.real_line()),
        density=density,
        mass_hint=Finite(1.0),
        landmarks=tuple(loc + scale * k for k in (-10, -1, 0, 1, 10)),
        label=f"Cauchy({loc:g},{scale:g})",
        source=_src("1/(pi*s*(1+((theta-l)/s)^2))", l=loc, s=scale),
    )


def gamma(shape: float, rate: float) -> RadonMeasure:
    """Gamma law with density rate^shape theta^(shape-1) e^(-rate theta) / Gamma(shape)."""
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    norm = shape * math.log(rate) - special.gammaln(shape)

    def log_density(x: np.ndarray) -> np.ndarray:
        return (shape - 1.0) * np.log(x) - rate * x + norm

    scale = 1.0 / rate
    return RadonMeasure(
        Continuous(Interval.positive()),
        log_density=log_density,
        mass_hint=Finite(1.0),
        landmarks=tuple(scale * k for k in (1e-2, 1e-1, 1.0, 10.0, 100.0)),
        label=f"Gamma({shape:g},{rate:g})",
        source=_src("b^a*theta^(a-1)*exp(-b*theta)/gamma_fn(a)", a=shape, b=rate),
    )


def gamma_kernel(shape: float, rate: float) -> RadonMeasure:
    """Unnormalized theta^(shape-1) e^(-rate theta) on (0, inf); improper when shape <= 0."""

    def log_density(x: np.ndarray) -> np.ndarray:
        return (shape - 1.0) * np.log(x) - rate * x

    hint = Infinite() if shape <= 0 or rate <= 0 else None
    return RadonMeasure(
        Continuous(Interval.positive()),
        log_density=log_density,
        mass_hint=hint,
        label=f"theta^{shape - 1:g}*exp(-{rate:g}theta)",
        source=_src("theta^(a-1)*exp(-b*theta)", a=shape, b=rate),
    )


def exponential(rate: float = 1.0) -> RadonMeasure:
    def density(x: np.ndarray) -> np.ndarray:
        return rate * np.exp(-rate * x)

    return RadonMeasure(
        Continuous(Interval.positive()),
        density=density,
        mass_hint=Finite(1.0),
        landmarks=tuple(k / rate for k in (0.1, 1.0, 10.0)),
        label=f"Exp({rate:g})",
        source=_src("r*exp(-r*theta)", r=rate),
    )


def lognormal(mu: float = 0.0, sigma: float = 1.0) -> RadonMeasure:
    def log_density(x: np.ndarray) -> np.ndarray:
        lx = np.log(x)
        z = (lx - mu) / sigma
        return -0.5 * z * z - lx - LOG_SQRT_2PI - math.log(sigma)

    return RadonMeasure(
        Continuous(Interval.positive()),
        log_density=log_density,
        mass_hint=Finite(1.0),
        landmarks=tuple(math.exp(mu + sigma * k) for k in (-8, -2, 0, 2, 8) if abs(mu + sigma * k) < 700),
        label=f"LN({mu:g},{sigma:g}^2)",
        source=_src("exp(-(log(theta)-mu)^2/(2*sigma^2))/(theta*sqrt(2*pi)*sigma)", mu=mu, sigma=sigma),
    )


def beta(a: float, b: float, closed: bool = False) -> RadonMeasure:
    """Beta law on (0, 1), or on [0, 1] when ``closed``."""
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    norm = -special.betaln(a, b)

    def log_density(x: np.ndarray) -> np.ndarray:
        return (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) + norm

    iv = Interval.closed(0.0, 1.0) if closed else Interval.open(0.0, 1.0)
    return RadonMeasure(
        Continuous(iv),
        log_density=log_density,
        mass_hint=Finite(1.0),
        label=f"Beta({a:g},{b:g})" + ("[0,1]" if closed else ""),
        source=_src(
            "theta^(a-1)*(1-theta)^(b-1)*gamma_fn(a+b)/(gamma_fn(a)*gamma_fn(b))", a=a, b=b
        ),
    )


def poisson(lam: float) -> RadonMeasure:
    if lam <= 0:
        raise ValueError("Poisson mean must be positive")
    log_lam = math.log(lam)

    def log_density(k: np.ndarray) -> np.ndarray:
        return k * log_lam - lam - special.gammaln(k + 1.0)

    return RadonMeasure(
        Discrete(None),
        log_density=log_density,
        mass_hint=Finite(1.0),
        label=f"Poisson({lam:g})",
        source=_src("lam^theta*exp(-lam)/factorial(theta)", lam=lam),
    )


def lebesgue(iv: Interval | None = None) -> RadonMeasure:
    iv = iv or Interval.real_line()

    def density(x: np.ndarray) -> np.ndarray:
        return np.ones_like(x)

    hint = Finite(iv.length) if iv.is_bounded else Infinite()
    return RadonMeasure(Continuous(iv), density=density, mass_hint=hint, label="Lebesgue", source=_src("1"))


def counting() -> RadonMeasure:
    return RadonMeasure(
        Discrete(None), density=lambda k: np.ones_like(k), mass_hint=Infinite(), label="counting", source=_src("1")
    )


def haar_scale() -> RadonMeasure:
    """Scale-invariant measure d theta / theta on (0, inf)."""
    return RadonMeasure(
        Continuous(Interval.positive()),
        log_density=lambda x: -np.log(x),
        mass_hint=Infinite(),
        label="1/theta",
        source=_src("1/theta"),
    )


def haldane(closed: bool = False) -> RadonMeasure:
    """d theta / (theta (1 - theta)) on (0, 1)."""
    iv = Interval.closed(0.0, 1.0) if closed else Interval.open(0.0, 1.0)
    return RadonMeasure(
        Continuous(iv),
        log_density=lambda x: -np.log(x) - np.log1p(-x),
        mass_hint=Infinite(),
        label="Haldane",
        source=_src("1/(theta*(1-theta))"),
    )


def exp_tilt(c: float) -> RadonMeasure:
    """Density e^(c theta) on the real line."""
    return RadonMeasure(
        Continuous(Interval.real_line()),
        log_density=lambda x: c * x,
        mass_hint=Infinite(),
        label=f"exp({c:g}theta)",
        source=_src("exp(c*theta)", c=c),
    )


def dirac(location: float, weight: float = 1.0, iv: Interval | None = None) -> RadonMeasure:
    iv = iv or Interval.real_line()
    return RadonMeasure(
        Continuous(iv),
        atoms=(Atom(location, weight),),
        mass_hint=Finite(weight),
        label=f"{weight:g}*delta({location:g})",
        source={"density": None, "params": {}},
    )
