"""Network description: tiers, path-loss variants and associations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .errors import BadParameter, DeltaOutOfRange
from .fading import FadingModel, make_model


@dataclass(frozen=True)
class GammaGain:
    """Gamma(M, theta) serving-link gain produced by multi-antenna precoding."""

    m: float
    theta: float = 1.0

    def model(self) -> FadingModel:
        return make_model("gammagain", m=self.m, theta=self.theta)


@dataclass(frozen=True)
class Tier:
    """One tier of base stations.

    Parameters
    ----------
    density : float
        BS density per unit area.
    power : float
        Transmit power.
    threshold : float
        SINR threshold (linear).
    fading : FadingModel
        Serving-link power gain.
    interferer_fading : FadingModel, optional
        Gain of interfering links; defaults to ``fading``.
    antennas : int
        Number of transmit antennas.
    miso_gain : GammaGain, optional
        Replaces ``fading`` on the serving link when given.
    """

    density: float
    power: float
    threshold: float
    fading: FadingModel
    interferer_fading: Optional[FadingModel] = None
    antennas: int = 1
    miso_gain: Optional[GammaGain] = None

    def __post_init__(self):
        for name in ("density", "power", "threshold"):
            x = getattr(self, name)
            if not (x > 0 and math.isfinite(x)):
                raise BadParameter(f"tier {name} must be positive (got {x!r})")
        if self.antennas < 1:
            raise BadParameter("tier antennas must be >= 1")
        if self.interferer_fading is None:
            object.__setattr__(self, "interferer_fading", self.fading)

    @property
    def signal_model(self) -> FadingModel:
        return self.miso_gain.model() if self.miso_gain is not None else self.fading


@dataclass(frozen=True)
class Unbounded:
    """``L(r) = r^-alpha``."""

    alpha: float


@dataclass(frozen=True)
class Bounded:
    """``L(r) = (1 + r)^-alpha``."""

    alpha: float


@dataclass(frozen=True)
class ThreeD:
    """``L(r) = (h^2 + r^2)^(-alpha/2)``."""

    alpha: float
    h: float = 0.0


@dataclass(frozen=True)
class MmWave:
    """Bounded LOS/NLOS path loss with LOS probability ``exp(-tau r)``.

    ``d`` is the antenna spacing, ``wavelength`` the carrier wavelength and
    ``fc`` the carrier frequency.
    """

    alpha_l: float
    alpha_n: float
    tau: float = 0.0
    d: float = 0.5
    wavelength: float = 1.0
    fc: float = 1.0

    @property
    def alpha(self) -> float:
        return self.alpha_l


PathLoss = Union[Unbounded, Bounded, ThreeD, MmWave]


@dataclass(frozen=True)
class ClosestBS:
    """Associate with the largest average received power."""


@dataclass(frozen=True)
class StrongestBS:
    """Associate with the largest instantaneous received power."""


@dataclass(frozen=True)
class FixedDistance:
    """Dedicated transmitter at distance ``r`` (ad hoc dipole)."""

    r: float


Association = Union[ClosestBS, StrongestBS, FixedDistance]


@dataclass(frozen=True)
class NetworkModel:
    """A multi-tier network seen from a typical user at the origin."""

    tiers: tuple
    path_loss: PathLoss
    noise: float = 0.0
    association: Association = field(default_factory=ClosestBS)

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if not self.tiers:
            raise BadParameter("network needs at least one tier")
        if self.noise < 0:
            raise BadParameter("noise power must be >= 0")
        pl = self.path_loss
        alphas = [pl.alpha_l, pl.alpha_n] if isinstance(pl, MmWave) else [pl.alpha]
        for a in alphas:
            if not a > 2:
                raise DeltaOutOfRange(f"path-loss exponent must exceed 2 (got {a:g})")
        if isinstance(pl, ThreeD) and pl.h < 0:
            raise BadParameter("antenna height must be >= 0")
        if isinstance(pl, MmWave):
            if pl.tau < 0 or min(pl.d, pl.wavelength, pl.fc) <= 0:
                raise BadParameter("mmWave needs tau >= 0 and positive d, wavelength, fc")
        if isinstance(self.association, FixedDistance) and not self.association.r > 0:
            raise BadParameter("dipole distance must be positive")

    @property
    def alpha(self) -> float:
        return self.path_loss.alpha

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    def with_density(self, lam: float) -> "NetworkModel":
        """Copy with every tier density set to ``lam``."""
        return replace(self, tiers=tuple(replace(t, density=lam) for t in self.tiers))

    def scale_density(self, k: float) -> "NetworkModel":
        return replace(self, tiers=tuple(replace(t, density=t.density * k) for t in self.tiers))

    def with_threshold(self, beta: float) -> "NetworkModel":
        return replace(self, tiers=tuple(replace(t, threshold=beta) for t in self.tiers))


@dataclass
class CoverageEstimate:
    """Coverage value with error diagnostics.

    ``value`` is clamped to [0, 1]; the unclamped number is kept in
    ``diagnostics["raw"]``.
    """

    value: float
    residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def make(cls, raw: float, residual: float, **diag):
        diag["raw"] = float(raw)
        return cls(float(min(1.0, max(0.0, raw))), float(residual), diag)

    def __float__(self):
        return self.value


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm_to_watt(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)
