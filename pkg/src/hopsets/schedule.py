"""Derived constants of one hopset build.

Scale ``k`` covers distances in ``(unit * 2**k, unit * 2**(k+1)]`` where
``unit`` is the smallest edge weight, so ``k`` runs over the same integer range
a unit-minimum-weight graph would use.
"""
from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Parameters outside the supported ranges."""


def pad_log2(n: int) -> int:
    """log2 of n rounded up to a power of two (at least 1)."""
    return max(1, (max(n, 2) - 1).bit_length())


def _ceil_pow(n: int, e: float) -> int:
    return max(1, math.ceil(n ** e - 1e-9))


def phase_count(kappa: int, rho: float) -> tuple[int, int]:
    """(ell, i0): index of the last phase and of the last exponential-growth phase."""
    kr = kappa * rho
    i0 = math.floor(math.log2(kr) + 1e-12)
    ell = i0 + math.ceil((kappa + 1) / kr - 1e-12) - 1
    return max(ell, 0), i0


def hop_sequence(eps, ell: int) -> list[Fraction]:
    """h_0 = 1, h_i = (1/eps + 2)(h_{i-1} + 1) + 2i + 1."""
    inv = 1 / Fraction(eps)
    h = [Fraction(1)]
    for i in range(1, ell + 1):
        h.append((inv + 2) * (h[-1] + 1) + 2 * i + 1)
    return h


def check_params(epsilon: float, kappa, rho: float) -> None:
    if not (isinstance(kappa, int) and kappa >= 2):
        raise ConfigError(f"kappa must be an integer >= 2, got {kappa!r}")
    if not 0 < rho < 0.5:
        raise ConfigError(f"rho must lie in (0, 1/2), got {rho!r}")
    if not 0 < epsilon <= 1:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon!r}")


@dataclass(frozen=True)
class ParameterSchedule:
    n: int
    epsilon: float
    kappa: int
    rho: float
    aspect_ratio: float
    unit: float
    log_n: int
    ell: int
    i0: int
    lam: int
    internal_epsilon: float
    eps_prime: float
    eps_double_prime: float
    h: tuple
    beta: int
    k0: int
    degrees: tuple
    sigma: tuple
    overrides: dict = field(default_factory=dict)

    # -- per scale quantities
    def eps_k(self, k: int) -> float:
        """Stretch carried by G_k = E + H_k; zero below the first built scale."""
        if k < self.k0:
            return 0.0
        return (1 + self.eps_prime) ** (k - self.k0 + 1) - 1

    def alpha(self, k: int) -> float:
        return self.internal_epsilon ** self.ell * self.unit * 2.0 ** (k + 1)

    def delta(self, k: int, i: int) -> float:
        return self.alpha(k) * (1 / self.internal_epsilon) ** i

    def delta_hat(self, k: int, i: int) -> float:
        return (1 + self.eps_k(k - 1)) * self.delta(k, i)

    def radii(self, k: int) -> list[float]:
        """R_0 .. R_{ell+1}."""
        r = [0.0]
        for i in range(self.ell + 1):
            r.append((2 * self.delta_hat(k, i) + 4 * r[-1]) * self.log_n + r[-1])
        return r

    def supercluster_weight(self, k: int, i: int) -> float:
        return 2 * (self.delta_hat(k, i) + 2 * self.radii(k)[i]) * self.log_n

    @property
    def scales(self) -> range:
        return range(self.k0, self.lam + 1)

    @property
    def vacuous(self) -> bool:
        return self.k0 > self.lam

    @property
    def explore_hops(self) -> int:
        return 2 * self.beta + 1

    @property
    def memory_hop_cap(self) -> int:
        return 2 * self.sigma[self.ell] + 2 * self.beta + 1

    def with_unit(self, unit: float) -> "ParameterSchedule":
        return replace(self, unit=unit)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "epsilon": self.epsilon, "kappa": self.kappa, "rho": self.rho,
            "aspect_ratio": self.aspect_ratio, "unit": self.unit, "log_n": self.log_n,
            "ell": self.ell, "i0": self.i0, "lambda": self.lam, "k0": self.k0,
            "internal_epsilon": self.internal_epsilon, "eps_prime": self.eps_prime,
            "eps_double_prime": self.eps_double_prime,
            "h": [str(x) for x in self.h], "beta": self.beta,
            "degrees": list(self.degrees), "sigma": list(self.sigma),
            "overrides": dict(sorted(self.overrides.items())),
        }


def compute_schedule(n: int, epsilon: float, kappa: int, rho: float, aspect: float,
                     unit: float = 1.0, *, internal_epsilon: float | None = None,
                     stretch_epsilon: float | None = None,
                     hopbound: int | None = None) -> ParameterSchedule:
    """All constants of a build on n vertices with aspect ratio ``aspect``.

    ``epsilon`` is the user-facing stretch.  By default the internal epsilon is
    rescaled so the compounded per-scale stretch stays within it, which makes
    beta astronomically large at small n.  The keyword overrides set the
    internal epsilon, the per-scale stretch growth or beta directly; builds
    using them keep every structural property but lose the stretch guarantee.
    """
    check_params(epsilon, kappa, rho)
    if aspect < 1:
        raise ConfigError(f"aspect ratio must be >= 1, got {aspect!r}")
    log_n = pad_log2(n)
    ell, i0 = phase_count(kappa, rho)
    lam = math.ceil(math.log2(aspect) - 1e-12) - 1 if aspect > 1 else -1
    overrides = {}
    if internal_epsilon is None:
        eps = epsilon / (40 * max(lam, 1) * log_n * (ell + 1))
    else:
        if not 0 < internal_epsilon < 1:
            raise ConfigError("internal epsilon must lie in (0, 1)")
        eps = internal_epsilon
        overrides["internal_epsilon"] = internal_epsilon
    if eps < sys.float_info.epsilon:
        raise ConfigError(f"internal epsilon {eps!r} is below machine precision")
    if stretch_epsilon is None:
        eps1 = 20 * log_n * eps * (ell + 1)
    else:
        eps1 = stretch_epsilon
        overrides["stretch_epsilon"] = stretch_epsilon
    eps2 = 2 * max(lam, 1) * eps1
    h = hop_sequence(eps, ell)
    if hopbound is None:
        beta = math.floor(h[-1])
    else:
        if hopbound < 1:
            raise ConfigError("hopbound must be >= 1")
        beta = int(hopbound)
        overrides["hopbound"] = beta
    k0 = beta.bit_length() - 1
    degrees = tuple(_ceil_pow(n, 2 ** i / kappa) if i <= i0 else _ceil_pow(n, rho)
                    for i in range(ell + 1))
    sigma = [0]
    for _ in range(ell + 1):
        sigma.append((4 * log_n + 1) * sigma[-1] + 2 * (2 * beta + 1) * log_n)
    sched = ParameterSchedule(
        n=n, epsilon=epsilon, kappa=kappa, rho=rho, aspect_ratio=aspect, unit=unit,
        log_n=log_n, ell=ell, i0=i0, lam=lam, internal_epsilon=eps, eps_prime=eps1,
        eps_double_prime=eps2, h=tuple(h), beta=beta, k0=k0, degrees=degrees,
        sigma=tuple(sigma), overrides=overrides)
    if beta >= n and lam >= 0:
        log.warning("hopset vacuous at this scale: beta=%d >= n=%d, plain %d-hop "
                    "Bellman-Ford is already exact", beta, n, beta)
    return sched
