"""Three-bounce path enumeration and device feasibility.

A path through the device is the triple of internal diffraction orders
(n1, n2, n3) with n1 + n2 + n3 equal to the device's total order.  Each
surviving path fixes the two internal angles, the first-to-third reflection
span relative to the plate separation (the geometry ratio d/s), and the
transmission rate, the product of the per-bounce diffraction populations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diffraction import (
    Grating,
    MonochromatorSetting,
    Particle,
    incidence_for_output,
    wavelength_ratio,
)
from .errors import ConfigurationError

#: Relative tolerance used to merge paths with equal geometry ratio.
GROUP_RTOL = 1e-9


@dataclass(frozen=True)
class DeviceGeometry:
    """Parallel-plate device: plate separation s and plate length l."""

    separation: float  # m
    length: float  # m

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError(f"separation must be positive, got {self.separation}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def length_ratio(self) -> float:
        """Length-to-separation ratio l/s."""
        return self.length / self.separation


@dataclass(frozen=True)
class DiffractionPath:
    """One realizable (n1, n2, n3) bounce sequence at a given velocity.

    ``transmission`` is None when the grating has no reflection probability
    for one of the orders involved.
    """

    n1: int
    n2: int
    n3: int
    alpha1: float  # rad
    alpha2: float  # rad
    total_order: int
    geometry_ratio: float  # d/s = tan(alpha1) + tan(alpha2)
    transmission: float | None

    @property
    def orders(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    def span(self, separation: float) -> float:
        """First-to-third reflection distance d for a given plate separation."""
        return self.geometry_ratio * separation


@dataclass(frozen=True)
class FeasibilityBand:
    """Open interval of l/s ratios supporting a path.

    The lower bound keeps the third reflection on the plate; the upper bound
    lets the exit beam clear the opposite plate.  The width is tan(theta_out)
    for every path.
    """

    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, ratio: float) -> bool:
        return self.lower < ratio < self.upper


def path_transmission(path: DiffractionPath, grating: Grating) -> float:
    """Product of the per-bounce diffraction populations along the path."""
    probs = grating.reflection_probabilities
    result = 1.0
    for n in path.orders:
        if abs(n) not in probs:
            raise ConfigurationError(
                f"no reflection probability for |order| = {abs(n)} "
                f"(grating defines orders up to {grating.max_order})"
            )
        result *= probs[abs(n)]
    return result


def _try_transmission(orders, grating: Grating) -> float | None:
    probs = grating.reflection_probabilities
    result = 1.0
    for n in orders:
        p = probs.get(abs(n))
        if p is None:
            return None
        result *= p
    return result


def enumerate_paths(
    setting: MonochromatorSetting,
    particle: Particle,
    grating: Grating,
    v: float,
    theta_inc: float | None = None,
    max_order: int = 2,
) -> list[DiffractionPath]:
    """All realizable bounce sequences at velocity v.

    (n1, n2) range over [-max_order, max_order]; n3 is fixed by order
    conservation.  A combination survives when both internal diffraction
    angles exist (no evanescent order).  An empty list is a valid result.
    """
    if theta_inc is None:
        theta_inc = incidence_for_output(setting, particle, grating, v)
    total = setting.order_magnitude
    step = wavelength_ratio(particle, grating, v)
    sin_inc = math.sin(theta_inc)

    paths = []
    for n1 in range(-max_order, max_order + 1):
        s1 = sin_inc + n1 * step
        if abs(s1) > 1.0:
            continue
        alpha1 = math.asin(s1)
        for n2 in range(-max_order, max_order + 1):
            s2 = s1 + n2 * step
            if abs(s2) > 1.0:
                continue
            n3 = total - n1 - n2
            s3 = s2 + n3 * step
            if abs(s3) > 1.0:
                continue
            alpha2 = math.asin(s2)
            orders = (n1, n2, n3)
            paths.append(
                DiffractionPath(
                    n1=n1,
                    n2=n2,
                    n3=n3,
                    alpha1=alpha1,
                    alpha2=alpha2,
                    total_order=total,
                    geometry_ratio=math.tan(alpha1) + math.tan(alpha2),
                    transmission=_try_transmission(orders, grating),
                )
            )
    return paths


def feasibility_band(path: DiffractionPath, setting: MonochromatorSetting) -> FeasibilityBand:
    """l/s interval in which the device realizes this path."""
    lower = path.geometry_ratio
    return FeasibilityBand(lower=lower, upper=lower + math.tan(setting.theta_out))


@dataclass(frozen=True)
class PathGroup:
    """Paths sharing a geometry ratio (indistinguishable in the device plane)."""

    geometry_ratio: float
    members: tuple[DiffractionPath, ...]


def group_paths_by_geometry(
    paths: list[DiffractionPath],
    rtol: float = GROUP_RTOL,
) -> list[PathGroup]:
    """Cluster paths whose geometry ratios agree within ``rtol`` (relative).

    Groups are returned ordered by increasing ratio; members keep their
    individual transmission rates.
    """
    groups: list[PathGroup] = []
    for path in sorted(paths, key=lambda p: (p.geometry_ratio, p.orders)):
        if groups:
            ref = groups[-1].geometry_ratio
            if abs(path.geometry_ratio - ref) <= rtol * max(1.0, abs(ref)):
                last = groups[-1]
                groups[-1] = PathGroup(ref, last.members + (path,))
                continue
        groups.append(PathGroup(path.geometry_ratio, (path,)))
    return groups


def path_census(
    setting: MonochromatorSetting,
    particle: Particle,
    grating: Grating,
    v: float,
    max_order: int = 2,
) -> tuple[int, int, int]:
    """(considered, surviving, groups) counts of the enumeration at velocity v."""
    considered = (2 * max_order + 1) ** 2
    paths = enumerate_paths(setting, particle, grating, v, max_order=max_order)
    return considered, len(paths), len(group_paths_by_geometry(paths))
