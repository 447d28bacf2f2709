"""Built-in particle and material presets."""

from __future__ import annotations

from dataclasses import dataclass

from .diffraction import HELIUM_4, Grating, Particle
from .errors import ConfigurationError


@dataclass(frozen=True)
class MaterialPreset:
    name: str
    grating: Grating
    notes: str = ""


PARTICLES: dict[str, Particle] = {
    "helium-4": HELIUM_4,
    "helium-3": Particle(mass=5.0082343e-27, name="helium-3"),
}

MATERIALS: dict[str, MaterialPreset] = {
    "si111-h1x1": MaterialPreset(
        name="si111-h1x1",
        grating=Grating(
            period=3.383e-10,
            reflection_probabilities={0: 0.06, 1: 0.03, 2: 0.015},
        ),
        notes="Hydrogen-passivated Si(111), helium reflectivity to second order",
    ),
}


def get_particle(name: str) -> Particle:
    try:
        return PARTICLES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown particle preset {name!r}; known: {sorted(PARTICLES)}"
        ) from None


def get_material(name: str) -> MaterialPreset:
    try:
        return MATERIALS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown material preset {name!r}; known: {sorted(MATERIALS)}"
        ) from None
