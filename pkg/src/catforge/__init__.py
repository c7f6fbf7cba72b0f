"""catforge: numerical laboratory for conditional optical states from
strong free-electron--photon scattering."""

__version__ = "0.1.0"
