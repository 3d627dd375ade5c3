"""Coupled spreading of two competing opinions and a disease on two-layer
multiplex networks: stochastic simulation, mean-field approximations,
correlated network generators, and derived outbreak statistics."""

__version__ = "0.1.0"

from . import analysis, contagion, ctmc, gillespie, meanfield, networks  # noqa: F401
from .contagion import Disease, InitialConditions, Opinion, Params  # noqa: F401
from .errors import ConfigurationError, IntegrationError  # noqa: F401
