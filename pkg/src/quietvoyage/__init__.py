"""quietvoyage: bi-objective ship speed scheduling against underwater noise and fuel."""

__version__ = "0.1.0"
