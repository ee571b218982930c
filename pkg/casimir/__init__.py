"""Casimir free energy and entropy in the Lifshitz theory for metallic plates."""

__version__ = "0.1.0"
