"""Executable proof systems and TFNP formulations: checkers, translators, problem zoo."""

__version__ = "0.1.0"
