# polyzeta/__init__.py
"""Polyzetas (valores zeta múltiples): aritmética exacta, relaciones de doble shuffle y base de Hoffman."""

__version__ = "0.1.0"
