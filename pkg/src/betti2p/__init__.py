"""Bigraded Betti numbers of 2-parameter persistence modules over GF(p)."""

from .exact_linalg import DenseMatrix, PrimeField
from .grid_module import BettiTable, Grade, GradeMultiset, GridModule

__all__ = ["BettiTable", "DenseMatrix", "Grade", "GradeMultiset", "GridModule", "PrimeField"]
__version__ = "0.1.0"
