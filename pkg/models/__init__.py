"""
SparseReg Models Package

This package contains the regression, sampling, selection and evaluation
models used to infer down-regulatory miRNA–mRNA interactions.
"""

__version__ = "1.0.0"
