"""
Command-line runner, file formats and run logging for SparseReg.
"""
