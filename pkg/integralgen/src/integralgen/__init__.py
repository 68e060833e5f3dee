"""Self-contained molecular integral and FCIDUMP fixture generator.

Computes STO-3G integrals with McMurchie-Davidson recursions, solves
RHF/ROHF, optionally folds an active space, and writes FCIDUMP files
plus JSON reference energies for downstream consumers.
"""

__version__ = "0.1.0"
