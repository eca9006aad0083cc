"""Exact Jordan-cell construction for a non-Hermitian 2D anharmonic oscillator."""
from .algebra import ComplexRational, LaurentBiPoly, LogObstruction, parse_rational, format_rational
from .ansatz import AnsatzFn, ModelParams, ParamMismatch, RealityViolation, apply_A_minus, apply_A_plus, apply_H, apply_H_conjugated, conjugate
from .states import energy, spectrum, eigenstate, ground_state, ladder_tower, verify_no_extra_levels
from .moments import PiRational, gram, jordan_matrix, moment, pairing, pseudo_symmetry_check
from .jordan import JordanCell, NonlinearResidual, UnsolvableConstraints, build_cell, build_cells, verify_cell

__version__ = "0.1.0"
