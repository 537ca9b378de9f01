"""Exact computer algebra for polynomial models of real hypersurfaces.

The package computes Catlin multitypes and boundary systems, certifies
pseudoconvexity of models, and runs the constructive normalization that
extracts balanced sums of squares from pseudoconvex polynomial models.
All arithmetic is exact (complex rationals); nothing here uses floats.
"""

from .exact import CRat
from .parser import ParseError, parse_poly
from .poly import (CoordChange, NonRealError, Poly, PolyError,
                   eliminate_harmonic, revlex_max_balanced, substitute,
                   weighted_order)
from .weights import (InverseWeight, Multitype, Weight, corroborate,
                      counting_bound, enumerate_multitypes, is_admissible,
                      is_distinguished, multitype_search)
from .levi import (CoeffBoundReport, PositivityVerdict, cauchy_schwarz_pairing,
                   complex_hessian, m_dominant_coefficients, model_truncate,
                   newton_split_check, one_var_coeff_check, psd_verdict,
                   verify_psd_certificate)
from .normal_form import (NormalForm, PseudoconvexityError, normalize,
                          step_first, step_inductive, verify_normal_form)
from .boundary import (BoundarySystem, TorsionReport, VField,
                       audit_boundary_system, build_boundary_system,
                       detect_torsion, list_derivative, normalize_first_block)

__version__ = "0.1.0"
