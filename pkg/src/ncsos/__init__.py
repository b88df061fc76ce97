"""Sum-of-squares analysis for polynomials in the real free *-algebra.

Exact polynomial arithmetic, Gram-matrix spaces with certified rank lower
bounds, a small dense semidefinite solver for the trace heuristic, and
sum-of-squares decompositions with boundary rank reduction.
"""

from .bounds import (
    BoundReport,
    NotApplicable,
    SizeCapError,
    SPolynomial,
    make_s,
    random_ncpoly,
    verify_power_bound,
    verify_qqs_bound,
    verify_qsq_bound,
)
from .gram import (
    GramConstraint,
    GramSpace,
    InfeasibleSystemError,
    MonomialBasis,
    NotSymmetricError,
    build_gram_space,
    gram_polynomial,
    gram_space_to_json,
    rank_lower_bound,
    top_block,
    top_block_rank,
    top_degree_block,
)
from .ncpoly import (
    MatrixTuple,
    NcPoly,
    Word,
    commutes,
    evaluate,
    graded_lex_compare,
    graded_lex_key,
    word_adjoint,
    words_of_degree,
)
from .parsing import PolyParseError, format_poly, parse
from .sdp import SdpProblem, SdpSolution, SdpStatus, max_step_to_boundary
from .sdp import solve as solve_sdp
from .sosdec import (
    RankCertificate,
    SosDecomposition,
    SosInfeasibleError,
    SosSolverError,
    numerical_rank,
    reduce_rank_on_boundary,
    reconstruction_error,
    sos_decompose,
    verify_decomposition,
)

__version__ = "0.1.0"
