"""Structured dispersion matrices for coherent space-time shift keying.

Field-extension and cyclic-division-algebra constructions, decomposition
checks, coding-gain and DCMC-capacity metrics, detectors and Monte-Carlo
SER campaigns.
"""

from .constellation import (
    Constellation,
    SymmetryDecomposition,
    make_psk,
    make_square_qam,
    make_star_qam,
    parse_constellation,
    symmetry_decompose,
)
from .dispersion import (
    CdaParams,
    DispersionMatrixSet,
    FecParams,
    PowerConstraintError,
    cda_codeword,
    cda_dm_set,
    co_dm_search,
    companion_matrix,
    fec_dm_set,
    co_fixture_bpsk8,
    load_dm_set,
    save_dm_set,
)
from .codebook import (
    DuplicateCodeword,
    StskCodebook,
    expand,
    k_vector,
    qam_decompose,
    verify_decomposition,
)
from .metrics import (
    coding_gain,
    dcmc_capacity,
    diversity_order,
    enumerate_configs,
    estimate_dcmc,
    rate_cda,
    rate_ldc,
    rate_stsk,
)
from .channel import ls_estimate, perturb_csir, sample_channel, transmit
from .detect import iterative_semiblind, mf_detect, ml_detect, single_stream_ml

__version__ = "0.1.0"
