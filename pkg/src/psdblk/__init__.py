"""Decompositions of PSD block matrices and checks of the norm inequalities they imply."""

__version__ = "0.1.0"

from .checks import (
    CheckReport,
    RangeMode,
    check_accretive,
    check_cor_p,
    check_direct_sum,
    check_elem1,
    check_lw,
    check_range_modes,
    check_schatten,
    check_subadditivity,
)
from .decomposition import Decomposition, congruence_decompose, lemma_decompose, lowner_envelope
from .generators import GeneratorMode, example_equality, random_block_psd
from .linalg import (
    BlockPsd,
    SpectralData,
    eig_hermitian_desc,
    matrix_power_psd,
    sqrt_psd,
    validate_block_psd,
)
from .norms import (
    NormKind,
    RangePosition,
    RangeVerdict,
    classify_zero_vs_range,
    numerical_radius,
    sym_norm,
    weak_majorizes,
)
from .search import HuntConfig, SearchRecord, hunt, probe_real_decomposition, violation_score
from .suite import SuiteConfig, run_suite
