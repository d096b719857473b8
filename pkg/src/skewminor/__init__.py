"""Principal minors of skew-symmetric matrices over exact fields."""

from .clans import (
    ClanReport,
    clan_closure,
    find_nontrivial_clan,
    hl_indecomposable,
    is_clan,
    is_hl_clan,
    is_separable,
    peel_inseparable,
)
from .exactfield import GF, QQ, FieldElement, FieldSpec, fe_arith, fe_sqrt
from .minors import (
    EquivalenceVerdict,
    MinorTable,
    hl_equivalent,
    is_principally_unimodular,
    principal_minors,
    wesp_check,
)
from .skewmat import (
    LabeledMatrix,
    SkewMatrix,
    apply_witness,
    determinant,
    extend_infinity,
    flip_on_set,
    gen_random_dense,
    gen_skew_cycle,
    gen_sym_cycle,
    pfaffian,
    rank,
    submatrix,
)
from .witness import (
    SignPartition,
    Witness,
    check_lopez,
    diag_similar_up_to_transposition,
    equivalence_classes,
    reconstruct_from_minors,
    recover_witness,
)

__version__ = "0.1.0"

__all__ = [
    "ClanReport",
    "clan_closure",
    "find_nontrivial_clan",
    "hl_indecomposable",
    "is_clan",
    "is_hl_clan",
    "is_separable",
    "peel_inseparable",
    "GF",
    "QQ",
    "FieldElement",
    "FieldSpec",
    "fe_arith",
    "fe_sqrt",
    "EquivalenceVerdict",
    "MinorTable",
    "hl_equivalent",
    "is_principally_unimodular",
    "principal_minors",
    "wesp_check",
    "LabeledMatrix",
    "SkewMatrix",
    "apply_witness",
    "determinant",
    "extend_infinity",
    "flip_on_set",
    "gen_random_dense",
    "gen_skew_cycle",
    "gen_sym_cycle",
    "pfaffian",
    "rank",
    "submatrix",
    "SignPartition",
    "Witness",
    "check_lopez",
    "diag_similar_up_to_transposition",
    "equivalence_classes",
    "reconstruct_from_minors",
    "recover_witness",
    "__version__",
]
