"""resip: residual properties of mapping-torus groups.

Decides and certifies residually-p, residual nilpotence, and related
properties for groups of the form (fiber) x| Z where the fiber is Z^n
acted on by an integer matrix or a free group acted on by an automorphism
(braids included via the Artin action).  Positive answers come with
finite p-group certificates that re-verify from their own stored data.
"""

from .braid import (
    BraidWord,
    CoverGraph,
    artin_endo,
    beta_braid,
    braid_permutation,
    cover_from_finite_quotient,
    endo_preserves_cover,
    format_braid,
    induced_cover_homology,
    is_cyclotomic_product,
    parse_braid,
    permutation_order,
)
from .caps import Caps, DEFAULT_CAPS, caps_from_env
from .classify import (
    NOT_RESIDUALLY_P,
    RESIDUALLY_P,
    UNDECIDED,
    BSReport,
    BSSpec,
    ObstructionResult,
    PrimeSet,
    Verdict,
    bs_classify,
    endo_semidirect_omega_nilpotent,
    free_fiber_residually_p,
    p_power_order_quotient_exists,
    primes_up_to,
    residually_p_prime_set,
    rtfn_sufficient,
    sl2_power_divisibility,
    torus_residually_nilpotent,
    torus_residually_p,
)
from .errors import (
    CapExceeded,
    InvalidQ,
    InvalidSpec,
    LayerTooDeep,
    MixedPrimes,
    NonPPowerOrder,
    NotAPGroup,
    NotHomomorphism,
    NotInvariant,
    NotInvertible,
    NotInvertibleMod,
    NotNormal,
    NotTransitive,
    NotUnipotentModP,
    RankMismatch,
    RankTooSmall,
    ResipError,
    SchemaError,
    SearchSpaceTooLarge,
)
from .extension import (
    BilinearCocycle,
    CheckReport,
    CircleBundleSpec,
    CocycleCheck,
    ExtensionElement,
    TableCocycle,
    circle_bundle_central_witness,
    circle_bundle_cocycle,
    ext_commutator,
    ext_identity,
    ext_inverse,
    ext_multiply,
    ext_power,
    heisenberg_checks,
    heisenberg_cocycle,
    pullback_equality_check,
    verify_cocycle,
)
from .freegrp import (
    FreeEndo,
    FreeWord,
    MappingTorusElement,
    MappingTorusSpec,
    abelianization_matrix,
    apply_endo,
    commutator,
    compose_endos,
    conjugate,
    endo_power,
    format_word,
    inner_automorphism,
    is_mod_p_torelli,
    nielsen_transvection,
    parse_word,
    word_inverse,
    word_multiply,
)
from .intlin import (
    IntMatrix,
    LatticeChainInvariants,
    ModMatrix,
    UnipotenceResult,
    charpoly_exact,
    column_lattice_basis,
    det_exact,
    is_unipotent_mod,
    lattice_chain_invariants,
    matrix_order_mod,
    poly_divmod,
    poly_pow_x_minus_one,
    rank_exact,
    smith_diagonal,
)
from .magnus import (
    LieLayerMatrix,
    SeriesSubstitution,
    TruncatedSeries,
    lie_layer_basis,
    lie_layer_matrix,
    lyndon_words,
    magnus_depth,
    magnus_embed,
    standard_factorization,
    unipotent_on_layers,
    unipotent_over_Z,
    witt_dimension,
)
from .pgrouplab import (
    FinitePGroup,
    check_cyclic_abelianization,
    cyclic_group_p2,
    elementary_abelian_p2,
    frattini_data,
    generate_group,
    inner_automorphism_orders,
    minimal_generating_size,
    tower_lemma_check,
    ut3_group,
)
from .witness import (
    PGroupQuotient,
    VerificationReport,
    WitnessOutcome,
    combine_witnesses,
    find_p_quotient_witness,
    induced_automorphism_order,
    verify_witness,
)

__version__ = "0.1.0"

__all__ = [
    "BSReport",
    "BSSpec",
    "BilinearCocycle",
    "BraidWord",
    "CapExceeded",
    "Caps",
    "CheckReport",
    "CircleBundleSpec",
    "CocycleCheck",
    "CoverGraph",
    "DEFAULT_CAPS",
    "ExtensionElement",
    "FinitePGroup",
    "FreeEndo",
    "FreeWord",
    "IntMatrix",
    "InvalidQ",
    "InvalidSpec",
    "LatticeChainInvariants",
    "LayerTooDeep",
    "LieLayerMatrix",
    "MappingTorusElement",
    "MappingTorusSpec",
    "MixedPrimes",
    "ModMatrix",
    "NOT_RESIDUALLY_P",
    "NonPPowerOrder",
    "NotAPGroup",
    "NotHomomorphism",
    "NotInvariant",
    "NotInvertible",
    "NotInvertibleMod",
    "NotNormal",
    "NotTransitive",
    "NotUnipotentModP",
    "ObstructionResult",
    "PGroupQuotient",
    "PrimeSet",
    "RESIDUALLY_P",
    "RankMismatch",
    "RankTooSmall",
    "ResipError",
    "SchemaError",
    "SearchSpaceTooLarge",
    "SeriesSubstitution",
    "TableCocycle",
    "TruncatedSeries",
    "UNDECIDED",
    "UnipotenceResult",
    "VerificationReport",
    "Verdict",
    "WitnessOutcome",
    "abelianization_matrix",
    "apply_endo",
    "artin_endo",
    "beta_braid",
    "braid_permutation",
    "bs_classify",
    "caps_from_env",
    "charpoly_exact",
    "check_cyclic_abelianization",
    "circle_bundle_central_witness",
    "circle_bundle_cocycle",
    "column_lattice_basis",
    "combine_witnesses",
    "commutator",
    "compose_endos",
    "conjugate",
    "cover_from_finite_quotient",
    "cyclic_group_p2",
    "det_exact",
    "elementary_abelian_p2",
    "endo_power",
    "endo_preserves_cover",
    "endo_semidirect_omega_nilpotent",
    "ext_commutator",
    "ext_identity",
    "ext_inverse",
    "ext_multiply",
    "ext_power",
    "find_p_quotient_witness",
    "format_braid",
    "format_word",
    "frattini_data",
    "free_fiber_residually_p",
    "generate_group",
    "heisenberg_checks",
    "heisenberg_cocycle",
    "induced_automorphism_order",
    "induced_cover_homology",
    "inner_automorphism",
    "inner_automorphism_orders",
    "is_cyclotomic_product",
    "is_mod_p_torelli",
    "is_unipotent_mod",
    "lattice_chain_invariants",
    "lie_layer_basis",
    "lie_layer_matrix",
    "lyndon_words",
    "magnus_depth",
    "magnus_embed",
    "matrix_order_mod",
    "minimal_generating_size",
    "nielsen_transvection",
    "p_power_order_quotient_exists",
    "parse_braid",
    "parse_word",
    "permutation_order",
    "poly_divmod",
    "poly_pow_x_minus_one",
    "primes_up_to",
    "pullback_equality_check",
    "rank_exact",
    "residually_p_prime_set",
    "rtfn_sufficient",
    "sl2_power_divisibility",
    "smith_diagonal",
    "standard_factorization",
    "torus_residually_nilpotent",
    "torus_residually_p",
    "tower_lemma_check",
    "ut3_group",
    "unipotent_on_layers",
    "unipotent_over_Z",
    "verify_cocycle",
    "verify_witness",
    "witt_dimension",
    "word_inverse",
    "word_multiply",
]
