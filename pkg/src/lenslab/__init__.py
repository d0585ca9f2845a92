"""Lens-law laboratory: decide lens laws on finite lenses, chain the implication
rules between them, and search small lens spaces for counterexamples."""

from .errors import (
    BudgetExceeded,
    CarrierMismatch,
    InvalidLens,
    LensLabError,
    UnknownEntry,
    WindowTooSmall,
)
from .gallery import GalleryEntry, WindowReport, gallery_check, list_gallery
from .implication import (
    ImplicationRule,
    ProofChain,
    closure,
    derivable,
    equivalent_under,
    export_graph,
    rule_database,
)
from .laws import (
    ALL_LAWS,
    Family,
    FiniteLens,
    Law,
    ViolationWitness,
    check_law,
    law_profile,
    verify_witness,
)
from .search import (
    CandidateReport,
    Counterexample,
    LensIndex,
    NoneFound,
    SweepReport,
    candidate_survey,
    enumerate_lenses,
    find_counterexample,
    profile_census,
    random_search,
    soundness_sweep,
)

__version__ = "0.1.0"
