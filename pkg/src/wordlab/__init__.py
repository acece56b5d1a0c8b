"""Desk-scale laboratory for word maps, walks, and generation on finite groups.

The package is organized around a small set of building blocks:

- `groups`: index-based finite groups (cyclic, dihedral, permutation,
  2x2 matrix groups over small prime fields, explicit Cayley tables,
  direct powers) plus structural helpers (center, commutator subgroup,
  quotients, abelian invariants).
- `words`: reduced words in d generators, sampling models, exponent-sum
  vectors, gcd certificates, proper-power detection, evaluation.
- `measure`: exact and sampled pushforward distributions of word maps,
  L1 distance to uniform, image versus m-th powers.
- `lattice_walks`: simple random walks on Z^d, exact mod-q endpoint laws,
  return probabilities, and a sampling-free prediction of the endpoint
  gcd law.
- `group_walks`: exact laws and mixing profiles of walks on finite
  groups, the cyclic obstruction to mixing, and the shared-letters
  versus independent-walks comparison on direct powers.
- `generation`: counting generating tuples, largest d-generated direct
  power, generation checks on G^N, and lifting generators through
  central quotients.
- `harness` / `cli`: deterministic, auditable experiment runs.
"""

__version__ = "0.1.0"

from .errors import (
    BadLetterError,
    BudgetExceededError,
    ConfigError,
    DimensionMismatchError,
    EmptyWordError,
    GroupMismatchError,
    LiftVerificationError,
    MalformedCayleyTableError,
    NotGeneratingError,
    NotInCatalogError,
    NotPerfectError,
    RankMismatchError,
    TooLargeError,
    UnsupportedParameterError,
    WordlabError,
)
from .groups import (
    CATALOG_SPECS,
    CayleyGroup,
    CyclicGroup,
    DihedralGroup,
    DirectPowerGroup,
    Element,
    Group,
    GroupSpec,
    PSL2Group,
    PermutationGroup,
    SL2Group,
    abelianization_invariants,
    center,
    closure,
    commutator_subgroup,
    construct_group,
    is_perfect,
    load_cayley_table,
    quotient_by_center,
    quotient_group,
)
from .words import (
    Word,
    abelianize,
    bezout_certificate,
    evaluate,
    evaluate_indices,
    gcd_of_vector,
    is_power_word,
    make_word,
    parse_word,
    reduce_letters,
    sample_word,
)
from .measure import (
    Distribution,
    ImageReport,
    TrendRow,
    exact_distribution,
    family_trend,
    image_and_power_coverage,
    l1_distance,
    l1_uniform_distance,
    monte_carlo_distribution,
    write_distribution_csv,
)
from .lattice_walks import (
    ModLaw,
    TailEstimate,
    TailPrediction,
    exact_mod_law,
    gcd_of_endpoint,
    gcd_tail_estimate,
    predicted_tail_probability,
    return_probability,
    sample_endpoints,
    simulate_walk,
)
from .group_walks import (
    ObstructionWitness,
    PowerWalkReport,
    StepSet,
    cyclic_obstruction,
    exact_walk_law,
    mixing_profile,
    power_walk_equivalence,
)
from .generation import (
    AUT_ORDERS,
    HallReport,
    count_generating_tuples,
    hall_max_power,
    is_generating,
    lift_generators,
    power_tuple_generates,
)
from .harness import (
    ExperimentConfig,
    audit_report,
    build_config,
    canonical_report_bytes,
    ingest_cayley_table,
    parse_config_file,
    run_density,
    run_generation,
    run_mixing,
    run_trend,
    run_walk_gcd,
    write_report,
)
