"""Linear-region counting and bounds for piecewise-linear layers via
max-plus polynomials and their Newton polytopes."""

from .bounds import (
    BoundReport,
    conv_layer_bound,
    maxout_layer_bound,
    relu_layer_bound,
    zonotope_face_bound,
)
from .errors import (
    EnumerationCapExceeded,
    SolverError,
    UnboundedSampleSizeError,
    ValidationError,
)
from .geometry import (
    DEFAULT_CAP,
    FeasibilityResult,
    Polytope,
    eliminate_redundant,
    layer_polytopes,
    minkowski_candidates,
    newton_polytope,
    nonparallel_generator_count,
    normal_cone_contains,
    strict_feasibility,
    upper_hull_vertices,
)
from .oracle import (
    ExactCount,
    count_arrangement_regions,
    count_by_input_sampling,
    count_regions_exact,
)
from .sampler import (
    AngleSpectrum,
    CountResult,
    SamplePlan,
    estimate_solid_angles,
    required_samples_eta,
    required_samples_full,
    required_samples_upper,
    sample_configurations,
)
from .tropical import (
    DEFAULT_TOL,
    Configuration,
    LayerSpec,
    TropicalPolynomial,
    TropicalTerm,
    UnitInfo,
    active_terms,
    evaluate,
    evaluate_batch,
    layer_from_units,
    layer_pattern,
    make_leaky_relu,
    make_maxout,
    make_relu,
    trop_add,
    trop_mul,
)

__version__ = "0.1.0"
