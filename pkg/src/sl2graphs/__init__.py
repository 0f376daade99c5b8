"""Schreier and Cayley graphs of SL2(Z/pZ): construction, sector spectra,
spectral statistics and exact distance metrics."""

__version__ = "0.1.0"

from . import errors  # noqa: E402
from ._kernels import BACKEND  # noqa: E402
from .desymmetrize import (  # noqa: E402
    SpectrumSample,
    kramers_reduce,
    monochromatic_spectrum,
    steinberg_spectrum,
    torus_sector_blocks,
)
from .graph import SchreierGraph, build_schreier, connected_components, is_bipartite  # noqa: E402
from .groups import (  # noqa: E402
    GeneratorSet,
    SpaceKind,
    VertexSpace,
    fixed_generators_S,
    lps_generators,
    make_generators,
    random_symmetric_generators,
)
from .metrics import (  # noqa: E402
    bfs,
    diameter,
    eccentricity,
    essential_diameter,
    girth_at_identity,
    radius_at,
)
from .spectra import EigenRequest, dense_eigenvalues, extreme_nontrivial  # noqa: E402
from .stats import (  # noqa: E402
    count_exceptional,
    discrepancy,
    km_cdf,
    km_density,
    km_moment,
    spacing_ks,
    trivial_word_count,
    unfold_spacings,
)
