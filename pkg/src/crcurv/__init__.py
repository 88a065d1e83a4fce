"""crcurv: curvature invariants of CR charts in model almost Hermitian
spaces, with pointwise certification of the associated inequalities."""

__version__ = "0.1.0"

from .ambient import (AmbientSpace, ambient_curvature,
                      make_const_holomorphic_ambient,
                      make_flat_complex_ambient)
from .catalog import (CatalogEntry, catalog, catalog_entry, flat_torus,
                      holomorphic_product, load_chart_file,
                      product_sphere_chart, sphere_in_Cq,
                      totally_geodesic_plane)
from .expressions import parse_expression, to_source
from .geometry import (Chart, CRSplit, PointGeom, ToleranceConfig, cr_split,
                       intrinsic_curvature_fd, mean_curvature_vector,
                       point_geometry)
from .inequalities import (DMinimalityReport, InequalityReport,
                           check_capped_mutual_bound, check_chen_type_bound,
                           check_flat_mean_bounds, check_holomorphic_bound,
                           check_min_mutual_bound, check_mixed_scalar_bound,
                           check_mutual_curvature_bound, d_minimality_scan)
from .invariants import (ChenDelta, InvariantValue, bisectional_curvature,
                         chen_delta, delta_h, delta_m, delta_m_aggregate,
                         mixed_scalar_curvature, mutual_curvature,
                         normalized_delta, normalized_delta_aggregate, s_h,
                         script_H, tau_subspace)
from .jets import Jet2, eval_jet2
from .optim import (OptimizerConfig, OptResult, PlaneTuple, SubspaceTuple,
                    brute_force_oracle, brute_force_plane_oracle,
                    maximize_over_flags, maximize_over_plane_tuples,
                    random_subspace_tuple)

__all__ = [name for name in dir() if not name.startswith("_")]
