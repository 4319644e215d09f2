"""Circle packings of planar maps, electric networks, and spanning trees."""

from .planar import (PlanarMap, Face, Triangulation, build_map, trace_faces,
                     triangulate_star, triangulate_zigzag, dual_map,
                     generate_ball, canonical_form, maps_isomorphic)
from .network import (Network, Voltage, Flow, ResistanceValue, solve_voltage,
                      current_flow, effective_resistance, reduce_parallel,
                      reduce_series, glue, hitting_times, flow_energy,
                      function_energy, nash_williams_bound, random_path_flow,
                      boundary_resistance)
from .packing import (RadiusVector, Packing, SolverReport, face_angle,
                      boundary_angles, angle_deficits, solve_radii, layout,
                      verify_packing, pack_in_disc, ring_ratio_stats,
                      annulus_test_function, cp_type_probe, conformal_demo)
from .ust import (TreeDistribution, enumerate_spanning_trees, edge_probability,
                  spatial_markov_check, dual_tree, usf_edge_marginals,
                  wired_triangle_bound_check)
from .magic import (isolation_radius, is_supported, count_supported,
                    max_disc_cover, resistance_growth_probe)
from .startree import (MarkedMap, RootedDistribution, star_tree_transform,
                       transfer_flow, degree_bias, degree_unbias,
                       stationarity_check, truncate_degrees)

__version__ = "0.1.0"
