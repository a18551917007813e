"""Exact separable-probability and expected separation-margin for stochastic
bichromatic geometric datasets, with convex-hull query applications."""

from .geometry import (Hyperplane, MarginResult, check_separable,
                       max_margin_separator, orient, project, side_of,
                       span_hyperplane)
from .model import (Scenario, StochasticDataset, dataset_from_points,
                    gen_cluster_stress, gen_multipoint, gen_random,
                    jitter_dataset, parse_dataset, scenario_probability,
                    serialize_dataset, sgpp_transform)
from .numeric import EXACT, FLOAT, NumericContext, Q, rat
from .objects import (BallSupportConfig, ball_expected_margin,
                      ball_separability_check, ball_separable_probability,
                      ball_support_configs, gen_balls, reduce_polytopes)
from .oracle import brute_esm, brute_sp, enumerate_margins
from .position import (GP, SGPP, sgpp_transform_points, validate_points)
from .esmengine import (enumerate_support_configs, expected_separation_margin,
                        margin_census_hint, xi)
from .sch import (SCHQuery, sch_epsilon_distant_probability,
                  sch_expected_distance, sch_intersection_probability,
                  sch_membership_probability)
from .spengine import (enumerate_candidates, extreme_separator,
                       separable_probability, sp_base_1d, tau, trivial_term)

__version__ = "0.1.0"
