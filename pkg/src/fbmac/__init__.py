"""Finite-blocklength converse regions for two-user discrete memoryless MACs."""
from .bounds import (
    BetaSchedule,
    BoundTriple,
    Pentagon,
    beta_schedule,
    bound_triple,
    delta_normal,
    explicit_bound_triple,
    normal_approx_triple,
    pentagon_support,
)
from .channel import (
    ChannelError,
    DmMac,
    InducedLaws,
    InputPair,
    TimeSharedInput,
    adder_mac,
    induced_laws,
    load_channel,
    parallel_mac,
    parse_channel,
)
from .gaussian import berry_esseen_gamma, q_function, q_inverse
from .kernels import BACKEND
from .measures import DensityTable, Moments, density_table, moments, time_shared_density_table
from .region import RegionBoundary, capacity_region, outer_region
from .simulate import Codebook, ErrorReport, converse_check, exact_error, random_codebook
from .tails import (
    UNBOUNDED,
    AtomicDistribution,
    GuardExceeded,
    InfeasibleTarget,
    LatticeDistribution,
    TailTarget,
    cdf,
    exact_sum_distribution,
    joint_tail,
    lattice_sum_distribution,
    monte_carlo_tail,
    solve_delta,
)

__version__ = "0.1.0"
