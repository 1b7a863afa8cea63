"""Decentralized computation offloading game: model, equilibria, mechanism, benchmarks."""
from .model import (NEVER_OFFLOAD, Scenario, UserProfile, cloud_overhead, local_overhead,
                    system_cost, threshold, uplink_rate, user_overhead)
from .game import (best_response, better_response_path, enumerate_equilibria,
                   improvement_set, is_nash, potential)
from .homogeneous import beneficial_group, homogeneous_equilibrium, homogeneous_view
from .mechanism import MechanismConfig, message_ledger, run_mechanism
from .benchmark import centralized_optimum, equilibrium_report, poa, poa_bound
from .experiments import GeneratorSpec, generate_scenario

__version__ = "0.1.0"
