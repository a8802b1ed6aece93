"""Dynamic Cosserat-rod simulation and tip control of a tendon-driven continuum robot."""
from .controllers import BacksteppingGains, SmcGains, backstepping_control, plant_terms, smc_control
from .dynamics import RodModel, bdf_coeffs, propagate
from .rod import RodParams, TendonLayout, default_paper_rod
from .scenarios import ReferenceTrajectory, Scenario, compute_metrics, reference, run_closed_loop
from .shooting import RodSimulator, ShootingConfig, solve

__all__ = [
    "BacksteppingGains", "SmcGains", "backstepping_control", "plant_terms", "smc_control",
    "RodModel", "bdf_coeffs", "propagate", "RodParams", "TendonLayout", "default_paper_rod",
    "ReferenceTrajectory", "Scenario", "compute_metrics", "reference", "run_closed_loop",
    "RodSimulator", "ShootingConfig", "solve",
]
