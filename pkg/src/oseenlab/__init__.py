"""Semi-spectral solver and estimate lab for the stationary 2D Navier-Stokes
perturbation problem around a uniform flow ``alpha e_1``."""

__version__ = "0.1.0"
