"""Construction and numerical verification of gradient rho-Einstein soliton warped products."""

__version__ = "0.1.0"
