"""Fill-mask inference service speaking the prosepoet predictor protocol."""

__version__ = "0.1.0"
