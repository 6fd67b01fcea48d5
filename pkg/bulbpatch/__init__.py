"""bulbpatch: adversarial thermal-infrared patches made of Gaussian bulb spots."""

__version__ = "0.1.0"
