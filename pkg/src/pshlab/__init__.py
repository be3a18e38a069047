"""pshlab: Monge-Ampere mass, Lelong functionals and Sasakian frames on C^2."""
__version__ = "0.1.0"
