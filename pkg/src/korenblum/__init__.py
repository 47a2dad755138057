"""Uniqueness sets for Korenblum-type spaces: minorants, entropy, Cantor constructions."""
from .errors import (
    CertificationFailed,
    DomainError,
    InfeasibleError,
    InvariantViolation,
    KorenblumError,
    PrecisionError,
)
from .minorant import Minorant, Verdict, classify_minorant, control_sequences
from .entropy import h_E, phi_E, s_entropy, sigma_t, sigma_tilde
from .construction import build_bundle, build_measure, verify_statements
from .harmonic import HarmonicField, certify_minorant_bound

__version__ = "0.1.0"
