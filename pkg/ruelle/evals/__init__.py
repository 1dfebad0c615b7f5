"""
Identity suites behind the verify command.
"""

from ruelle.evals.identity_cases import IdentityCase, IdentityName, generate_cases
from ruelle.evals.verification_runner import VerificationRunner

__all__ = ["IdentityCase", "IdentityName", "VerificationRunner", "generate_cases"]
