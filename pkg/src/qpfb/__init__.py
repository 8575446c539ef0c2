"""Symbolic engine for locally trivial quantum principal bundles.

Builds two-chart bundles over glued q-deformed base algebras from
transition-function data, equips them with covariant differential calculi,
constructs connections from local connection forms, and verifies curvature
and gluing identities with exact rational-function coefficients.
"""

__version__ = "0.1.0"
