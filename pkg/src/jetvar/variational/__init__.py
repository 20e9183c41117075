"""Lagrangian formalism on velocity and Grassmann charts."""

from .operators import (
    HelmholtzTensor,
    Side,
    adapted,
    apply_operator,
    divergence_form,
    euler_lagrange,
    helmholtz,
    homogeneous,
    integrate_by_parts,
    is_locally_variational,
    lagrangian_operator,
    lie_euler,
    product_rule_residual,
)

__all__ = [
    "HelmholtzTensor",
    "Side",
    "adapted",
    "apply_operator",
    "divergence_form",
    "euler_lagrange",
    "helmholtz",
    "homogeneous",
    "integrate_by_parts",
    "is_locally_variational",
    "lagrangian_operator",
    "lie_euler",
    "product_rule_residual",
]
