"""Higher-order Lagrangian calculus on velocity manifolds and Grassmann bundles."""
