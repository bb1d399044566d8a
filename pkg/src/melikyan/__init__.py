"""Exact-arithmetic workbench for the Melikyan algebras M(2; n) in characteristic 5.

Submodules:

* ``finite_field``  -- GF(5^k), embeddings, roots of unity, Lucas binomials
* ``divided_power`` -- the divided power algebra O(m; n)
* ``witt``          -- special derivations W(m; n) and the tilde copy
* ``melikyan``      -- the bracket, the basis, degree maps, structure constants
* ``abelian``       -- finitely generated abelian groups, subgroups, characters
* ``grading``       -- gradings, verification, coarsening, refinement maps
* ``automorphism``  -- torus, swap maps, duality, exponential twists
* ``suites``        -- verification batteries used by the CLI and tests
"""

__version__ = "0.1.0"

from .finite_field import FieldDescriptor, FieldElement, make_field  # noqa: E402
from .melikyan import MelikyanElement, canonical_basis, m_bracket, melikyan_shape, structure_table  # noqa: E402

__all__ = [
    "__version__",
    "FieldDescriptor",
    "FieldElement",
    "make_field",
    "MelikyanElement",
    "canonical_basis",
    "m_bracket",
    "melikyan_shape",
    "structure_table",
]
