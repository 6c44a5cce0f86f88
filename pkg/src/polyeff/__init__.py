"""A two-sorted polymorphic calculus for computational effects.

Subpackages: ``kernel`` (syntax), ``surface`` (concrete syntax),
``typecheck`` (the stoup type system), ``encodings`` (definable types
and terms), ``finmodel`` (finite sets, monads, algebras, relations),
``interp`` (denotational and relational semantics), ``paramlab``
(exhaustive theorem verification), ``cli`` (driver).
"""

__version__ = "0.1.0"
