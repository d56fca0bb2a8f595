"""Weingarten calculus on U(D): Gram/Weingarten tables, 1/D series, Haar twirl."""
from .cache import WeingartenCache  # noqa: F401
from .series import (  # noqa: F401
    genus_class_values,
    mobius_class_values,
    wg_asymptotic_coeff,
    wg_series_coefficients,
)
from .tables import (  # noqa: F401
    GramTable,
    WeingartenTable,
    clear_caches,
    gram,
    weingarten,
)
from .twirl import haar_twirl_exact, replica_operator, replica_trace  # noqa: F401
