"""Free probability: moments, free cumulants and the free mixed-moment formula."""
from .freeness import BilinearMomentForm, free_otoc_prediction, two_chain_form  # noqa: F401
from .moments import (  # noqa: F401
    CumulantSequence,
    MomentSequence,
    class_moments,
    cumulants_from_moments,
    moments_from_cumulants,
    partitioned_moment,
)
