"""Exact and asymptotic analytic predictions for OTOCs and frame potentials."""
from .closed_forms import subleading_coeff_haar_closed_form, subleading_coeff_rmpu_closed_form  # noqa: F401
from .fits import InversePowerFit, PowerLawFit, fit_inverse_powers, fit_power_law  # noqa: F401
from .frame import (  # noqa: F401
    frame_potential_deviation,
    frame_potential_haar,
    frame_potential_rmpu_asymptotic,
    frame_potential_rmpu_exact,
)
from .haar import haar_multi_otoc_exact, haar_otoc_exact  # noqa: F401
from .identity import IdentityReport, verify_frame_otoc_identity  # noqa: F401
from .rmpu import (  # noqa: F401
    nonlocal_discrepancy,
    nonlocal_otoc_leading,
    rmpu_otoc_exact,
    rmpu_otoc_leading,
)
from .subleading import (  # noqa: F401
    SplitCoefficients,
    haar_subleading_form,
    rmpu_split_coefficients,
    subleading_coeff_haar,
    subleading_coeff_rmpu,
)
