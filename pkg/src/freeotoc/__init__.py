"""freeotoc - Weingarten calculus and free-probability predictions for OTOCs.

Public API::

    from freeotoc import __version__
    from freeotoc.combinatorics import Permutation, SymmetricGroup, enumerate_nc, mobius
    from freeotoc.weingarten import gram, weingarten, wg_asymptotic_coeff, haar_twirl_exact
    from freeotoc.freeprob import MomentSequence, cumulants_from_moments, free_otoc_prediction
    from freeotoc.predict import haar_otoc_exact, rmpu_otoc_exact, frame_potential_rmpu_exact
    from freeotoc.mcsim import EnsembleConfig, mc_otoc, mc_frame_potential, make_observable
    from freeotoc.config.settings import get_settings
"""

__version__ = "0.3.0"
__all__ = ["__version__"]
