"""Monte Carlo ground truth: Haar sampling, dense RMPUs, OTOC and frame-potential estimators."""
from ..core.models import EnsembleConfig, EstimateRecord  # noqa: F401
from .estimators import mc_frame_potential, mc_otoc  # noqa: F401
from .observables import ObservableSpec, make_observable, observable_from_dict  # noqa: F401
from .rmpu import (  # noqa: F401
    HaarEnsemble,
    RmpuEnsemble,
    build_rmpu,
    embed_gate,
    make_ensemble,
    operator_entanglement_rank,
)
from .sampling import sample_haar_unitary, sample_stream, unitarity_residual  # noqa: F401
