"""Resolution limits for line spectral estimation: measurement model,
Vandermonde tools, bound oracles, Hankel-SVD number detection, worst-case
constructions and experiment harnesses."""
from .detection import (
    DetectionResult,
    build_hankel,
    detect_count_at_s,
    detect_count_sweep,
    min_singular_lower_bound,
    satisfies_guarantee,
    separation_threshold,
)
from .measure import (
    DiscreteMeasure,
    IntervalSpec,
    Measurement,
    SamplingGrid,
    fourier_samples,
    is_sigma_admissible,
    is_within_delta_neighborhood,
    srf_snr,
    synthesize_measurement,
)
from .svd import jacobi_svd
from .worst_case import AdversarialPair, construct_number_instance, construct_support_instance

__version__ = "0.1.0"
