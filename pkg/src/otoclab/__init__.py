"""Dense-matrix laboratory for out-of-time-order correlators and operator
scrambling in small closed systems, with classical torus-map references."""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (ConfigError, NumericalValidationError, PsdClampWarning,
                     ResourceError, SpaceMismatchError)
from .hilbert import (CompositeSpace, DensityMatrix, Operator, PureState,
                      commutator, embed_local, expectation, expm_hermitian,
                      gibbs_state, identity, maximally_mixed, partial_trace,
                      tensor_product)
from .models import (InvertedOscillatorSpec, KickedRotorSpec, ModelInstance,
                     SpinChainSpec, build_inverted_oscillator,
                     build_kicked_rotor, build_spin_chain,
                     coherent_wavepacket, global_parity)
from .scrambling import (SpreadingProfile, TimeGrid, TimeSeries, bch_series,
                         entanglement_entropy, heisenberg_evolve, otoc_f,
                         pauli_coefficients, recurrence_fidelity,
                         squared_commutator, squared_commutator_terms,
                         support_profile, two_point)
from .analysis import (EhrenfestScaling, GrowthFit, MSSVerdict,
                       SaturationEstimate, Window, convergence_window,
                       detect_growth_window, ehrenfest_scaling,
                       estimate_saturation, fit_lyapunov, mss_check)
from .classical import (KoopmanGrid, MapState, TangentState, TorusMap,
                        cell_points, iterate_map, koopman_correlation,
                        koopman_matrix, orbit, sensitivity_fd,
                        tangent_accumulate, tangent_lyapunov)

__all__ = [name for name in dir() if not name.startswith("_")]
