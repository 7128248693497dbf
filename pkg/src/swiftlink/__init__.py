"""CFO-robust compressive beam alignment for planar mmWave arrays.

Circulantly shifted Zadoff-Chu training samples a "virtual channel" one
entry per slot. Trajectories that advance one anti-diagonal contour per slot
turn a carrier frequency offset into a plain beamspace shift, which a pair of
ascending/descending trajectories can measure and undo.
"""

from .baselines import BeamPair, exhaustive_scan, extract_beams, iid_cs_baseline
from .channel import (ChannelRealization, Ray, random_clustered_channel,
                      random_sparse_beamspace, synth_narrowband, synth_wideband)
from .estimator import (SwiftLinkResult, cfo_range, compensate_and_combine, estimate_cfo,
                        g_vector, run_type1, run_type2)
from .measurement import MeasurementSet, measure_trajectory, wideband_measure
from .metrics import achievable_rate, cfo_mse, nmse, papr
from .numerics import dft2, idft2
from .recovery import omp, recover_masked_beamspace
from .ripcheck import RipReport, d_min, lemma1_check, lemma2_check, t_xy, theorem2_check
from .sequences import spectral_mask, zc
from .trajectories import Trajectory, swiftlink_trajectory

__version__ = "0.1.0"
