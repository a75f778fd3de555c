"""Channel impulse response of a spherical receiver covered by absorbing patches."""

from .analytic import (DerivedCoefficients, MultiPatchResponse, asymptotic_fraction_uniform,
                       cumulative_fraction_uniform, hitting_rate_uniform, multi_patch_cir)
from .capacitance import (EffectiveChannel, ExpansionAccuracyWarning, ExpansionOutOfRangeError,
                          SingularGeometryError, capacitance, capacitance_full_sphere,
                          capacitance_general, capacitance_identical, capacitance_single,
                          diffusion_current, effective_channel, effective_rate, pair_interaction)
from .geometry import (ChannelParams, InfeasibleLayoutError, Patch, PatchLayout, explicit_layout,
                       fibonacci_layout, point_in_patch, random_layout, region_layout,
                       uniform_tx_location)
from .pbs import (HittingStats, SimConfig, absorbed_location_check, empirical_hitting_rate,
                  simulate)

__version__ = "0.1.0"
