"""Real-frequency spectral analysis of the thermal Casimir pressure between metal plates."""

from .lifshitz import (
    CHANNELS,
    TE_EVANESCENT,
    Channel,
    Gap,
    PressureBreakdown,
    te_evanescent_dimensionless,
    thermal_pressure_channel,
    thermal_pressure_direct,
    thermal_pressure_total,
)
from .materials import CONSTANTS, VACUUM, Material, Model
from .matsubara import pressure_matsubara, pressure_zero_temperature, thermal_correction_oracle
from .quadrature import QuadratureError, QuadratureResult, QuadratureSpec
from .spectra import (
    applicability_report,
    contribution_range,
    fraction_below_frequency,
    frequency_spectrum,
    minimal_width_range,
    transverse_wavevector_spectrum,
    wavevector_spectrum,
)

__version__ = "0.1.0"
