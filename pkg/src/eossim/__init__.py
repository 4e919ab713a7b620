"""Two-beam electro-optic sampling simulator.

Computes the correlation signal of two probe pulses in a nonlinear
crystal and separates it into vacuum-field-fluctuation and
source-radiation contributions as functions of the pulses' space-time
separation, with light-cone region classification and time-domain
fluctuation-dissipation verification.
"""

__version__ = "0.1.0"

from .config import (  # noqa: F401
    ConfigError, ExperimentConfig, load_config, serialize_config,
    validate_config,
)
from .integrator import (  # noqa: F401
    SignalRecord, assemble_signal, integrate_source, integrate_vacuum,
    scan_delta_t,
)
from .kernels import KernelSet  # noqa: F401
from .medium import (  # noqa: F401
    Dispersionless, Lorentz, PermittivityTable, kramers_kronig_residual,
    load_permittivity_table, permittivity, refractive_index,
)
from .pulses import (  # noqa: F401
    OverlapKernel, PulseEnvelope, envelope_value, overlap_kernel,
    overlap_kernel_derivatives,
)
from .regions import (  # noqa: F401
    RegionLabel, boundary_I_II, boundary_II_III, classify_numeric, region_map,
)
from .fdt import FdtReport, hilbert_transform, verify_fdt_signal  # noqa: F401
from .waveplate import WavePlateCoeffs, coefficients, waveplate_factor  # noqa: F401
