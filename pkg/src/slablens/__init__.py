"""Plane-wave analysis of lossy and dispersive double-negative slab lenses."""

from ._accel import backend, get_backend, have_numba, set_backend
from .core import (C0, EPS0, MU0, Z0, ConstantLossyDNG, Custom, DispersiveDNG, MaterialModel,
                   MaterialResponse, SlabGeometry, Vacuum, evaluate_material, gamma0, gamma_slab,
                   wavelength, wavenumber)
from .errors import (CalibrationError, ConfigError, ConvergenceError, NonFiniteError,
                     PassivityError, RegionError, SlabLensError)
from .field import (FieldGrid, FieldRegion, QuadratureSpec, RegionTag, Strategy, evaluate_field,
                    field_grid, helmholtz_residual, hy_image, incident_field, incident_field_exact,
                    region_map, sinc_image, two_source_image)
from .resolution import (BESSEL_3DB_CONSTANT, SINC_3DB_CONSTANT, Mechanism, ResolutionReport,
                         enhancement_lossy, enhancement_time, required_loss, required_time,
                         resolution_lossy, three_db_resolution)
from .spectrum import (Region, SpectralCoefficients, TruncationWavenumber, h_delta,
                       interface_residuals, layer_spectra, line_source_spectrum, t_te)
from .timedomain import (AnalyticSignalSample, GridOptions, OmegaGrid, OuterSpec, SineWindow,
                         CosineWindow, analytic_spectrum_W, build_omega_grid, h_t,
                         time_domain_field)

__version__ = "0.1.0"
