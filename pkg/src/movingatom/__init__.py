"""Dissipative effective-action kernels for a moving harmonic-oscillator atom.

Free space (first-order threshold emission and the renormalized second-order
kernel), quantum friction near a lossy plate, and small-oscillation emission
kernels near the plate.  Natural units, c = hbar = 1.
"""

from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    ExpansionError,
    NonFiniteError,
    QuadratureError,
    RangeError,
    RegularizationError,
    SingularityError,
    SpectrumVariantError,
)
from .free_space import (
    SigmaBreakdown,
    freq_shift,
    im_gamma1_general,
    im_gamma2_smallosc,
    m_p_first_order,
    sigma_ren,
)
from .friction import FrictionQuery, friction_large_a_log_slope, friction_rate
from .params import AtomParams, DimensionlessSet, MirrorParams, from_dimensionless, rescale, to_dimensionless
from .plate import (
    PlateKernelPoint,
    alpha_beta,
    coeff_A_parallel,
    coeff_A_perp,
    coeff_A_zero_loss,
    coeff_B_parallel,
    coeff_B_perp,
    im_gamma_mp_smallosc,
    m_parallel,
    m_parallel_far_limit,
    m_perp,
    plate_kernel_point,
)
from .quad import QuadResult, delta_xi, integrate, integrate_semi_infinite, p_xi, principal_value
from .special import sine_integral
from .trajectory import (
    HarmonicLine,
    LineSeries,
    LineSpectrum,
    MomentumLine,
    Sampled,
    UniformVelocity,
    f_sq_angular_integrated,
    load_sampled,
    second_order_lines,
    smallosc_lines,
    spectrum_f,
)

__version__ = "0.1.0"
