"""symconv: a desk-scale laboratory for symmetric-power coefficient sums.

Exact Hecke eigenvalue tables for the weight-12 discriminant form, Satake
angle and symmetric-power coefficient machinery, local Euler-factor
factorizations with their main-term constants, and direct plus
Moebius-decomposed evaluation of kernel-weighted shifted convolution sums.
"""

from .arith import (
    FactorSieve,
    Factorization,
    KFullSplit,
    KernelFunction,
    build_sieve,
    builtin_kernel,
    builtin_kernels,
    divisor_count,
    euler_phi,
    factorize,
    g_indicator,
    kfull_numbers,
    kfull_split,
    mobius,
    multiplicative_table,
)
from .eigenform import (
    DeligneViolationError,
    EigenformTable,
    IngestionError,
    IntegrityError,
    TauResidues,
    delta_table,
    generate_tau,
    hecke_extend,
    load_eigenvalues,
    reconstruct_lambda,
    reconstruct_tau,
    tau_eta_oracle,
    verify_deligne,
)
from .lfun import (
    ConstantCache,
    EulerProductValue,
    LocalFactor,
    constant_shifted,
    constant_shifted_cube,
    euler_product_C3,
    euler_product_c,
    kernel_density_sum,
    local_F,
    local_F3,
    local_G,
    local_G3,
    local_H,
    local_H3,
)
from .sums import (
    ExponentFit,
    SumReport,
    claimed_exponent,
    cube_progression_sum,
    cube_shifted_sum,
    fit_error_exponent,
    main_term,
    progression_sum,
    shifted_sum_direct,
    shifted_sum_mobius,
)
from .sympower import (
    SatakeAngle,
    SymPowerTable,
    b_coefficient,
    chebyshev_check,
    satake,
    sym_extend,
    sym_prime_power,
)

__version__ = "0.1.0"
