//! Heat kernels of the (fractional) Laplacian and the origin semigroup value.

mod heat;
mod semigroup;
mod subordinator;
mod table;

pub use heat::{gauss_kernel, kernel_at_origin, HeatKernel, KernelValue, FAR_FIELD};
pub use semigroup::semigroup_at_origin;
pub use subordinator::{subordinator_density, Method, SubordinatorDensity};
pub use table::{
    kernel_table, validate_kernel, Check, GridSpec, KernelTable, KernelValidation, TailFit, NORMALIZATION_TOL, TAIL_TOL,
};
