//! Heat kernels of scalable Levy generators and the L_1 / embedding
//! audits built on them.
//!
//! The crate turns a Levy measure pi and its scaling triple (kappa, l,
//! a) into lattice fields: transition densities p(t, .) via the
//! exponential of the symbol, singular kernels L^pi D^k p(t, .), the
//! space-time difference integrals behind the Calderon-Zygmund
//! machinery, and the increment kernels k-bar(., z) that represent
//! f(. + z) - f(.) through one convolution with L^{pi;delta} f.
//!
//! Numerical stance: every field lives on a centered torus lattice and
//! is produced by one inverse FFT of an explicitly assembled multiplier.
//! Calls that would alias (Nyquist decay above a fixed guard) are
//! refused with the offending numbers rather than silently smoothed,
//! and time integrals either carry analytic head/tail closures or
//! report how much mass the truncation dropped.

pub mod density;
pub mod embedding;
pub mod error;
pub mod kernel_audits;
mod ops;

pub use density::{density, density_scaling_check, domain_size, ALIAS_GUARD};
pub use embedding::{
    embedding_kernel, holder_modulus_audit, holder_modulus_lp_audit, holder_modulus_precheck,
    increment_representation, kernel_lq_precheck, sup_embedding_precheck, EmbeddingKernel,
    HolderLpAudit, HolderModulusAudit,
};
pub use error::DensityError;
pub use kernel_audits::{
    hormander_audit, hormander_c0, kernel_bound_audit, shift_continuity_audit, HormanderAudit,
    HormanderConfig, HormanderSample, KernelBoundAudit, KernelSample, ShiftContinuityAudit,
};
