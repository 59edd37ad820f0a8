//! Jump operators, their adjoint action on spin operators, and closure conditions.

mod adjoint;
mod builtin;
mod closure;
mod coefficients;
mod spin;

pub use adjoint::{
    bilocal_adjoint_action, dissipator_bracket, local_adjoint_brute, local_adjoint_coefficients,
    single_spin_pair_residual, AdjointExpansion, SpinTarget,
};
pub use builtin::{builtin, q_coefficients, q_matrix, BuiltinJump};
pub use closure::{
    antisymmetric_condition_residuals, check_closure_antisymmetric, check_closure_symmetric, check_hamiltonian_closure,
    symmetric_condition_residuals, ClosureReport, ConditionResidual, GeneralHamiltonian, LocalFieldHamiltonian,
    DEFAULT_CLOSURE_TOL,
};
pub use coefficients::{
    AntisymmetricBilocalCoefficients, JumpKind, JumpOperatorSpec, LocalJumpCoefficients, SymmetricBilocalCoefficients,
    C3,
};
pub use spin::{basis_norm, pair_basis, s_minus, s_plus, site_basis, spin, Op};
