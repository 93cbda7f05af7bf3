//! Numerical tolerances shared by every module.

/// Tolerance set used by fitting, identity checks and robustness decisions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative residual bound for the regularized normal equations.
    pub residual: f64,
    /// Agreement bound for algebraic identities such as `z · y = θᵀx`.
    pub identity: f64,
    /// Reciprocal condition estimate below which an unregularized system is singular.
    pub singular_rcond: f64,
    /// Absolute slack on ε-band containment checks.
    pub decision: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        residual: 1e-8,
        identity: 1e-9,
        singular_rcond: 1e-12,
        decision: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
