use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("mechanism has no driver")]
    MissingDriver,
    #[error("mechanism has no closed loop")]
    OpenChain,
    #[error("link `{link}` has non-positive length {length}")]
    NonPositiveLength { link: String, length: f64 },
    #[error("output `{output}` is not reachable from the driver")]
    DanglingOutput { output: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown reference `{reference}` in {context}")]
    UnknownReference { reference: String, context: String },
    #[error("gear coupling `{gear}` has zero ratio")]
    ZeroRatio { gear: String },
    #[error("the angle of link `{link}` is imposed more than once")]
    OverImposed { link: String },
    #[error("joint `{joint}` cannot carry an imposed angle")]
    ImposedGroundJoint { joint: String },
    #[error("angle couplings form a cycle through link `{link}`")]
    CouplingCycle { link: String },
    #[error("mechanism has {unknowns} unknowns but {equations} closure equations")]
    DegreesOfFreedom { unknowns: usize, equations: usize },
    #[error("joint `{joint}` closes a loop but carries no branch flag")]
    MissingBranch { joint: String },
    #[error("dyad arm of link `{link}` has zero length")]
    DegenerateDyad { link: String },
    #[error("mechanism cannot be assembled dyad by dyad and has no home pose")]
    NoInitialGuess,
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{name}` = {value} lies outside [{min}, {max}]")]
    OutOfBounds { name: String, value: f64, min: f64, max: f64 },
    #[error("invalid value for {field}: {reason}")]
    InvalidValue { field: String, reason: String },
}

/// Failures while solving a pose. Phases are reported in degrees.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("not assemblable at phi = {phase_deg:.6} deg (loop closed by `{joint}`, margin {margin:.6} mm)")]
    NotAssemblable { phase_deg: f64, joint: String, margin: f64 },
    #[error("singular configuration at phi = {phase_deg:.6} deg: arms meeting at `{joint}` are collinear")]
    SingularConfiguration { phase_deg: f64, joint: String },
    #[error("no convergence at phi = {phase_deg:.6} deg after {iterations} iterations (residual {residual:.3e} mm)")]
    NoConvergence { phase_deg: f64, iterations: usize, residual: f64 },
    #[error("singular Jacobian at phi = {phase_deg:.6} deg")]
    SingularJacobian { phase_deg: f64 },
    #[error("solution at phi = {phase_deg:.6} deg left the configured branch at joint `{joint}`")]
    BranchMismatch { phase_deg: f64, joint: String },
    #[error("sweep does not close over one cycle (deviation {deviation:.3e} rad)")]
    NotPeriodic { deviation: f64 },
    #[error("mechanism has no output named `{name}`")]
    MissingOutput { name: String },
    #[error("{requested} samples requested; at least {minimum} are required")]
    TooFewSamples { requested: usize, minimum: usize },
}

impl SolveError {
    pub fn phase_deg(&self) -> Option<f64> {
        match self {
            SolveError::NotAssemblable { phase_deg, .. }
            | SolveError::SingularConfiguration { phase_deg, .. }
            | SolveError::NoConvergence { phase_deg, .. }
            | SolveError::SingularJacobian { phase_deg }
            | SolveError::BranchMismatch { phase_deg, .. } => Some(*phase_deg),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SolveError::NotAssemblable { .. } => "NotAssemblable",
            SolveError::SingularConfiguration { .. } => "SingularConfiguration",
            SolveError::NoConvergence { .. } => "NoConvergence",
            SolveError::SingularJacobian { .. } => "SingularJacobian",
            SolveError::BranchMismatch { .. } => "BranchMismatch",
            SolveError::NotPeriodic { .. } => "NotPeriodic",
            SolveError::MissingOutput { .. } => "MissingOutput",
            SolveError::TooFewSamples { .. } => "TooFewSamples",
        }
    }
}

impl ValidationError {
    pub fn kind(&self) -> &'static str {
        match self {
            ValidationError::MissingDriver => "MissingDriver",
            ValidationError::OpenChain => "OpenChain",
            ValidationError::NonPositiveLength { .. } => "NonPositiveLength",
            ValidationError::DanglingOutput { .. } => "DanglingOutput",
            ValidationError::DuplicateId(_) => "DuplicateId",
            ValidationError::UnknownReference { .. } => "UnknownReference",
            ValidationError::ZeroRatio { .. } => "ZeroRatio",
            ValidationError::OverImposed { .. } => "OverImposed",
            ValidationError::ImposedGroundJoint { .. } => "ImposedGroundJoint",
            ValidationError::CouplingCycle { .. } => "CouplingCycle",
            ValidationError::DegreesOfFreedom { .. } => "DegreesOfFreedom",
            ValidationError::MissingBranch { .. } => "MissingBranch",
            ValidationError::DegenerateDyad { .. } => "DegenerateDyad",
            ValidationError::NoInitialGuess => "NoInitialGuess",
            ValidationError::UnknownParameter(_) => "UnknownParameter",
            ValidationError::OutOfBounds { .. } => "OutOfBounds",
            ValidationError::InvalidValue { .. } => "InvalidValue",
        }
    }
}
