use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `|det J1|` fell below the singularity threshold (Type-2 proximity).
    #[error("J1 is singular (|det| = {det:e})")]
    SingularJ1 { det: f64 },
    /// `|det J2|` fell below the singularity threshold (Type-1 proximity).
    #[error("J2 is singular (|det| = {det:e})")]
    SingularJ2 { det: f64 },
    #[error("Euler rate map T is singular (elevation = {elevation} rad)")]
    SingularT { elevation: f64 },
    #[error("leg {leg}: no real inverse geometric solution (discriminant = {discriminant:e})")]
    NoRealSolution { leg: usize, discriminant: f64 },
    #[error("leg {leg}: degenerate inverse geometric quadratic")]
    DegenerateQuadratic { leg: usize },
    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual = {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("angle {angle} rad sits on the tan-half branch point")]
    AngleAtBranchPoint { angle: f64 },
    #[error("polynomial Jacobian is singular at the Kantorovich center")]
    SingularJacobianAtCenter,
    #[error("no {what} crossing in the search band")]
    NoCrossing { what: &'static str },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("sample {sample}: {source}")]
    Simulation {
        sample: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
