use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample count {0} is not a power of two >= 4")]
    SampleCount(usize),

    #[error("{what} = {value} is out of range ({expected})")]
    Range {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("point {re}{im:+}i is outside the admissible domain: {reason}")]
    Domain { re: f64, im: f64, reason: &'static str },

    #[error("symbol carries a truncation tail (bound {0}); truncate explicitly before exact operator work")]
    Tail(f64),

    #[error("trace did not stabilize: N={n} gives {at_n}, N={n2} gives {at_2n} (diff {diff:e})")]
    Stabilization {
        n: usize,
        n2: usize,
        at_n: String,
        at_2n: String,
        diff: f64,
    },

    #[error("winding number undefined: curve comes within {distance:e} of the point (eps {eps:e})")]
    WindingUndefined { distance: f64, eps: f64 },

    #[error("accumulated argument {turns} turns is not an integer")]
    NonInteger { turns: f64 },

    #[error("degenerate root at {re}{im:+}i: |J| = {jacobian:e}")]
    DegenerateRoot { re: f64, im: f64, jacobian: f64 },

    #[error("root search did not stabilize within subdivision depth {0}")]
    NoConvergence(u32),

    #[error("masked cells may carry {bound:e} of mass, more than 1% of |rhs| = {rhs:e}")]
    MaskCoverage { bound: f64, rhs: f64 },

    #[error("masked area fraction {0} exceeds the 10% budget")]
    MaskBudget(f64),

    #[error("alpha_minus = {minus} exceeds alpha_plus = {plus}")]
    Order { minus: f64, plus: f64 },

    #[error("perturbation index k = {k} is smaller than the weight window W = {window}")]
    Window { k: usize, window: usize },

    #[error("exponents p = {p}, q = {q} are not Hölder conjugate")]
    Conjugate { p: f64, q: f64 },

    #[error("schema: {0}")]
    Schema(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SampleCount(_) => "sample_count",
            Error::Range { .. } => "range",
            Error::Domain { .. } => "domain",
            Error::Tail(_) => "tail",
            Error::Stabilization { .. } => "stabilization",
            Error::WindingUndefined { .. } => "winding_undefined",
            Error::NonInteger { .. } => "non_integer",
            Error::DegenerateRoot { .. } => "degenerate_root",
            Error::NoConvergence(_) => "no_convergence",
            Error::MaskCoverage { .. } => "mask_coverage",
            Error::MaskBudget(_) => "mask_budget",
            Error::Order { .. } => "order",
            Error::Window { .. } => "window",
            Error::Conjugate { .. } => "conjugate",
            Error::Schema(_) => "schema",
            Error::Io(_) => "io",
        }
    }

    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Stabilization { .. }
                | Error::WindingUndefined { .. }
                | Error::NonInteger { .. }
                | Error::DegenerateRoot { .. }
                | Error::NoConvergence(_)
                | Error::MaskCoverage { .. }
                | Error::MaskBudget(_)
        )
    }

    pub(crate) fn range(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Range {
            what,
            value,
            expected,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
