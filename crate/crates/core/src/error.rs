use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("singular series: leading coefficient is zero")]
    SingularSeries,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("pole of order {order} at s = {location}")]
    Pole { location: String, order: u32 },
    #[error("unstable cell: z0 = {center}, depth {depth}, torus ({x1}, {x2})")]
    UnstableCell {
        center: String,
        depth: i64,
        x1: i64,
        x2: i64,
    },
    #[error("bounds insufficient below degree {0}")]
    BoundInsufficient(i64),
    #[error("unconverged: coarse {coarse}, fine {fine}")]
    Unconverged { coarse: String, fine: String },
    #[error("rewrite budget of {0} steps exhausted")]
    Budget(usize),
    #[error("divergent input: {0}")]
    Divergent(String),
    #[error("degenerate parameter: {0}")]
    Degenerate(String),
    #[error("Jacquet integral convergence not guaranteed: {0}")]
    NotDominant(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
