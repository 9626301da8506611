use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("matrix drifted too far from the isometry group (form error {error:.3e}); rebuild it from generators")]
    Drift { error: f64 },
    #[error("matrix maps the upper sheet to the lower sheet")]
    SheetFlip,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("ball radius {radius} outside the supported range 1..={max}")]
    RadiusOutOfRange { radius: u32, max: u32 },
    #[error("orbit points collide in the disk chart near vertex {vertex}: {detail}")]
    DedupCollision { vertex: usize, detail: String },
    #[error("floating-point drift while building the ball: {0}")]
    Drift(#[from] GeomError),
    #[error("image of vertex {vertex} leaves the built region; rebuild with a larger radius")]
    Escape { vertex: String },
    #[error("vertex {vertex} is within {depth} of the rim of a radius-{radius} ball; it needs its full neighbourhood")]
    NotInterior { vertex: String, depth: u32, radius: u32 },
    #[error("convex hull reaches depth {depth}, beyond the interior radius {interior}; rebuild with a larger radius")]
    HullEscape { depth: u32, interior: u32 },
    #[error("{from} and {to} are not adjacent")]
    NotAdjacent { from: String, to: String },
    #[error("vertex set is not connected (reached {reached} of {total})")]
    Disconnected { reached: usize, total: usize },
    #[error("no vertex {0} in this lattice")]
    UnknownVertex(u64),
    #[error("lattice has no coordinates (build it in geometric mode)")]
    MissingCoordinates,
    #[error("invalid lattice document: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SawError {
    #[error("walk must start at the root")]
    NotRooted,
    #[error("steps {index} and {next} of the walk are not adjacent")]
    NotAdjacent { index: usize, next: usize },
    #[error("walk revisits a vertex at step {index}")]
    NotSelfAvoiding { index: usize },
    #[error("walks of length {n} need a ball with interior radius {n}, this one has {interior}")]
    TooLong { n: usize, interior: u32 },
    #[error("index {i} outside 0 < i < {n}")]
    BadIndex { i: usize, n: usize },
    #[error("reflected walk is not self-avoiding (step {index}); tangency was violated")]
    ReflectionBroken { index: usize },
    #[error("no self-avoiding walks of length {0}")]
    Empty(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid analysis parameters: {0}")]
    Invalid(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Saw(#[from] SawError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
