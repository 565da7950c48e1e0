use thiserror::Error;

/// The kinematic model is undefined at the requested state.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("airspeed {v_t} m/s is at or below the minimum of {min} m/s")]
    SpeedTooLow { v_t: f64, min: f64 },
    #[error("pitch {theta} rad is within {margin} rad of the vertical singularity")]
    PitchSingular { theta: f64, margin: f64 },
    #[error("non-finite value in state or input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BarrierError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    /// The aircraft is already inside the obstacle's collision sphere.
    #[error("separation {separation} m is inside the collision radius {radius} m")]
    InsideCollisionRadius { separation: f64, radius: f64 },
    /// Relative speed too small for the collision cone to be defined.
    #[error("relative speed {speed} m/s is below the cone threshold")]
    DegenerateVelocity { speed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QpError {
    #[error("barrier constraint is violated and has zero input gradient")]
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ReferenceError {
    #[error("time {t} s is outside the reference horizon [0, {horizon}] s")]
    OutOfHorizon { t: f64, horizon: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("failed to parse scenario: {0}")]
    Parse(String),
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid override `{0}`: expected key=value")]
    BadOverride(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("configurations differ in `{0}`; compared scenarios must share it")]
    Mismatch(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("step {step} (t = {t} s): {source}")]
    Domain {
        step: usize,
        t: f64,
        #[source]
        source: DomainError,
    },
    #[error(transparent)]
    Reference(#[from] ReferenceError),
}
