//! Text formats and arena generators.

pub mod format;
pub mod generate;
pub mod rng;

pub use format::{
    parse_arena, parse_solution, write_arena, write_solution, FormatError, SolutionDocument,
};
pub use generate::{generate, Family, GenError, GenSpec};
pub use rng::XorShift64Star;
