pub mod error;
pub mod gauss;

pub use error::{Error, Result};
pub use gauss::{Component, Correspondence, End, Flavor, GaussDiagram, Half, HalfMap, Kind, Pos, Role, TangleType};
pub mod based_matrix;
pub mod indices;
pub mod moves;
pub mod search;
pub mod surface;
pub mod verify;
pub mod biquandle;
pub mod catalog;
