//! Exact solver for the one-round discrete Voronoi game on a line.
//!
//! A leader places `k` points, then a follower places `l` points, and each
//! voter goes to the nearest point with ties going to the leader. The solver
//! computes the largest number of voters the leader can guarantee, together
//! with a strategy achieving it.

pub mod dp;
pub mod error;
pub mod gainmap;
pub mod game;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod scalar;

pub use dp::{solve_game, Method, Solution};
pub use error::{Error, Result};
pub use game::{GameInstance, Strategy, VoterSet};
pub use scalar::{Coord, Ext, ExtendedCoord};
