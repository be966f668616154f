//! Core algorithms for building and checking structured Wang tilings.
//!
//! Everything in this crate is pure computation over in-memory values: the
//! tile/palette data model, border-constrained square tilers, a Turing
//! machine to tile set compiler, a resource-bounded description-complexity
//! oracle, the 2-adic self-similar square pattern with its communication
//! channels, stripe-language deciders, and a deterministic simulation of the
//! hierarchical complexity-checking protocol.
//!
//! The crate is `no_std` + `alloc`; file formats, the CLI, and renderers live
//! in the companion `wangkit` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod channels;
pub mod compress;
pub mod fixtures;
pub mod hierarchy;
pub mod kolmo;
pub mod palette;
pub mod selfsim;
pub mod solver;
pub mod stripes;
pub mod tiler;
pub mod tm;

pub use bits::BitString;
pub use palette::{BorderColoring, ColorId, Palette, Tile, TilingGrid};
