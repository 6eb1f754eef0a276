//! The user guide, embedded as compiled documentation.
//!
//! Each module below carries one chapter of the book under `book/src/`,
//! so every `rust` snippet in the guide runs as a doc-test and cannot
//! drift from the library.  Render the same chapters as a website with
//! `mdbook build book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}

#[doc = include_str!("../../../book/src/series.md")]
pub mod series_and_layer_binomials {}

#[doc = include_str!("../../../book/src/grassmann.md")]
pub mod grassmann_and_berezin_integration {}

#[doc = include_str!("../../../book/src/pipelines.md")]
pub mod the_two_chern_pipelines {}

#[doc = include_str!("../../../book/src/configurations.md")]
pub mod configurations_and_asymptotics {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod the_command_line_tool {}
