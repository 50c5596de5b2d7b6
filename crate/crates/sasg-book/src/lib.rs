//! Runs every Rust code block in `book/` as a doc-test.
//!
//! mdbook cannot test snippets that depend on external crates, so each
//! chapter is included here as module documentation and `cargo test --doc`
//! does the work. One module per chapter keeps test failures attributable
//! to the chapter they came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/stage-game.md")]
pub mod stage_game {}

#[doc = include_str!("../../../book/src/beliefs.md")]
pub mod beliefs {}

#[doc = include_str!("../../../book/src/equilibria.md")]
pub mod equilibria {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/repeated-game.md")]
pub mod repeated_game {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
