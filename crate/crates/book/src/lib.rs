//! Every chapter of the guide in `book/src` is pulled in as module docs, so
//! its Rust code blocks run as doc-tests with the workspace.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/truncation.md")]
pub mod truncation {}

#[doc = include_str!("../../../book/src/series_files.md")]
pub mod series_files {}

#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}

#[doc = include_str!("../../../book/src/entropy.md")]
pub mod entropy {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
