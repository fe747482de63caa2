//! The snippets of the guide under `book/`, compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/stp.md")]
pub mod stp {}

#[doc = include_str!("../../../book/src/networks.md")]
pub mod networks {}

#[doc = include_str!("../../../book/src/stochastic.md")]
pub mod stochastic {}

#[doc = include_str!("../../../book/src/consistency.md")]
pub mod consistency {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
