//! The guide in `book/`, compiled so that its Rust listings run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/machines.md")]
pub mod machines {}

#[doc = include_str!("../../../book/src/partm.md")]
pub mod partm {}

#[doc = include_str!("../../../book/src/epartm.md")]
pub mod epartm {}

#[doc = include_str!("../../../book/src/track-dtm.md")]
pub mod track_dtm {}

#[doc = include_str!("../../../book/src/axioms.md")]
pub mod axioms {}

#[doc = include_str!("../../../book/src/modal.md")]
pub mod modal {}

#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}
