//! Compiles every code block of the guide in `book/src` as a doc-test, so
//! the guide cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/groups.md")]
pub mod groups {}
#[doc = include_str!("../../../book/src/cayley.md")]
pub mod cayley {}
#[doc = include_str!("../../../book/src/detection.md")]
pub mod detection {}
#[doc = include_str!("../../../book/src/wreath.md")]
pub mod wreath {}
#[doc = include_str!("../../../book/src/witnesses.md")]
pub mod witnesses {}
#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/reproducing.md")]
pub mod reproducing {}
