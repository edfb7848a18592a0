// Each chapter of the guide is attached to an empty module so that
// `cargo test --doc` compiles and runs its code listings.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/qpochhammer.md")]
mod qpochhammer {}
#[doc = include_str!("../../../book/src/toeplitz.md")]
mod toeplitz {}
#[doc = include_str!("../../../book/src/factorization.md")]
mod factorization {}
#[doc = include_str!("../../../book/src/solver.md")]
mod solver {}
#[doc = include_str!("../../../book/src/floating_point.md")]
mod floating_point {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
