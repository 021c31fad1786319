//! A laboratory for sequential higher-order computation.
//!
//! * [`term`], [`syntax`], [`lang`]: simply typed terms with arithmetic,
//!   fixed points, recursors, minimization and loops, their concrete syntax
//!   and the language fragments they belong to.
//! * [`reduce`]: the call-by-name small-step semantics.
//! * [`translate`]: compilations between the languages and product elimination.
//! * [`nsp`]: nested sequential procedures, the denotational model.
//! * [`barrec`]: sequence coding, bar trees and bar recursion.
//! * [`separation`]: counterexample synthesis against candidate bar recursors.
//! * [`corpus`], [`cli`]: term generation and the command-line front end.

pub mod barrec;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod lang;
pub mod library;
pub mod nsp;
pub mod reduce;
pub mod separation;
pub mod seqcode;
pub mod syntax;
pub mod term;
pub mod translate;
pub mod types;

pub use error::{Error, Result};
pub use term::{Const, LibFn, Term, TermKind, Var};
pub use types::Type;

/// Runs `f` on a thread with a large stack.
///
/// Host-level recursion (tree printing, deep bar-recursion oracles) can go
/// deeper than the default test-thread stack allows.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(f)
        .expect("spawn worker thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}
