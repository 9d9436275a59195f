//! Curved differential graded algebras, the zigzag bar construction, curved
//! cohomology, and bundle-valued iterated integrals on path space.
//!
//! The crate has three layers:
//!
//! * an exact symbolic layer (`ring`, `poly`, `matrix`, `form`, `shuffle`)
//!   of matrix-valued polynomial forms over big rationals;
//! * the algebraic layer (`cdga`, `cohomology`, `zigzag`) implementing
//!   curved DGAs, their curved cohomology, and the zigzag complex with its
//!   differential, shuffle product, and collapse to the classical bar
//!   complex;
//! * a numerical layer (`pathspace`) evaluating the iterated-integral map
//!   into bundle-valued forms on path space, with parallel transport by RK4
//!   and simplex quadrature by iterated Gauss-Legendre rules.
//!
//! All sign conventions are recorded in `SIGNS.md` at the repository root
//! and digested into reports via [`report::sign_convention_digest`].

pub mod bar;
pub mod cdga;
pub mod cohomology;
pub mod form;
pub mod linalg;
pub mod matrix;
pub mod pathspace;
pub mod poly;
pub mod report;
pub mod ring;
pub mod shuffle;
pub mod zigzag;
