pub mod canonical;
pub mod charp;
pub mod charzero;
pub mod error;
pub mod field;
pub mod finite_order;
pub mod limits;
pub mod linalg;
mod plane;
pub mod poly;
pub mod sample;
mod torus;
pub mod trimap;
pub mod witness;

pub use error::{Certificate, Error, Result};
pub use field::{Field, Scalar};
pub use poly::{parse_polynomial, Monomial, Polynomial};
pub use trimap::{parse_map, Order, Point, TriangularMap};
pub use witness::{ClassLabel, ClassReport, ConjugationWitness, Group};
pub use canonical::canonical_form;
