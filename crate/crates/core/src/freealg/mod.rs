//! The free nonassociative algebra: binary-tree monomials, homogeneous
//! polynomials with rational coefficients, substitution and polarization.

mod poly;
mod term;

pub use poly::{BracketKind, MultiPoly};
pub use term::{shape_degree, shape_is_valid, shapes_of_degree, subtree_end, Multidegree, Shape, Term};

/// `x_i` as a polynomial.
pub fn x(i: u32) -> MultiPoly {
    MultiPoly::var(i)
}
