//! Exact arithmetic in definite quaternion algebras and their lattices and orders.

mod algebra;
mod lattice;
mod order;

pub use algebra::{hilbert_symbol, QAlgebra, Quat};
pub use lattice::QuatLattice;
pub use order::{complement_of_one, enlarge_to_disc, is_order, maximal_order, normx_form, Order};
