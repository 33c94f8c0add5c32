//! Exact linear-geometric primitives.
//!
//! Everything here is a pure function of its inputs. Points are plain
//! `&[f64]` slices; flats are [`Subspace`]s carrying an orthonormal basis.

mod hausdorff;
pub(crate) mod simplex;
mod slab;
mod subspace;

pub use hausdorff::{hausdorff, one_sided_hausdorff};
pub use simplex::{
    closest_point_on_simplex, dist_to_simplex, min_enclosing_ball, min_enclosing_ball_radius,
};
pub use slab::{slab_contains, tuple_slab, Slab, SimplexTuple};
pub use subspace::{
    cone_angle, cone_angle_one_sided, orthonormalize, principal_angles, subspace_angle,
    DegenerateError, Subspace, RANK_TOL,
};

pub(crate) use slab::in_slab;
pub(crate) use subspace::{angle_flat, orthonormalize_flat};
