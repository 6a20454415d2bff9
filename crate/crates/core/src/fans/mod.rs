//! Simplicial complexes, simplicial fans, and the checks the quotient
//! construction needs: nonsingularity, projection, completeness.

mod complex;
mod fan;

pub use complex::{ComplexError, ComplexSpec, SimplicialComplex};
pub use fan::{
    complex_ray_vertices, covers_sampled_points, faces_of, fan_from_complex, is_complete, is_nonsingular,
    project_fan, Cone, Fan, FanError, FanSpec, FanViolation, ProjectError, Projection,
};
