//! Subspaces, principal angles, slabs, enclosing balls and simplex distances.

use slabeling::geometry::{
    dist_to_simplex, hausdorff, min_enclosing_ball, orthonormalize, principal_angles, subspace_angle, tuple_slab,
};
use slabeling::{PointSet, SimplexTuple};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two planes of R^3 meeting along the x-axis at 30 degrees.
    let a = orthonormalize(&[&[1.0, 0.0, 0.0][..], &[0.0, 1.0, 0.0][..]])?;
    let t = 30f64.to_radians();
    let b = orthonormalize(&[&[1.0, 0.0, 0.0][..], &[0.0, t.cos(), t.sin()][..]])?;
    let deg: Vec<f64> = principal_angles(&a, &b).iter().map(|x| x.to_degrees()).collect();
    println!("principal angles (deg): {deg:.3?}");
    println!("subspace angle = sin(largest) = {:.6}", subspace_angle(&a, &b));

    // A triangle: its slab, enclosing ball and distances to it.
    let pts = PointSet::from_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.3, 0.3, 0.05]])?;
    let tri = SimplexTuple::new(vec![0, 1, 2], &pts)?;
    println!("triangle: dim {}, enclosing radius {:.6}", tri.dim(), tri.radius());
    let slab = tuple_slab(&tri, 1.0, 0.1);
    println!("slab(h_par=1, h_perp=0.1) contains (0.3,0.3,0.05): {}", slab.contains(pts.point(3)));
    println!("...and (0.3,0.3,0.2): {}", slab.contains(&[0.3, 0.3, 0.2]));

    let rows: Vec<&[f64]> = (0..3).map(|i| pts.point(i)).collect();
    let (center, radius) = min_enclosing_ball(&rows);
    println!("enclosing ball: center {center:.4?}, radius {radius:.6}");
    println!("distance from (1,1,1) to the triangle: {:.6}", dist_to_simplex(&[1.0, 1.0, 1.0], &rows));

    let square = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
    let corner = [[0.0, 0.0]];
    println!("Hausdorff(square corners, origin) = {:.6}", hausdorff(&square, &corner));
    Ok(())
}
