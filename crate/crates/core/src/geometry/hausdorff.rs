use crate::linalg::dist_sq;

/// `sup_{a in A} inf_{b in B} |a - b|` for finite sets.
pub fn one_sided_hausdorff<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "Hausdorff distance of an empty set");
    let mut worst_sq = 0.0_f64;
    for p in a {
        let p = p.as_ref();
        let mut best = f64::INFINITY;
        for q in b {
            let d = dist_sq(p, q.as_ref());
            if d < best {
                best = d;
                if best <= worst_sq {
                    // p cannot raise the supremum any more.
                    break;
                }
            }
        }
        worst_sq = worst_sq.max(best);
    }
    worst_sq.sqrt()
}

/// Symmetric Hausdorff distance between finite sets.
pub fn hausdorff<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> f64 {
    one_sided_hausdorff(a, b).max(one_sided_hausdorff(b, a))
}
