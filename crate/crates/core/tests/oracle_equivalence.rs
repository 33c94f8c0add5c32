//! The indexed, parallel run against exhaustive enumeration.

mod common;

use std::time::Instant;

use slabeling::oracle::brute_force_run;
use slabeling::stratify::{run_with_options, RunOptions};

#[test]
fn indexed_run_equals_brute_force() {
    let start = Instant::now();
    for case in common::oracle_cases() {
        let fast = run_with_options(&case.points, &case.schedule, &RunOptions::uncapped()).unwrap();
        let slow = brute_force_run(&case.points, &case.schedule).unwrap();
        assert_eq!(fast, slow, "{}", case.name);
        let sizes: Vec<(usize, usize, usize)> =
            fast.layers.iter().map(|l| (l.dim, l.tuples.len(), l.labeled.len())).collect();
        println!("{}: layers {sizes:?}, residual {}", case.name, fast.residual.len());
    }
    println!("total {:?}", start.elapsed());
}
