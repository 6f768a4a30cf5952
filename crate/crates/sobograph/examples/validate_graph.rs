//! Structural validation: connectivity, short cuts, and which nodes can act
//! as a preprocessing root.
//!
//! ```bash
//! cargo run --example validate_graph
//! ```

use sobograph::{check_uniqueness, enumerate_root_candidates, Graph};

fn main() {
    // A triangle where one edge is longer than the detour around it: that
    // edge is never part of a shortest path (a "short cut" violation).
    let triangle = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
    let report = triangle.validate(1e-9);
    println!("triangle (1, 1, 3):");
    println!("  connected:      {}", report.connected);
    println!("  short cuts:     {:?}", report.offending_edges);

    // A unit 4-cycle has two equal-length paths to the opposite node, so no
    // node qualifies as a unique-shortest-path root.
    let cycle = Graph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
        .unwrap();
    println!("\nunit 4-cycle:");
    for z0 in 0..4 {
        println!("  root {z0} unique paths: {}", check_uniqueness(&cycle, z0, 1e-9));
    }
    match enumerate_root_candidates(&cycle, 1e-9) {
        Ok(roots) => println!("  roots: {roots:?}"),
        Err(e) => println!("  roots: none ({e})"),
    }

    // Tiny multiplicative jitter breaks the tie and every node becomes
    // usable.
    let jittered = cycle.perturb_weights(1e-9, 42);
    let roots = enumerate_root_candidates(&jittered, 1e-15).unwrap();
    println!("  after 1e-9 jitter, roots: {roots:?}");

    // Trees always pass: every pairwise path is unique.
    let tree = Graph::from_edges(4, &[(0, 1, 2.0), (1, 2, 1.0), (1, 3, 4.0)]).unwrap();
    let roots = enumerate_root_candidates(&tree, 1e-9).unwrap();
    println!("\ntree: roots = {roots:?} (all of them)");
}
