//! Single-symbol case: recognize a Fitch digraph, build its least-resolved
//! tree and look up a forbidden triad in a digraph that is not Fitch.

use genfitch::io::write_tree;
use genfitch::simple_fitch::{
    find_forbidden_triad, forbidden_table, least_resolved_simple, Digraph, SimpleTree,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = forbidden_table();
    println!(
        "forbidden triads: {} classes, {} labeled",
        table.classes().len(),
        table.labeled_count()
    );

    let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let g = Digraph::new(
        names.clone(),
        [
            ("a", "b"),
            ("a", "c"),
            ("b", "c"),
            ("c", "b"),
            ("d", "a"),
            ("d", "b"),
            ("d", "c"),
        ],
    )?;
    match least_resolved_simple(&g)? {
        SimpleTree::Tree(t) => print!("tree: {}", write_tree(&t)),
        SimpleTree::SingleLeaf(x) => println!("single leaf {x}"),
    }

    let path = Digraph::new(names[..3].to_vec(), [("a", "b"), ("b", "c")])?;
    if let Some([x, y, z]) = find_forbidden_triad(&path) {
        let v = path.vertices();
        println!("forbidden triad on {}, {}, {}", v[x], v[y], v[z]);
    }
    Ok(())
}
