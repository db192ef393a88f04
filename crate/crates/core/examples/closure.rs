//! Closure of a triple set and whether it identifies a tree.

use genfitch::io::{read_tree, read_triples, write_triples};
use genfitch::treeops::triples_of;
use genfitch::triples::{closure_on, identifies};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = read_triples("a b | c\nc d | b\n")?;
    let cl = closure_on(&r, &["a", "b", "c", "d"])?;
    print!("closure:\n{}", write_triples(&cl));

    let tree = read_tree("((a:-,b:-):-,(c:-,d:-):-);")?;
    println!("identifies tree: {}", identifies(&r, &tree)?);
    println!(
        "all triples identify it: {}",
        identifies(&triples_of(&tree), &tree)?
    );
    Ok(())
}
