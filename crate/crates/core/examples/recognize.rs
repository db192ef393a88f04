//! Decide tree-likeness of a small map and print the least-resolved tree,
//! then show the violation reported for a map that is not tree-like.

use genfitch::io::{read_map, write_tree};
use genfitch::{explains, recognize, RecognitionReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = read_map("#fitchmap v1\na\tb\tc\n.\t-\t2\n1\t.\t2\n1\t-\t.\n")?;
    match recognize(&map) {
        RecognitionReport::TreeLike(t) => {
            print!("least-resolved tree: {}", write_tree(&t));
            println!("explains map: {}", explains(&t, &map)?);
        }
        RecognitionReport::NotTreeLike(v) => println!("not tree-like: {v}"),
    }

    // leaf a is reached by two different symbols
    let bad = read_map("#fitchmap v1\na\tb\tc\n.\t-\t-\n1\t.\t-\n2\t-\t.\n")?;
    if let Some(v) = recognize(&bad).violation() {
        println!("{}: {v}", v.kind());
        println!(
            "witness leaves {:?}, symbols {:?}",
            v.witness_leaves(),
            v.witness_symbols()
        );
    }
    Ok(())
}
