//! Text formats and their positioned parse errors.

use genfitch::io::{read_map, read_tree, write_map, write_tree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = read_tree("((x:-,y:1):-,z:2);")?;
    print!("{}", write_tree(&tree));
    let map = read_map("#fitchmap v1\nx\ty\n.\t1\n-\t.\n")?;
    print!("{}", write_map(&map));

    for bad in ["((x:-,y:1):-,z:2)", "(x:-,x:1);", "(x:-,y:(1);"] {
        let e = read_tree(bad).unwrap_err();
        println!("{bad:<20} {}: {e}", e.kind());
    }
    let e = read_map("#fitchmap v2\nx\ty\n").unwrap_err();
    println!("{}: {e}", e.kind());
    Ok(())
}
