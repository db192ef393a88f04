//! Evaluate a labeled tree into the map it explains.

use genfitch::evaluate;
use genfitch::io::{read_tree, write_map};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = read_tree("((a:-,b:-):1,(c:-,d:2):-,e:3);")?;
    print!("{}", write_map(&evaluate(&tree)?));

    // two symbols on the path to b
    let conflict = read_tree("(a:-,(b:2,c:-):1);")?;
    match evaluate(&conflict) {
        Ok(_) => println!("unexpectedly consistent"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
