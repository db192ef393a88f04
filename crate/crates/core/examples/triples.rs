//! Informative triples of a tree-like map and the tree BUILD returns on them.

use genfitch::io::{write_tree, write_triples};
use genfitch::oracle::random_tree_like_instance;
use genfitch::recognize;
use genfitch::triples::{aho_build, informative_table, informative_triples};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = informative_table();
    println!(
        "{} normalized informative patterns in {} classes",
        table.patterns().len(),
        table.classes().len()
    );

    let (_, map) = random_tree_like_instance(5, 8, 2);
    let triples = informative_triples(&map);
    print!("{}", write_triples(&triples));
    let built = aho_build(&triples, map.leaves())?;
    print!("BUILD:      {}", write_tree(&built));
    let recognized = recognize(&map).tree().cloned().ok_or("not tree-like")?;
    print!("recognized: {}", write_tree(&recognized));
    println!("same topology: {}", built.same_topology(&recognized));
    Ok(())
}
