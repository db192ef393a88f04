//! Brute-force oracles: topology counts, explainer search and an exhaustive
//! comparison with the recognizer.

use genfitch::io::{read_map, write_tree};
use genfitch::oracle::{all_explainers, count_rooted_trees, enumerate_topologies, leaf_names};
use genfitch::verify::verify_exhaustive;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 2..=6 {
        let listed = enumerate_topologies(&leaf_names(n))?.len();
        println!(
            "n={n}: {} topologies (listed {listed})",
            count_rooted_trees(n)
        );
    }

    let map = read_map("#fitchmap v1\na\tb\tc\n.\t-\t2\n1\t.\t2\n1\t-\t.\n")?;
    let explainers = all_explainers(&map)?;
    println!("{} explaining trees, coarsest first:", explainers.len());
    for t in explainers.iter().take(3) {
        print!("  {}", write_tree(t));
    }

    let report = verify_exhaustive(3, 2)?;
    println!(
        "3 leaves, 2 symbols: {} maps, {} tree-like, agree: {}",
        report.maps,
        report.tree_like,
        report.all_agree()
    );
    Ok(())
}
