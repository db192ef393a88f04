//! Seeded random instances: a tree-like map, a perturbed copy and a uniform map.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use genfitch::io::{write_map, write_tree};
use genfitch::oracle::{mutate_map, random_map, random_tree_like_instance};
use genfitch::recognize;

fn main() {
    let (tree, map) = random_tree_like_instance(7, 6, 2);
    print!("{}{}", write_tree(&tree), write_map(&map));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mutated = mutate_map(&mut rng, &map, 1, 2, true);
    let uniform = random_map(&mut rng, map.leaves(), 2);
    for (name, m) in [
        ("original", &map),
        ("mutated", &mutated),
        ("uniform", &uniform),
    ] {
        println!("{name}: tree-like = {}", recognize(m).is_tree_like());
    }
}
