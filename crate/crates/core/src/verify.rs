//! Recognizer versus brute-force oracle, exhaustively or on seeded samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evaluate::explains;
use crate::generalized::recognize;
use crate::model::{Alphabet, FitchMap, LabelCode};
use crate::oracle::{
    all_explainers, leaf_names, mutate_map, random_map, random_tree_like_instance, ExplainerIndex,
    OracleError,
};
use crate::tree::LabeledTree;
use crate::treeops::displays;

/// Largest number of maps an exhaustive run may enumerate.
pub const MAX_EXHAUSTIVE_MAPS: u64 = 20_000_000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub maps: u64,
    pub tree_like: u64,
    /// Maps where the verdicts differ.
    pub verdict_mismatches: u64,
    /// Tree-like maps where the recognized tree fails to explain the map or
    /// some oracle explainer does not display it.
    pub tree_mismatches: u64,
    /// Up to ten offending maps, one line each.
    pub examples: Vec<String>,
}

impl VerifyReport {
    pub fn all_agree(&self) -> bool {
        self.verdict_mismatches == 0 && self.tree_mismatches == 0
    }

    fn record(&mut self, map: &FitchMap, explainers: &[LabeledTree]) {
        self.maps += 1;
        let report = recognize(map);
        let (verdict_ok, tree_ok) = match report.tree() {
            Some(t) if !explainers.is_empty() => {
                let ok = explains(t, map).unwrap_or(false)
                    && explainers.iter().all(|e| displays(e, t).unwrap_or(false));
                (true, ok)
            }
            Some(_) => (false, true),
            None => (explainers.is_empty(), true),
        };
        self.tree_like += !explainers.is_empty() as u64;
        self.verdict_mismatches += !verdict_ok as u64;
        self.tree_mismatches += !tree_ok as u64;
        if (!verdict_ok || !tree_ok) && self.examples.len() < 10 {
            self.examples
                .push(crate::io::write_map(map).replace('\n', " "));
        }
    }
}

/// Every map on `leaves` leaves over symbols `1..=symbols` (before alphabet
/// normalization), compared against an explainer index.
pub fn verify_exhaustive(leaves: usize, symbols: usize) -> Result<VerifyReport, OracleError> {
    let names = leaf_names(leaves);
    let alphabet = Alphabet::numbered(symbols);
    let pairs = (leaves * leaves.saturating_sub(1)) as u32;
    let total = (symbols as u64 + 1).checked_pow(pairs).unwrap_or(u64::MAX);
    if total > MAX_EXHAUSTIVE_MAPS {
        return Err(OracleError::BudgetExceeded { leaves, symbols });
    }
    let index = ExplainerIndex::new(&names, alphabet.clone())?;
    let n = leaves;
    let cells: Vec<usize> = (0..n * n).filter(|p| p / n != p % n).collect();
    let mut codes: Vec<LabelCode> = vec![0; n * n];
    let mut report = VerifyReport::default();
    loop {
        let map = FitchMap::from_codes(names.clone(), alphabet.symbols(), &codes)?;
        report.record(&map, index.lookup_codes(&codes));
        // odometer over the off-diagonal cells
        let mut k = 0;
        while k < cells.len() {
            let c = &mut codes[cells[k]];
            if (*c as usize) < symbols {
                *c += 1;
                break;
            }
            *c = 0;
            k += 1;
        }
        if k == cells.len() {
            break;
        }
    }
    Ok(report)
}

/// `samples` seeded maps: a third tree-like, a third tree-like with one entry
/// rewritten, a third uniform. Each is compared against a full explainer search.
pub fn verify_samples(
    leaves: usize,
    symbols: usize,
    samples: usize,
    seed: u64,
) -> Result<VerifyReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = leaf_names(leaves);
    let mut report = VerifyReport::default();
    for i in 0..samples {
        let (_, base) = random_tree_like_instance(seed.wrapping_add(i as u64), leaves, symbols);
        let map = match i % 3 {
            0 => base,
            1 => mutate_map(&mut rng, &base, 1, symbols, true),
            _ => random_map(&mut rng, &names, symbols),
        };
        let explainers = all_explainers(&map)?;
        report.record(&map, &explainers);
    }
    Ok(report)
}
