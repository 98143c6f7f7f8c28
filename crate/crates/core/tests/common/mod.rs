#![allow(dead_code)]

use qagsim::{
    assemble, injective_extension, permutation_operator, truth_table_from_marked, Algorithm,
    BitString, GateAssembly, MarkedSet,
};

pub fn marked_set(n: usize, indices: &[usize]) -> MarkedSet {
    MarkedSet::new(n, indices.iter().map(|&i| BitString::from_index(i, n))).unwrap()
}

pub fn assembly(algorithm: Algorithm, marked: &MarkedSet) -> GateAssembly {
    let table = truth_table_from_marked(marked).unwrap();
    let oracle = permutation_operator(&injective_extension(&table)).unwrap();
    assemble(algorithm, marked.n(), oracle).unwrap()
}

/// `count` distinct indices below `2^n`, spread over the register.
pub fn spread(n: usize, count: usize) -> Vec<usize> {
    let dim = 1usize << n;
    let mut picks: Vec<usize> = (0..count).map(|i| (i * 0x9e37 + 5) % dim).collect();
    picks.sort_unstable();
    picks.dedup();
    let mut next = 0;
    while picks.len() < count {
        if !picks.contains(&next) {
            picks.push(next);
        }
        next += 1;
    }
    picks
}
