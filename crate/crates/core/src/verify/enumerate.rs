//! Lattice points of the discrete simplex.

use crate::dist::CountVector;

/// Every non-negative integer vector of length `n` summing to `m`, in
/// lexicographic order, each exactly once. There are `C(m + n - 1, n - 1)`.
pub fn enumerate_compositions(n: usize, m: u64) -> Compositions {
    let next = if n == 0 {
        None
    } else {
        let mut first = vec![0; n];
        first[n - 1] = m;
        Some(first)
    };
    Compositions { next }
}

#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Vec<u64>>,
}

impl Iterator for Compositions {
    type Item = CountVector;

    fn next(&mut self) -> Option<CountVector> {
        let current = self.next.take()?;
        let n = current.len();
        // Move one unit from the rightmost nonzero part p to p - 1 and push
        // the rest of part p to the end.
        if let Some(p) = current.iter().rposition(|&x| x > 0).filter(|&p| p > 0) {
            let mut succ = current.clone();
            let rest = succ[p] - 1;
            succ[p] = 0;
            succ[p - 1] += 1;
            succ[n - 1] += rest;
            self.next = Some(succ);
        }
        Some(CountVector::new(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn small_cases() {
        let all: Vec<Vec<u64>> = enumerate_compositions(2, 2).map(|c| c.into_vec()).collect();
        assert_eq!(all, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(enumerate_compositions(3, 2).count(), 6);
        assert_eq!(enumerate_compositions(4, 10).count(), 286);
        assert_eq!(enumerate_compositions(1, 7).count(), 1);
        assert_eq!(enumerate_compositions(3, 0).count(), 1);
        assert_eq!(enumerate_compositions(0, 0).count(), 0);
    }

    #[test]
    fn counts_match_binomial_and_are_distinct() {
        for n in 1..=5usize {
            for m in 0..=12u64 {
                let items: Vec<CountVector> = enumerate_compositions(n, m).collect();
                assert_eq!(items.len() as u64, binomial(m + n as u64 - 1, n as u64 - 1));
                assert!(items.iter().all(|c| c.total() == m && c.len() == n));
                let unique: HashSet<_> = items.iter().collect();
                assert_eq!(unique.len(), items.len());
            }
        }
    }
}
