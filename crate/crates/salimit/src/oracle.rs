//! Brute-force reference implementations used by the verification suites.
//!
//! The factor oracle enumerates genuine `ω`-suffix factors over an explicit
//! finite family of certified (tree, branch) pairs and answers language
//! queries by lookup. It builds the `ω_i` symbol strings directly from the
//! recursion layout (separator, code bits, run, terminal) without going
//! through the parser or the membership decision, so it is an independent
//! check of both.
//!
//! Family: every prefix-closed subset of the first six enumerated words,
//! united with the initial segments of every branch over digits `0..=5`,
//! completed by a default ill-founded tail of fresh large digits (which
//! leaves all small ranks untouched). A window of length ≤ 8 that contains
//! a 4 can pin code ranks only below 2 and bound branch digits only below 6
//! (the longest run a terminal window shows is six 2s, forcing `y₀ = 5`),
//! so this family exhausts the length-8 language.

use std::collections::HashSet;

use crate::words::{enum_word, word_rank_u64};

/// Largest branch digit the enumeration ranges over.
pub const ORACLE_DIGIT_BOUND: u64 = 5;
/// Code ranks the enumerated trees control.
pub const ORACLE_RANKS: usize = 6;
/// Deepest `ω_i` the oracle materializes.
pub const ORACLE_MAX_LEVEL: usize = 4;

pub struct FactorOracle {
    factors: HashSet<u64>,
    max_len: usize,
}

fn pack(w: &[u8]) -> u64 {
    debug_assert!(w.len() <= 12);
    let mut v = 0u64;
    for &s in w.iter().rev() {
        v = v * 5 + s as u64;
    }
    v | ((w.len() as u64) << 32)
}

impl FactorOracle {
    /// Collects every factor of length ≤ `max_len` (≤ 12) that contains a 4.
    pub fn build(max_len: usize) -> Self {
        assert!(max_len <= 12);

        // masks of prefix-closed subsets of {s_0, …, s_5}
        let s_words: Vec<Vec<u64>> =
            (0..ORACLE_RANKS as u64).map(|i| enum_word(i).symbols().to_vec()).collect();
        let parent_rank: Vec<Option<usize>> = s_words
            .iter()
            .map(|w| {
                if w.is_empty() {
                    None
                } else {
                    Some(word_rank_u64(&w[..w.len() - 1]).expect("small") as usize)
                }
            })
            .collect();
        let closed_masks: Vec<u32> = (0u32..1 << ORACLE_RANKS)
            .filter(|mask| {
                (0..ORACLE_RANKS).all(|r| {
                    mask >> r & 1 == 0
                        || parent_rank[r].map_or(true, |p| mask >> p & 1 == 1)
                })
            })
            .collect();

        // distinct (code bits x|4, branch y|4) pairs the family realizes
        let mut realized: HashSet<(u8, [u64; 4])> = HashSet::new();
        let b = ORACLE_DIGIT_BOUND + 1;
        for mask in &closed_masks {
            for code in 0..b.pow(4) {
                let mut y = [0u64; 4];
                let mut c = code;
                for d in &mut y {
                    *d = c % b;
                    c /= b;
                }
                let mut bits = 0u8;
                for r in 0..4 {
                    let mut set = mask >> r & 1 == 1;
                    // the branch forces its initial segments into the tree
                    for m in 0..=4usize {
                        if word_rank_u64(&y[..m]) == Some(r as u64) {
                            set = true;
                        }
                    }
                    if set {
                        bits |= 1 << r;
                    }
                }
                realized.insert((bits, y));
            }
        }

        // materialize ω_0 … ω_4 for each realization and collect 4-windows
        let mut factors = HashSet::new();
        for (bits, y) in realized {
            for top in 0..=ORACLE_MAX_LEVEL {
                let mut word: Vec<u8> = Vec::new();
                for k in (1..=top).rev() {
                    word.push(3);
                    for r in 0..k {
                        word.push(bits >> r & 1);
                    }
                    let run = k + y[k - 1] as usize;
                    word.resize(word.len() + run, 2);
                }
                word.push(3);
                word.push(4);
                let four = word.len() - 1;
                word.resize(word.len() + max_len - 1, 0);
                for len in 1..=max_len {
                    let lo = four.saturating_sub(len - 1);
                    for start in lo..=four {
                        factors.insert(pack(&word[start..start + len]));
                    }
                }
            }
        }
        FactorOracle { factors, max_len }
    }

    /// Membership by enumeration: 4-free words always occur (the full
    /// four-symbol shift is a subset); 4-carrying words must be collected
    /// factors.
    pub fn member(&self, w: &[u8]) -> bool {
        assert!(w.len() <= self.max_len);
        !w.contains(&4) || self.factors.contains(&pack(w))
    }
}
