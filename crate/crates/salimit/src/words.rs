//! Finite words over ℕ, the canonical enumeration of ℕ^{<ℕ}, trees on ℕ,
//! branch witnesses, and characteristic codes.
//!
//! The enumeration `(s_i)` of ℕ^{<ℕ} orders words by weight
//! `w(s) = len(s) + Σ s_j`; within a weight class by length descending, then
//! lexicographically. Every weight class is finite (class `w ≥ 1` has exactly
//! `2^{w−1}` members occupying ranks `2^{w−1} .. 2^w − 1`), and the first
//! terms are `s_0 = ∅`, `s_1 = (0)`, `s_2 = (0,0)`, `s_3 = (1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Alphabet size of the shift side of the construction.
pub const SHIFT_ALPHABET: u64 = 5;

/// A finite sequence of natural numbers, optionally constrained to an
/// alphabet `{0, …, bound−1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FiniteWord {
    symbols: Vec<u64>,
    bound: Option<u64>,
}

impl FiniteWord {
    /// The empty word.
    pub fn empty() -> Self {
        FiniteWord::default()
    }

    /// A word over the unbounded alphabet ℕ.
    pub fn new(symbols: Vec<u64>) -> Self {
        FiniteWord { symbols, bound: None }
    }

    /// A word whose symbols must all be `< bound`.
    pub fn bounded(symbols: Vec<u64>, bound: u64) -> Result<Self> {
        if let Some(&symbol) = symbols.iter().find(|&&s| s >= bound) {
            return Err(Error::SymbolOutOfRange { symbol, bound });
        }
        Ok(FiniteWord { symbols, bound: Some(bound) })
    }

    /// A word over the five-symbol shift alphabet `{0,…,4}`.
    pub fn shift_word(symbols: Vec<u64>) -> Result<Self> {
        Self::bounded(symbols, SHIFT_ALPHABET)
    }

    /// Shift-alphabet word from compact `u8` symbols.
    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        Self::shift_word(symbols.iter().map(|&s| s as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u64] {
        &self.symbols
    }

    pub fn bound(&self) -> Option<u64> {
        self.bound
    }

    /// Shift-alphabet symbols as `u8`, or an error if any symbol is ≥ 5.
    pub fn as_shift_symbols(&self) -> Result<Vec<u8>> {
        self.symbols
            .iter()
            .map(|&s| {
                if s < SHIFT_ALPHABET {
                    Ok(s as u8)
                } else {
                    Err(Error::SymbolOutOfRange { symbol: s, bound: SHIFT_ALPHABET })
                }
            })
            .collect()
    }

    /// The initial segment `s|i` of length `i` (clamped to the word length).
    pub fn initial_segment(&self, i: usize) -> FiniteWord {
        FiniteWord {
            symbols: self.symbols[..i.min(self.symbols.len())].to_vec(),
            bound: self.bound,
        }
    }

    /// Is `self` an initial segment of `other`?
    pub fn is_initial_segment_of(&self, other: &FiniteWord) -> bool {
        self.len() <= other.len() && other.symbols[..self.len()] == self.symbols[..]
    }

    /// Concatenation `self ⌢ other`.
    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        let bound = match (self.bound, other.bound) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        FiniteWord { symbols, bound }
    }

    /// The constant word `a^n`.
    pub fn repeated(a: u64, n: usize) -> FiniteWord {
        FiniteWord::new(vec![a; n])
    }

    /// Weight `len(s) + Σ s_j`, exact.
    pub fn weight(&self) -> BigUint {
        let mut w = BigUint::from(self.symbols.len());
        for &s in &self.symbols {
            w += s;
        }
        w
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "()");
        }
        if self.symbols.iter().all(|&s| s < 10) {
            for &s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            write!(f, "(")?;
            for (k, &s) in self.symbols.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, ")")
        }
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    /// Parses either a digit string (`"3102"`) or a comma/bracket form
    /// (`"(1,12,3)"` or `"1,12,3"`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "()" {
            return Ok(FiniteWord::empty());
        }
        if s.chars().all(|c| c.is_ascii_digit()) {
            let symbols = s.bytes().map(|b| (b - b'0') as u64).collect();
            return Ok(FiniteWord::new(symbols));
        }
        let inner = s.trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let symbols = inner
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Precondition(format!("bad word symbol {p:?}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(FiniteWord::new(symbols))
    }
}

// Words serialize as digit strings when every symbol is a single digit,
// otherwise as integer arrays.
impl Serialize for FiniteWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.symbols.iter().all(|&s| s < 10) {
            serializer.serialize_str(&self.to_string().trim_matches(['(', ')']).to_string())
        } else {
            let mut seq = serializer.serialize_seq(Some(self.symbols.len()))?;
            for s in &self.symbols {
                seq.serialize_element(s)?;
            }
            seq.end()
        }
    }
}

impl<'de> Deserialize<'de> for FiniteWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Digits(String),
            Symbols(Vec<u64>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Digits(s) => s.parse().map_err(de::Error::custom),
            Repr::Symbols(v) => Ok(FiniteWord::new(v)),
        }
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    debug_assert!(acc <= u64::MAX as u128);
    acc as u64
}

fn binom_big(n: &BigUint, k: &BigUint) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let mut acc = BigUint::from(1u32);
    let mut j = BigUint::ZERO;
    let one = BigUint::from(1u32);
    while &j < k {
        acc = acc * (n - &j) / (&j + &one);
        j += &one;
    }
    acc
}

/// `i`-th word of the canonical enumeration of ℕ^{<ℕ}.
pub fn enum_word(i: u64) -> FiniteWord {
    if i == 0 {
        return FiniteWord::empty();
    }
    let class = 64 - i.leading_zeros() as u64; // weight class
    let mut offset = i - (1u64 << (class - 1));
    for len in (1..=class).rev() {
        let count = binom(class - 1, len - 1);
        if offset < count {
            return FiniteWord::new(unrank_composition(class - len, len, offset));
        }
        offset -= count;
    }
    unreachable!("weight class exhausted")
}

/// `offset`-th composition (lexicographic) of `total` into `parts` parts ≥ 0.
fn unrank_composition(mut total: u64, parts: u64, mut offset: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(parts as usize);
    for pos in 0..parts {
        let rem = parts - pos - 1;
        if rem == 0 {
            out.push(total);
            break;
        }
        let mut a = 0;
        loop {
            let count = binom(total - a + rem - 1, rem - 1);
            if offset < count {
                break;
            }
            offset -= count;
            a += 1;
        }
        out.push(a);
        total -= a;
    }
    out
}

/// Rank of `s` in the canonical enumeration; exact inverse of [`enum_word`].
pub fn word_rank(s: &FiniteWord) -> BigUint {
    if s.is_empty() {
        return BigUint::ZERO;
    }
    if let Some(r) = word_rank_u64(s.symbols()) {
        return BigUint::from(r);
    }
    let class = s.weight();
    let len = BigUint::from(s.len());
    let one = BigUint::from(1u32);
    // 2^{class-1}
    let mut rank = BigUint::from(1u32) << usize::try_from(&class - &one).expect("weight fits");
    let mut l = class.clone();
    while l > len {
        rank += binom_big(&(&class - &one), &(&l - &one));
        l -= &one;
    }
    // lexicographic rank among compositions of (class - len) into len parts
    let mut total = &class - &len;
    let parts = s.len() as u64;
    for (pos, &a) in s.symbols().iter().enumerate() {
        let rem = parts - pos as u64 - 1;
        if rem == 0 {
            break;
        }
        let rem_big = BigUint::from(rem);
        for b in 0..a {
            rank += binom_big(&(&total - b + &rem_big - &one), &(&rem_big - &one));
        }
        total -= a;
    }
    rank
}

/// Fast rank for words of small weight; `None` when the weight exceeds 63.
pub(crate) fn word_rank_u64(symbols: &[u64]) -> Option<u64> {
    if symbols.is_empty() {
        return Some(0);
    }
    let mut class = symbols.len() as u128;
    for &s in symbols {
        class += s as u128;
    }
    if class > 63 {
        return None;
    }
    let class = class as u64;
    let len = symbols.len() as u64;
    let mut rank = 1u64 << (class - 1);
    for l in (len + 1)..=class {
        rank += binom(class - 1, l - 1);
    }
    let mut total = class - len;
    for (pos, &a) in symbols.iter().enumerate() {
        let rem = len - pos as u64 - 1;
        if rem == 0 {
            break;
        }
        for b in 0..a {
            rank += binom(total - b + rem - 1, rem - 1);
        }
        total -= a;
    }
    Some(rank)
}

/// Is `set` closed under initial segments?
pub fn is_tree(set: &BTreeSet<FiniteWord>) -> bool {
    set.iter().all(|w| {
        (0..w.len()).all(|i| set.contains(&w.initial_segment(i)))
    })
}

/// Built-in parametric tree families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family", content = "params")]
pub enum Family {
    /// The full tree ℕ^{<ℕ}.
    Full,
    /// Strictly increasing finite words.
    Increasing,
    /// A spine `s^m` with one level of teeth `s^m ⌢ (j)` attached everywhere.
    Comb { spine: u64 },
}

impl Family {
    pub fn contains(&self, w: &FiniteWord) -> bool {
        match self {
            Family::Full => true,
            Family::Increasing => w.symbols().windows(2).all(|p| p[0] < p[1]),
            Family::Comb { spine } => {
                let n = w.len();
                w.symbols().iter().take(n.saturating_sub(1)).all(|&s| s == *spine)
            }
        }
    }

    /// The witness branch each family ships with.
    pub fn default_witness(&self) -> BranchWitness {
        match self {
            Family::Full => BranchWitness::zeros(),
            Family::Increasing => BranchWitness::primes(),
            Family::Comb { spine } => BranchWitness::constant(*spine),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Full => "full",
            Family::Increasing => "increasing",
            Family::Comb { .. } => "comb",
        }
    }
}

/// A tree on ℕ: an explicit finite set, a built-in family, or a membership
/// predicate with a declared certainty bound for code queries.
#[derive(Clone)]
pub enum TreeSpec {
    ExplicitFinite(BTreeSet<FiniteWord>),
    Family(Family),
    Predicate {
        pred: Arc<dyn Fn(&FiniteWord) -> bool + Send + Sync>,
        certainty_bound: u64,
    },
}

impl fmt::Debug for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeSpec::ExplicitFinite(set) => f.debug_tuple("ExplicitFinite").field(set).finish(),
            TreeSpec::Family(fam) => f.debug_tuple("Family").field(fam).finish(),
            TreeSpec::Predicate { certainty_bound, .. } => f
                .debug_struct("Predicate")
                .field("certainty_bound", certainty_bound)
                .finish(),
        }
    }
}

impl TreeSpec {
    pub fn full() -> Self {
        TreeSpec::Family(Family::Full)
    }

    pub fn increasing() -> Self {
        TreeSpec::Family(Family::Increasing)
    }

    pub fn comb(spine: u64) -> Self {
        TreeSpec::Family(Family::Comb { spine })
    }

    /// Explicit finite tree; fails if the set is not prefix-closed.
    pub fn explicit(set: BTreeSet<FiniteWord>) -> Result<Self> {
        if !is_tree(&set) {
            return Err(Error::Precondition(
                "explicit tree is not closed under initial segments".into(),
            ));
        }
        Ok(TreeSpec::ExplicitFinite(set))
    }

    pub fn contains(&self, w: &FiniteWord) -> bool {
        match self {
            TreeSpec::ExplicitFinite(set) => set.contains(w),
            TreeSpec::Family(fam) => fam.contains(w),
            TreeSpec::Predicate { pred, .. } => pred(w),
        }
    }
}

impl Serialize for TreeSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TreeSpec::ExplicitFinite(set) => {
                let words: Vec<Vec<u64>> = set.iter().map(|w| w.symbols().to_vec()).collect();
                words.serialize(serializer)
            }
            TreeSpec::Family(fam) => fam.serialize(serializer),
            TreeSpec::Predicate { .. } => Err(serde::ser::Error::custom(
                "predicate trees have no serialized form",
            )),
        }
    }
}

impl<'de> Deserialize<'de> for TreeSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Explicit(Vec<Vec<u64>>),
            Family(Family),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Explicit(words) => {
                let set = words.into_iter().map(FiniteWord::new).collect();
                TreeSpec::explicit(set).map_err(de::Error::custom)
            }
            Repr::Family(fam) => Ok(TreeSpec::Family(fam)),
        }
    }
}

/// A candidate infinite branch: a digit source plus the largest depth whose
/// initial segments have been verified to lie in the associated tree.
///
/// Depth bookkeeping is a monotone atomic maximum, so concurrent checks are
/// idempotent.
#[derive(Clone)]
pub struct BranchWitness {
    source: BranchSource,
    checked: Arc<AtomicU64>,
}

#[derive(Clone)]
enum BranchSource {
    Primes,
    Zeros,
    Constant(u64),
    List(Vec<u64>),
}

impl fmt::Debug for BranchWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let desc = match &self.source {
            BranchSource::Primes => "primes".to_string(),
            BranchSource::Zeros => "zeros".to_string(),
            BranchSource::Constant(c) => format!("constant({c})"),
            BranchSource::List(v) => format!("list({v:?})"),
        };
        write!(f, "BranchWitness({desc}, checked={})", self.checked_depth())
    }
}

impl BranchWitness {
    /// The branch (2, 3, 5, 7, 11, …) of consecutive primes.
    pub fn primes() -> Self {
        BranchWitness { source: BranchSource::Primes, checked: Arc::default() }
    }

    /// The all-zero branch (0, 0, 0, …).
    pub fn zeros() -> Self {
        BranchWitness { source: BranchSource::Zeros, checked: Arc::default() }
    }

    /// The constant branch (c, c, c, …).
    pub fn constant(c: u64) -> Self {
        BranchWitness { source: BranchSource::Constant(c), checked: Arc::default() }
    }

    /// A finite digit list; queries past the end yield `None`.
    pub fn list(digits: Vec<u64>) -> Self {
        BranchWitness { source: BranchSource::List(digits), checked: Arc::default() }
    }

    /// Digit `y_m`, if available.
    pub fn digit(&self, m: u64) -> Option<u64> {
        match &self.source {
            BranchSource::Primes => Some(nth_prime(m + 1)),
            BranchSource::Zeros => Some(0),
            BranchSource::Constant(c) => Some(*c),
            BranchSource::List(v) => v.get(m as usize).copied(),
        }
    }

    /// The initial segment `y|m` as a word, if all digits are available.
    pub fn initial_segment(&self, m: u64) -> Option<FiniteWord> {
        let mut symbols = Vec::with_capacity(m as usize);
        for k in 0..m {
            symbols.push(self.digit(k)?);
        }
        Some(FiniteWord::new(symbols))
    }

    pub fn checked_depth(&self) -> u64 {
        self.checked.load(Ordering::Relaxed)
    }

    fn record_checked(&self, depth: u64) {
        self.checked.fetch_max(depth, Ordering::Relaxed);
    }
}

/// `k`-th prime, 1-indexed (`nth_prime(1) = 2`).
fn nth_prime(k: u64) -> u64 {
    let mut count = 0;
    let mut n = 1u64;
    while count < k {
        n += 1;
        if (2..=n.isqrt()).all(|d| n % d != 0) {
            count += 1;
        }
    }
    n
}

/// Checks `y|k ∈ T` for all `k ≤ m`; a `false` return signals a defective
/// witness (including digit sources that run out before depth `m`).
pub fn check_branch(tree: &TreeSpec, y: &BranchWitness, m: u64) -> bool {
    for k in 0..=m {
        let Some(segment) = y.initial_segment(k) else {
            return false;
        };
        if !tree.contains(&segment) {
            return false;
        }
    }
    y.record_checked(m);
    true
}

/// Bit `i` of the characteristic code: 1 exactly when `s_i ∈ T`.
pub fn tree_code_bit(tree: &TreeSpec, i: u64) -> Result<u8> {
    if let TreeSpec::Predicate { certainty_bound, .. } = tree {
        if i >= *certainty_bound {
            return Err(Error::IndexBeyondCertainty { index: i, bound: *certainty_bound });
        }
    }
    Ok(tree.contains(&enum_word(i)) as u8)
}

/// A prefix `x|n` of the characteristic code `x = h(T)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCodePrefix {
    bits: Vec<u8>,
}

impl TreeCodePrefix {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// The code prefix `h(T)|n`.
pub fn tree_code_prefix(tree: &TreeSpec, n: u64) -> Result<TreeCodePrefix> {
    let bits = (0..n).map(|i| tree_code_bit(tree, i)).collect::<Result<Vec<u8>>>()?;
    Ok(TreeCodePrefix { bits })
}

/// The certified (tree, branch) pairs that ship with the crate.
pub fn builtin_pairs() -> Vec<(&'static str, TreeSpec, BranchWitness)> {
    vec![
        ("increasing", TreeSpec::increasing(), BranchWitness::primes()),
        ("full", TreeSpec::full(), BranchWitness::zeros()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_pins_first_terms() {
        assert_eq!(enum_word(0), FiniteWord::empty());
        assert_eq!(enum_word(1), FiniteWord::new(vec![0]));
        assert_eq!(enum_word(2), FiniteWord::new(vec![0, 0]));
        assert_eq!(enum_word(3), FiniteWord::new(vec![1]));
        assert_eq!(enum_word(4), FiniteWord::new(vec![0, 0, 0]));
        assert_eq!(enum_word(5), FiniteWord::new(vec![0, 1]));
        assert_eq!(enum_word(6), FiniteWord::new(vec![1, 0]));
        assert_eq!(enum_word(7), FiniteWord::new(vec![2]));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(word_rank(&FiniteWord::empty()), BigUint::ZERO);
        assert_eq!(word_rank(&FiniteWord::new(vec![0, 0])), BigUint::from(2u32));
        assert_eq!(word_rank(&FiniteWord::new(vec![1])), BigUint::from(3u32));
    }

    #[test]
    fn enumeration_and_rank_are_mutually_inverse() {
        for i in 0..10_000u64 {
            let w = enum_word(i);
            assert_eq!(word_rank(&w), BigUint::from(i), "rank(enum({i}))");
            assert_eq!(word_rank_u64(w.symbols()), Some(i));
        }
    }

    #[test]
    fn enumeration_is_prefix_total() {
        // every initial segment of an enumerated word has a rank
        for i in 0..2_000u64 {
            let w = enum_word(i);
            for k in 0..w.len() {
                let p = w.initial_segment(k);
                let r = word_rank(&p);
                let r64: u64 = r.try_into().expect("small");
                assert_eq!(enum_word(r64), p);
            }
        }
    }

    #[test]
    fn rank_of_large_word_uses_big_path() {
        let w = FiniteWord::new(vec![1000, 2000, 3000]);
        let r = word_rank(&w);
        assert!(r > BigUint::from(u64::MAX));
    }

    #[test]
    fn is_tree_examples() {
        let empty = BTreeSet::new();
        assert!(is_tree(&empty));

        let mut t = BTreeSet::new();
        t.insert(FiniteWord::empty());
        t.insert(FiniteWord::new(vec![0]));
        assert!(is_tree(&t));

        let mut not_tree = BTreeSet::new();
        not_tree.insert(FiniteWord::new(vec![0]));
        assert!(!is_tree(&not_tree));
    }

    #[test]
    fn code_bits_of_increasing_tree() {
        let t = TreeSpec::increasing();
        assert_eq!(tree_code_bit(&t, 0).unwrap(), 1);
        assert_eq!(tree_code_bit(&t, 1).unwrap(), 1);
        assert_eq!(tree_code_bit(&t, 2).unwrap(), 0);
        assert_eq!(tree_code_bit(&t, 3).unwrap(), 1);
        let empty = TreeSpec::explicit(BTreeSet::new()).unwrap();
        assert_eq!(tree_code_bit(&empty, 0).unwrap(), 0);
    }

    #[test]
    fn predicate_certainty_bound_is_enforced() {
        let t = TreeSpec::Predicate {
            pred: Arc::new(|_| true),
            certainty_bound: 4,
        };
        assert_eq!(tree_code_bit(&t, 3).unwrap(), 1);
        assert!(matches!(
            tree_code_bit(&t, 4),
            Err(Error::IndexBeyondCertainty { index: 4, bound: 4 })
        ));
    }

    #[test]
    fn branch_checks() {
        let t = TreeSpec::increasing();
        let y = BranchWitness::primes();
        assert!(check_branch(&t, &y, 4));
        assert_eq!(y.checked_depth(), 4);

        // m = 0 only asks for the empty word
        let any = TreeSpec::full();
        assert!(check_branch(&any, &BranchWitness::zeros(), 0));

        // a finite explicit tree of height 2 has no depth-3 branch segment
        let mut set = BTreeSet::new();
        set.insert(FiniteWord::empty());
        set.insert(FiniteWord::new(vec![0]));
        set.insert(FiniteWord::new(vec![0, 0]));
        let small = TreeSpec::explicit(set).unwrap();
        assert!(!check_branch(&small, &BranchWitness::zeros(), 3));
    }

    #[test]
    fn adding_a_word_never_clears_a_code_bit() {
        // monotonicity of the code on explicit trees
        let mut set = BTreeSet::new();
        set.insert(FiniteWord::empty());
        set.insert(FiniteWord::new(vec![1]));
        let before = TreeSpec::explicit(set.clone()).unwrap();
        set.insert(FiniteWord::new(vec![0]));
        let after = TreeSpec::explicit(set).unwrap();
        for i in 0..64 {
            let b = tree_code_bit(&before, i).unwrap();
            let a = tree_code_bit(&after, i).unwrap();
            assert!(a >= b, "bit {i} flipped 1 -> 0");
        }
    }

    #[test]
    fn primes_start_as_expected() {
        let y = BranchWitness::primes();
        let first: Vec<u64> = (0..6).map(|m| y.digit(m).unwrap()).collect();
        assert_eq!(first, vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn comb_family_is_prefix_closed() {
        let fam = Family::Comb { spine: 3 };
        assert!(fam.contains(&FiniteWord::empty()));
        assert!(fam.contains(&FiniteWord::new(vec![3, 3, 7])));
        assert!(!fam.contains(&FiniteWord::new(vec![3, 7, 3])));
        // prefixes of members are members
        let w = FiniteWord::new(vec![3, 3, 5]);
        for k in 0..w.len() {
            assert!(fam.contains(&w.initial_segment(k)));
        }
    }

    #[test]
    fn word_serde_roundtrip() {
        let w = FiniteWord::new(vec![3, 1, 0, 2]);
        let js = serde_json::to_string(&w).unwrap();
        assert_eq!(js, "\"3102\"");
        let back: FiniteWord = serde_json::from_str(&js).unwrap();
        assert_eq!(back.symbols(), w.symbols());

        let big = FiniteWord::new(vec![1, 12]);
        let js = serde_json::to_string(&big).unwrap();
        assert_eq!(js, "[1,12]");
        let back: FiniteWord = serde_json::from_str(&js).unwrap();
        assert_eq!(back.symbols(), big.symbols());
    }

    #[test]
    fn tree_serde_roundtrip() {
        let fam = TreeSpec::Family(Family::Comb { spine: 2 });
        let js = serde_json::to_string(&fam).unwrap();
        let back: TreeSpec = serde_json::from_str(&js).unwrap();
        assert!(matches!(back, TreeSpec::Family(Family::Comb { spine: 2 })));

        let mut set = BTreeSet::new();
        set.insert(FiniteWord::empty());
        set.insert(FiniteWord::new(vec![0]));
        let t = TreeSpec::explicit(set).unwrap();
        let js = serde_json::to_string(&t).unwrap();
        let back: TreeSpec = serde_json::from_str(&js).unwrap();
        assert!(matches!(back, TreeSpec::ExplicitFinite(s) if s.len() == 2));
    }
}
