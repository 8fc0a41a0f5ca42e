//! The subshift `X ⊂ {0,1,2,3,4}^ℕ`: the `ω_n` builder, a structural parser
//! for its block grammar, a constraint-solving membership decision for finite
//! words and finitely representable points, and predecessor/successor symbol
//! computation.
//!
//! Points of `X` either avoid the symbol 4 entirely (the full four-symbol
//! shift is contained in `X`) or are suffixes of some `ω_n(T, y)`, where `T`
//! is an ill-founded tree with infinite branch `y`. Such suffixes decompose
//! into *levels*: a level-`m` block is a separator `3`, the code prefix
//! `x|m` (`m` bits), and a run `2^{m + y_{m−1}}`; levels descend by exactly
//! one until the terminal marker `3 4 0^∞`.
//!
//! Membership of a word is decided by parsing this grammar and asking whether
//! the induced constraints (bits forced in or out of the code, pinned branch
//! digits) extend to an ill-founded tree with a matching branch. The
//! extension rule: the prefix closure of the forced-in words must avoid the
//! forced-out ranks, no pinned branch segment may be forced out, and
//! everything beyond is completed with fresh large digits, which is always
//! possible because only finitely many ranks are forced out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{
    check_branch, enum_word, tree_code_prefix, word_rank_u64, BranchWitness, FiniteWord, TreeSpec,
};

/// A finitely representable point of `5^ℕ`: a finite prefix followed by a
/// constant tail. The representation is canonical: the prefix never ends with
/// the tail symbol, so structural equality is equality of points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicPoint {
    prefix: Vec<u8>,
    tail: u8,
}

impl SymbolicPoint {
    pub fn new(mut prefix: Vec<u8>, tail: u8) -> Result<Self> {
        if tail >= 5 {
            return Err(Error::SymbolOutOfRange { symbol: tail as u64, bound: 5 });
        }
        if let Some(&bad) = prefix.iter().find(|&&s| s >= 5) {
            return Err(Error::SymbolOutOfRange { symbol: bad as u64, bound: 5 });
        }
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        Ok(SymbolicPoint { prefix, tail })
    }

    pub fn from_word(word: &FiniteWord, tail: u8) -> Result<Self> {
        Ok(Self::new(word.as_shift_symbols()?, tail)?)
    }

    /// The constant point `a^∞`.
    pub fn constant(a: u8) -> Result<Self> {
        Self::new(Vec::new(), a)
    }

    /// The distinguished point `ω₀ = 3⌢4⌢0^∞`.
    pub fn omega0() -> Self {
        SymbolicPoint { prefix: vec![3, 4], tail: 0 }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn tail(&self) -> u8 {
        self.tail
    }

    /// Symbol at position `k`.
    pub fn symbol_at(&self, k: usize) -> u8 {
        self.prefix.get(k).copied().unwrap_or(self.tail)
    }

    /// The first `k` symbols.
    pub fn initial_symbols(&self, k: usize) -> Vec<u8> {
        (0..k).map(|i| self.symbol_at(i)).collect()
    }

    /// `a ⌢ self`. Panics if `a ≥ 5`.
    pub fn prepend(&self, a: u8) -> SymbolicPoint {
        assert!(a < 5, "symbol out of range");
        if self.prefix.is_empty() && a == self.tail {
            return self.clone();
        }
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(a);
        prefix.extend_from_slice(&self.prefix);
        SymbolicPoint { prefix, tail: self.tail }
    }

    /// The shifted point `σ(self)` (drops the first symbol).
    pub fn shift(&self) -> SymbolicPoint {
        if self.prefix.is_empty() {
            return self.clone();
        }
        SymbolicPoint { prefix: self.prefix[1..].to_vec(), tail: self.tail }
    }

    pub fn contains_four(&self) -> bool {
        self.tail == 4 || self.prefix.contains(&4)
    }
}

impl fmt::Display for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.prefix {
            write!(f, "{s}")?;
        }
        write!(f, "{}^inf", self.tail)
    }
}

impl FromStr for SymbolicPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_suffix("^inf")
            .ok_or_else(|| Error::Precondition(format!("point {s:?} must end with ^inf")))?;
        if body.is_empty() {
            return Err(Error::Precondition("point needs at least a tail digit".into()));
        }
        let mut symbols = Vec::with_capacity(body.len());
        for c in body.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| Error::Precondition(format!("bad point digit {c:?}")))?;
            symbols.push(d as u8);
        }
        let tail = symbols.pop().unwrap();
        SymbolicPoint::new(symbols, tail)
    }
}

impl Serialize for SymbolicPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SymbolicPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Metric on finitely representable points of `5^ℕ`: `2^{−m}` with `m` the
/// first index of disagreement, `0` for equal points. An ultrametric.
pub fn word_metric(p: &SymbolicPoint, q: &SymbolicPoint) -> BigRational {
    if p == q {
        return BigRational::from_integer(0.into());
    }
    let horizon = p.prefix.len().max(q.prefix.len());
    let mut m = horizon;
    for k in 0..horizon {
        if p.symbol_at(k) != q.symbol_at(k) {
            m = k;
            break;
        }
    }
    BigRational::new(1.into(), BigInt::one() << m)
}

/// `ω_n(T, y)` per the defining recursion: `ω₀ = 3⌢4⌢0^∞` and
/// `ω_n = 3 ⌢ (x|n) ⌢ 2^{n + y_{n−1}} ⌢ ω_{n−1}` with `x = h(T)`.
pub fn omega(n: u64, tree: &TreeSpec, y: &BranchWitness) -> Result<SymbolicPoint> {
    if n > 0 && !check_branch(tree, y, n) {
        return Err(Error::BranchCheckFailed { depth: n });
    }
    let code = tree_code_prefix(tree, n)?;
    let mut symbols = Vec::new();
    for k in (1..=n).rev() {
        let digit = y.digit(k - 1).ok_or(Error::BranchCheckFailed { depth: k })?;
        symbols.push(3);
        symbols.extend_from_slice(&code.bits()[..k as usize]);
        let run = k as usize + digit as usize;
        symbols.resize(symbols.len() + run, 2);
    }
    symbols.push(3);
    symbols.push(4);
    SymbolicPoint::new(symbols, 0)
}

/// The exponent `t_n = 2n + 1 + y_{n−1}` with `σ^{t_n}(ω_n) = ω_{n−1}`.
pub fn shift_exponent(n: u64, y: &BranchWitness) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("shift exponent needs n ≥ 1".into()));
    }
    let digit = y
        .digit(n - 1)
        .ok_or_else(|| Error::Precondition(format!("branch digit y_{} unavailable", n - 1)))?;
    Ok(2 * n + 1 + digit)
}

/// The shift map on points.
pub fn shift_point(p: &SymbolicPoint) -> SymbolicPoint {
    p.shift()
}

// ---------------------------------------------------------------------------
// Structural parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// A level separator `3` (level 0 marks the terminal's separator).
    Separator,
    /// A (possibly cut) code block; `start_rank` is the rank of its first bit
    /// when the alignment is known.
    Bits { bits: Vec<u8>, start_rank: Option<usize> },
    /// A run of 2s; `complete` when bounded by non-2 symbols on both sides.
    Run { observed: usize, complete: bool },
    /// The terminal symbol 4.
    Four,
    /// Trailing zeros after the terminal.
    Zeros,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    /// Half-open span `[start, end)` in the input.
    pub span: (usize, usize),
    pub level: Option<usize>,
}

/// Code and branch constraints induced by a parse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// Ranks whose code bit is forced to 1 (words forced into the tree).
    pub in_ranks: BTreeSet<u64>,
    /// Ranks whose code bit is forced to 0 (words forced out of the tree).
    pub out_ranks: BTreeSet<u64>,
    /// Branch digits pinned exactly, by index.
    pub branch_pinned: BTreeMap<usize, u64>,
    /// Lower bounds on branch digits from runs cut by the word boundary.
    pub branch_mins: BTreeMap<usize, u64>,
}

impl ConstraintSet {
    fn record_bit(&mut self, rank: usize, value: u8) {
        if value == 1 {
            self.in_ranks.insert(rank as u64);
        } else {
            self.out_ranks.insert(rank as u64);
        }
    }

    /// Do the constraints extend to an ill-founded tree with matching branch?
    ///
    /// Checks: (a) the prefix closure of the forced-in words avoids the
    /// forced-out ranks (this also catches directly conflicting bit
    /// observations), and (b) no pinned branch segment — including the empty
    /// word, which every branch passes through — is forced out. Free digits
    /// are completed with fresh large values, whose segments have ranks above
    /// every forced-out rank, so no further condition is needed.
    pub fn is_consistent(&self) -> bool {
        if self.out_ranks.contains(&0) {
            return false;
        }
        for &r in &self.in_ranks {
            let w = enum_word(r);
            for i in 0..=w.len() {
                if let Some(pr) = word_rank_u64(&w.symbols()[..i]) {
                    if self.out_ranks.contains(&pr) {
                        return false;
                    }
                }
            }
        }
        // contiguous pinned segment y|m starting at digit 0
        let mut digits: Vec<u64> = Vec::new();
        while let Some(&d) = self.branch_pinned.get(&digits.len()) {
            digits.push(d);
            if let Some(r) = word_rank_u64(&digits) {
                if self.out_ranks.contains(&r) {
                    return false;
                }
            }
        }
        true
    }
}

/// One structural reading of a word against the block grammar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureParse {
    pub blocks: Vec<Block>,
    pub constraints: ConstraintSet,
    /// Level of the leftmost observed block when the alignment is pinned
    /// (a terminal is present, or a complete interior block fixes it).
    pub top_level: Option<usize>,
    /// Whether the terminal `3 4 0*` (or a leading 4) is present.
    pub terminal: bool,
    /// Whether [`ConstraintSet::is_consistent`] holds.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseOutcome {
    NoParse,
    Parses(Vec<StructureParse>),
}

impl ParseOutcome {
    pub fn is_parse(&self) -> bool {
        matches!(self, ParseOutcome::Parses(_))
    }

    /// Is some reading structurally valid *and* constraint-consistent?
    pub fn any_consistent(&self) -> bool {
        match self {
            ParseOutcome::NoParse => false,
            ParseOutcome::Parses(v) => v.iter().any(|p| p.consistent),
        }
    }
}

/// Sink for the right-to-left terminal scan, so the allocation-free
/// membership path and the full recording path share one grammar.
trait ScanSink {
    fn separator(&mut self, _pos: usize, _level: usize) {}
    fn four(&mut self, _pos: usize) {}
    fn zeros(&mut self, _span: (usize, usize)) {}
    fn bits(&mut self, _span: (usize, usize), _level: usize, _start_rank: usize, _bits: &[u8]) {}
    fn run(&mut self, _span: (usize, usize), _level: usize, _complete: bool, _observed: usize) {}
    fn bit_constraint(&mut self, rank: usize, value: u8);
    fn pin_digit(&mut self, index: usize, value: u64);
    fn min_digit(&mut self, index: usize, min: u64);
    fn top_level(&mut self, _level: usize) {}
}

/// Scans a word containing at least one 4 against the terminal-anchored
/// grammar. Returns `false` on structural failure. Constraint callbacks fire
/// with absolute ranks/indices; the parse is unique when it exists.
fn scan_terminal<S: ScanSink>(w: &[u8], sink: &mut S) -> bool {
    let n = w.len();
    let mut fours = w.iter().enumerate().filter(|(_, &s)| s == 4);
    let q = match (fours.next(), fours.next()) {
        (Some((q, _)), None) => q,
        _ => return false, // zero handled by caller; two 4s never parse
    };
    if w[q + 1..].iter().any(|&s| s != 0) {
        return false;
    }
    if q + 1 < n {
        sink.zeros((q + 1, n));
    }
    sink.four(q);
    if q == 0 {
        sink.top_level(0);
        return true;
    }
    if w[q - 1] != 3 {
        return false;
    }
    sink.separator(q - 1, 0);
    if q == 1 {
        sink.top_level(0);
        return true;
    }

    let mut i = (q - 2) as isize;
    let mut level = 1usize;
    loop {
        // run of the current level
        let run_end = i;
        let mut r = 0usize;
        while i >= 0 && w[i as usize] == 2 {
            r += 1;
            i -= 1;
        }
        if i < 0 {
            sink.run((0, (run_end + 1) as usize), level, false, r);
            sink.min_digit(level - 1, r.saturating_sub(level) as u64);
            sink.top_level(level);
            return true;
        }
        if r < level {
            return false;
        }
        sink.run(((i + 1) as usize, (run_end + 1) as usize), level, true, r);
        sink.pin_digit(level - 1, (r - level) as u64);

        // code bits of the current level, collected right-to-left
        let bits_end = i;
        let mut j = 0usize;
        let mut partial = false;
        while j < level {
            if i < 0 {
                partial = true;
                break;
            }
            let b = w[i as usize];
            if b > 1 {
                return false;
            }
            sink.bit_constraint(level - 1 - j, b);
            i -= 1;
            j += 1;
        }
        let lo = (i + 1) as usize;
        sink.bits((lo, bits_end as usize + 1), level, level - j, &w[lo..=bits_end as usize]);
        if partial {
            sink.top_level(level);
            return true;
        }

        // separator of the current level
        if i < 0 {
            sink.top_level(level);
            return true;
        }
        if w[i as usize] != 3 {
            return false;
        }
        sink.separator(i as usize, level);
        i -= 1;
        if i < 0 {
            sink.top_level(level);
            return true;
        }
        level += 1;
    }
}

/// Bitmask of the ranks of all initial segments of `s_r` (including `r`
/// itself), for ranks below 128. Initial segments have strictly smaller
/// weight, hence strictly smaller rank, so the closure stays below 128.
fn prefix_closure_mask(r: usize) -> u128 {
    static MASKS: OnceLock<Vec<u128>> = OnceLock::new();
    let masks = MASKS.get_or_init(|| {
        (0..128u64)
            .map(|r| {
                let w = enum_word(r);
                let mut m = 0u128;
                for i in 0..=w.len() {
                    let pr = word_rank_u64(&w.symbols()[..i]).expect("small word");
                    m |= 1u128 << pr;
                }
                m
            })
            .collect()
    });
    masks[r]
}

/// Allocation-light membership sink: bit constraints as u128 masks (bit
/// ranks are bounded by the top level, which is at most √len), pinned digits
/// in a short buffer.
struct FastSink {
    in_mask: u128,
    out_mask: u128,
    overflow: bool,
    digits: Vec<u64>,
}

impl FastSink {
    fn new() -> Self {
        FastSink { in_mask: 0, out_mask: 0, overflow: false, digits: Vec::new() }
    }

    fn consistent(&self) -> bool {
        if self.out_mask & 1 != 0 {
            return false;
        }
        let mut in_bits = self.in_mask;
        let mut closure = 0u128;
        while in_bits != 0 {
            let r = in_bits.trailing_zeros() as usize;
            closure |= prefix_closure_mask(r);
            in_bits &= in_bits - 1;
        }
        if closure & self.out_mask != 0 {
            return false;
        }
        for m in 1..=self.digits.len() {
            if let Some(r) = word_rank_u64(&self.digits[..m]) {
                if r < 128 && self.out_mask >> r & 1 != 0 {
                    return false;
                }
            }
        }
        true
    }
}

impl ScanSink for FastSink {
    fn bit_constraint(&mut self, rank: usize, value: u8) {
        if rank >= 128 {
            self.overflow = true;
            return;
        }
        if value == 1 {
            self.in_mask |= 1 << rank;
        } else {
            self.out_mask |= 1 << rank;
        }
    }

    fn pin_digit(&mut self, index: usize, value: u64) {
        if self.digits.len() <= index {
            self.digits.resize(index + 1, 0);
        }
        self.digits[index] = value;
    }

    fn min_digit(&mut self, _index: usize, _min: u64) {}
}

struct RecordSink {
    blocks: Vec<Block>,
    constraints: ConstraintSet,
    top_level: Option<usize>,
}

impl RecordSink {
    fn new() -> Self {
        RecordSink { blocks: Vec::new(), constraints: ConstraintSet::default(), top_level: None }
    }
}

impl ScanSink for RecordSink {
    fn separator(&mut self, pos: usize, level: usize) {
        self.blocks.push(Block {
            kind: BlockKind::Separator,
            span: (pos, pos + 1),
            level: Some(level),
        });
    }

    fn four(&mut self, pos: usize) {
        self.blocks.push(Block { kind: BlockKind::Four, span: (pos, pos + 1), level: Some(0) });
    }

    fn zeros(&mut self, span: (usize, usize)) {
        self.blocks.push(Block { kind: BlockKind::Zeros, span, level: Some(0) });
    }

    fn bits(&mut self, span: (usize, usize), level: usize, start_rank: usize, bits: &[u8]) {
        self.blocks.push(Block {
            kind: BlockKind::Bits { bits: bits.to_vec(), start_rank: Some(start_rank) },
            span,
            level: Some(level),
        });
    }

    fn run(&mut self, span: (usize, usize), level: usize, complete: bool, observed: usize) {
        self.blocks.push(Block {
            kind: BlockKind::Run { observed, complete },
            span,
            level: Some(level),
        });
    }

    fn bit_constraint(&mut self, rank: usize, value: u8) {
        self.constraints.record_bit(rank, value);
    }

    fn pin_digit(&mut self, index: usize, value: u64) {
        self.constraints.branch_pinned.insert(index, value);
    }

    fn min_digit(&mut self, index: usize, min: u64) {
        self.constraints.branch_mins.insert(index, min);
    }

    fn top_level(&mut self, level: usize) {
        self.top_level = Some(level);
    }
}

/// Fast membership for raw symbol slices (alphabet `{0,…,4}` assumed).
pub(crate) fn member_word(w: &[u8]) -> bool {
    if !w.contains(&4) {
        return true;
    }
    let mut sink = FastSink::new();
    if !scan_terminal(w, &mut sink) {
        return false;
    }
    debug_assert!(!sink.overflow, "code rank beyond mask width");
    sink.consistent()
}

fn parse_terminal_record(w: &[u8]) -> Option<StructureParse> {
    let mut sink = RecordSink::new();
    if !scan_terminal(w, &mut sink) {
        return None;
    }
    sink.blocks.reverse();
    let consistent = sink.constraints.is_consistent();
    Some(StructureParse {
        blocks: sink.blocks,
        constraints: sink.constraints,
        top_level: sink.top_level,
        terminal: true,
        consistent,
    })
}

/// A maximal `bits* 2*` segment between separators.
struct Segment {
    start: usize,
    bits: Vec<u8>,
    run: usize,
}

fn split_segment(w: &[u8], start: usize, end: usize) -> Option<Segment> {
    let mut bits = Vec::new();
    let mut run = 0usize;
    for (k, &s) in w[start..end].iter().enumerate() {
        match s {
            0 | 1 if run == 0 => bits.push(s),
            0 | 1 => return None, // a bit after the run began
            2 => run += 1,
            _ => unreachable!("separators removed, k={k}"),
        }
    }
    Some(Segment { start, bits, run })
}

/// Parses 4-free words: all feasible level assignments against the interior
/// of the block grammar. Readings whose alignment stays undetermined are
/// returned once with `top_level: None` and only the alignment-free
/// constraints (prefix-cut code blocks sit at absolute ranks `0..t`).
fn parse_nonterminal(w: &[u8]) -> Option<Vec<StructureParse>> {
    let seps: Vec<usize> = (0..w.len()).filter(|&k| w[k] == 3).collect();

    if seps.is_empty() {
        let seg = split_segment(w, 0, w.len())?;
        let mut blocks = Vec::new();
        if !seg.bits.is_empty() {
            blocks.push(Block {
                kind: BlockKind::Bits { bits: seg.bits.clone(), start_rank: None },
                span: (0, seg.bits.len()),
                level: None,
            });
        }
        if seg.run > 0 {
            blocks.push(Block {
                kind: BlockKind::Run { observed: seg.run, complete: false },
                span: (seg.bits.len(), w.len()),
                level: None,
            });
        }
        return Some(vec![StructureParse {
            blocks,
            constraints: ConstraintSet::default(),
            top_level: None,
            terminal: false,
            consistent: true,
        }]);
    }

    let lead = split_segment(w, 0, seps[0])?;
    let trail_start = seps[seps.len() - 1] + 1;
    let trail = split_segment(w, trail_start, w.len())?;
    let mut interiors = Vec::new();
    for pair in seps.windows(2) {
        let seg = split_segment(w, pair[0] + 1, pair[1])?;
        if seg.bits.is_empty() || seg.run < seg.bits.len() {
            return None; // interior blocks carry exactly `level` bits and a run ≥ level
        }
        interiors.push(seg);
    }
    for pair in interiors.windows(2) {
        if pair[0].bits.len() != pair[1].bits.len() + 1 {
            return None; // levels descend by exactly one
        }
    }

    if let Some(first) = interiors.first() {
        let top = first.bits.len() + 1;
        let parse = assemble_nonterminal(&seps, &lead, &interiors, &trail, top)?;
        return Some(vec![parse]);
    }

    // exactly one separator: the level of the block it opens is free
    debug_assert_eq!(seps.len(), 1);
    let t = trail.bits.len();
    if trail.run > 0 && t == 0 {
        return None; // a run directly after a separator
    }
    let mut lo = t.max(1);
    let mut hi: Option<usize> = None; // None = unbounded
    if trail.run > 0 {
        // the trail's code block is complete, pinning the level
        lo = lo.max(t);
        hi = Some(t);
    }
    if !lead.bits.is_empty() {
        if lead.run == 0 {
            return None; // a block's run cannot be empty
        }
        // lead run complete: run = (m+1) + y_m ≥ m+1, and the lead bits fit in m+1
        let cap = lead.run - 1;
        hi = Some(hi.map_or(cap, |h| h.min(cap)));
        lo = lo.max(lead.bits.len().saturating_sub(1)).max(1);
    }
    match hi {
        Some(hi) => {
            if lo > hi {
                return None;
            }
            let mut parses = Vec::new();
            for m in lo..=hi {
                if let Some(p) = assemble_nonterminal(&seps, &lead, &interiors, &trail, m + 1) {
                    parses.push(p);
                }
            }
            if parses.is_empty() {
                None
            } else {
                Some(parses)
            }
        }
        None => {
            // unbounded level: emit the alignment-free reading once
            let mut constraints = ConstraintSet::default();
            for (rank, &b) in trail.bits.iter().enumerate() {
                constraints.record_bit(rank, b);
            }
            let consistent = constraints.is_consistent();
            let blocks = geometry_blocks(&seps, &lead, &interiors, &trail, None);
            Some(vec![StructureParse {
                blocks,
                constraints,
                top_level: None,
                terminal: false,
                consistent,
            }])
        }
    }
}

/// Assembles a fully level-assigned 4-free parse with top (possibly cut)
/// block at `top` and checks the per-level structural conditions.
fn assemble_nonterminal(
    seps: &[usize],
    lead: &Segment,
    interiors: &[Segment],
    trail: &Segment,
    top: usize,
) -> Option<StructureParse> {
    let mut constraints = ConstraintSet::default();

    // lead: tail of the level-`top` block
    if !lead.bits.is_empty() {
        if lead.run == 0 || lead.run < top || lead.bits.len() > top {
            return None;
        }
        constraints.branch_pinned.insert(top - 1, (lead.run - top) as u64);
        let start_rank = top - lead.bits.len();
        for (k, &b) in lead.bits.iter().enumerate() {
            constraints.record_bit(start_rank + k, b);
        }
    } else if lead.run > 0 {
        constraints.branch_mins.insert(top - 1, lead.run.saturating_sub(top) as u64);
    }

    // interiors: full blocks at descending levels top−1, top−2, …
    let mut level = top;
    for seg in interiors {
        level -= 1;
        if seg.bits.len() != level {
            return None;
        }
        constraints.branch_pinned.insert(level - 1, (seg.run - level) as u64);
        for (rank, &b) in seg.bits.iter().enumerate() {
            constraints.record_bit(rank, b);
        }
    }

    // trail: head of the block one level further down
    let next = level.checked_sub(1)?;
    if next == 0 {
        // next block is the terminal 4; a 4-free trail must be empty
        if !trail.bits.is_empty() || trail.run > 0 {
            return None;
        }
    } else {
        if trail.bits.len() > next {
            return None;
        }
        if trail.run > 0 && trail.bits.len() < next {
            return None;
        }
        for (rank, &b) in trail.bits.iter().enumerate() {
            constraints.record_bit(rank, b);
        }
        if trail.run > 0 {
            constraints.branch_mins.insert(next - 1, trail.run.saturating_sub(next) as u64);
        }
    }

    let consistent = constraints.is_consistent();
    let blocks = geometry_blocks(seps, lead, interiors, trail, Some(top));
    Some(StructureParse {
        blocks,
        constraints,
        top_level: Some(top),
        terminal: false,
        consistent,
    })
}

fn push_segment_blocks(
    blocks: &mut Vec<Block>,
    seg: &Segment,
    level: Option<usize>,
    start_rank: Option<usize>,
    run_complete: bool,
) {
    if !seg.bits.is_empty() {
        blocks.push(Block {
            kind: BlockKind::Bits { bits: seg.bits.clone(), start_rank },
            span: (seg.start, seg.start + seg.bits.len()),
            level,
        });
    }
    if seg.run > 0 {
        blocks.push(Block {
            kind: BlockKind::Run { observed: seg.run, complete: run_complete },
            span: (seg.start + seg.bits.len(), seg.start + seg.bits.len() + seg.run),
            level,
        });
    }
}

fn geometry_blocks(
    seps: &[usize],
    lead: &Segment,
    interiors: &[Segment],
    trail: &Segment,
    top: Option<usize>,
) -> Vec<Block> {
    let mut blocks = Vec::new();
    let lead_rank = top.filter(|_| !lead.bits.is_empty()).map(|t| t - lead.bits.len());
    // the lead run is bounded by a bit on the left exactly when bits show
    push_segment_blocks(&mut blocks, lead, top, lead_rank, !lead.bits.is_empty());
    for (k, &sep) in seps.iter().enumerate() {
        let opened = top.map(|t| t.saturating_sub(k + 1));
        blocks.push(Block { kind: BlockKind::Separator, span: (sep, sep + 1), level: opened });
        if k < interiors.len() {
            push_segment_blocks(&mut blocks, &interiors[k], opened, Some(0), true);
        }
    }
    let trail_level = top.map(|t| t.saturating_sub(seps.len()));
    push_segment_blocks(&mut blocks, trail, trail_level, Some(0), false);
    blocks
}

/// Structural parse of a finite word against the block grammar.
pub fn parse_structure(w: &FiniteWord) -> Result<ParseOutcome> {
    let symbols = w.as_shift_symbols()?;
    Ok(parse_symbols(&symbols))
}

pub(crate) fn parse_symbols(w: &[u8]) -> ParseOutcome {
    if w.contains(&4) {
        match parse_terminal_record(w) {
            Some(p) => ParseOutcome::Parses(vec![p]),
            None => ParseOutcome::NoParse,
        }
    } else {
        match parse_nonterminal(w) {
            Some(ps) => ParseOutcome::Parses(ps),
            None => ParseOutcome::NoParse,
        }
    }
}

/// Structural parse of a point. Only 4-carrying points with zero tail carry
/// the terminal structure; all other points are NoParse (4-free points lie in
/// the full four-symbol component and have no distinguished alignment).
pub fn parse_structure_point(p: &SymbolicPoint) -> ParseOutcome {
    if !p.contains_four() || p.tail() != 0 {
        return ParseOutcome::NoParse;
    }
    match parse_terminal_record(p.prefix()) {
        Some(parse) => ParseOutcome::Parses(vec![parse]),
        None => ParseOutcome::NoParse,
    }
}

/// Does `w` occur in some point of `X`?
///
/// 4-free words always do (the full four-symbol shift is contained in `X`);
/// words containing a 4 must parse against the terminal-anchored grammar with
/// a consistent constraint set.
pub fn member_language(w: &FiniteWord) -> Result<bool> {
    let symbols = w.as_shift_symbols()?;
    Ok(member_word(&symbols))
}

/// Is the point a member of `X`?
pub fn member_point(p: &SymbolicPoint) -> bool {
    if p.tail() == 4 {
        return false;
    }
    if !p.prefix().contains(&4) {
        return true;
    }
    p.tail() == 0 && member_word(p.prefix())
}

/// The symbols `a` with `a ⌢ p ∈ X`. Non-empty for every `p ∈ X` (the shift
/// is onto).
pub fn predecessor_symbols(p: &SymbolicPoint) -> Result<BTreeSet<u8>> {
    if !member_point(p) {
        return Err(Error::NotInX);
    }
    Ok((0..5).filter(|&a| member_point(&p.prepend(a))).collect())
}

/// The symbols `a` with `w ⌢ a` in the language. Non-empty for every word in
/// the language.
pub fn successor_symbols(w: &FiniteWord) -> Result<BTreeSet<u8>> {
    let mut symbols = w.as_shift_symbols()?;
    if !member_word(&symbols) {
        return Err(Error::NotInLanguage);
    }
    let mut out = BTreeSet::new();
    for a in 0..5u8 {
        symbols.push(a);
        if member_word(&symbols) {
            out.insert(a);
        }
        symbols.pop();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::builtin_pairs;

    fn pt(s: &str) -> SymbolicPoint {
        s.parse().unwrap()
    }

    fn wd(s: &str) -> FiniteWord {
        s.parse().unwrap()
    }

    #[test]
    fn point_canonical_form_and_display() {
        let p = SymbolicPoint::new(vec![3, 4, 0, 0], 0).unwrap();
        assert_eq!(p, SymbolicPoint::omega0());
        assert_eq!(p.to_string(), "340^inf");
        assert_eq!(pt("340^inf"), p);
        assert_eq!(pt("0^inf"), SymbolicPoint::constant(0).unwrap());
        assert_eq!(pt("31222340^inf").prefix(), &[3, 1, 2, 2, 2, 3, 4]);
    }

    #[test]
    fn metric_examples() {
        let zero = SymbolicPoint::constant(0).unwrap();
        assert_eq!(word_metric(&zero, &zero), BigRational::from_integer(0.into()));

        let a = pt("340^inf");
        let b = pt("30^inf");
        assert_eq!(word_metric(&a, &b), BigRational::new(1.into(), 2.into()));

        // differing only in the tails: first disagreement at index 0
        let c = SymbolicPoint::constant(1).unwrap();
        assert_eq!(word_metric(&zero, &c), BigRational::from_integer(1.into()));
    }

    #[test]
    fn metric_omega3_versus_run_probe() {
        // ω₃ agrees with 3⌢110⌢2^∞ through the whole level-3 run (indices
        // 4..11) and first disagrees where the next separator appears, at
        // index 12.
        let (_, t, y) = &builtin_pairs()[0];
        let om3 = omega(3, t, y).unwrap();
        let probe = pt("31102^inf");
        assert_eq!(word_metric(&om3, &probe), BigRational::new(1.into(), 4096.into()));
    }

    #[test]
    fn omega_examples() {
        let (_, t, y) = &builtin_pairs()[0]; // increasing tree, prime branch
        assert_eq!(omega(0, t, y).unwrap().to_string(), "340^inf");
        assert_eq!(omega(1, t, y).unwrap().to_string(), "31222340^inf");
        assert_eq!(
            omega(3, t, y).unwrap().to_string(),
            "3110222222223112222231222340^inf"
        );
    }

    #[test]
    fn omega_with_defective_witness_fails() {
        let t = TreeSpec::increasing();
        let y = BranchWitness::zeros(); // (0,0,…) is not strictly increasing
        assert!(matches!(omega(2, &t, &y), Err(Error::BranchCheckFailed { .. })));
    }

    #[test]
    fn shift_exponent_examples() {
        let y2 = BranchWitness::list(vec![2]);
        assert_eq!(shift_exponent(1, &y2).unwrap(), 5);
        let y0 = BranchWitness::zeros();
        assert_eq!(shift_exponent(1, &y0).unwrap(), 3);
        let y = BranchWitness::primes(); // y₂ = 5
        assert_eq!(shift_exponent(3, &y).unwrap(), 12);
    }

    #[test]
    fn shift_identity_small() {
        let (_, t, y) = &builtin_pairs()[0];
        for n in 1..=6u64 {
            let mut p = omega(n, t, y).unwrap();
            for _ in 0..shift_exponent(n, y).unwrap() {
                p = shift_point(&p);
            }
            assert_eq!(p, omega(n - 1, t, y).unwrap(), "σ^t_n ω_{n} = ω_{}", n - 1);
        }
    }

    #[test]
    fn shift_point_examples() {
        assert_eq!(shift_point(&pt("340^inf")), pt("40^inf"));
        let zero = SymbolicPoint::constant(0).unwrap();
        assert_eq!(shift_point(&zero), zero);
    }

    #[test]
    fn parse_spec_examples() {
        // forced parse from the terminal, inconsistent: ∅ forced out but the
        // branch passes through ∅
        let p = parse_structure(&wd("3022234")).unwrap();
        match &p {
            ParseOutcome::Parses(v) => {
                assert_eq!(v.len(), 1);
                assert!(!v[0].consistent);
                assert!(v[0].constraints.out_ranks.contains(&0));
                assert_eq!(v[0].constraints.branch_pinned.get(&0), Some(&2));
            }
            ParseOutcome::NoParse => panic!("expected a parse"),
        }
        assert!(!p.any_consistent());

        let p = parse_structure(&wd("3122234")).unwrap();
        match &p {
            ParseOutcome::Parses(v) => {
                assert!(v[0].consistent);
                assert!(v[0].constraints.in_ranks.contains(&0));
                assert_eq!(v[0].constraints.branch_pinned.get(&0), Some(&2));
            }
            ParseOutcome::NoParse => panic!("expected a parse"),
        }

        assert_eq!(parse_structure(&wd("24")).unwrap(), ParseOutcome::NoParse);
    }

    #[test]
    fn member_language_examples() {
        assert!(member_language(&wd("34")).unwrap());
        assert!(!member_language(&wd("44")).unwrap());
        assert!(!member_language(&wd("3022234")).unwrap());
        assert!(member_language(&wd("3122234")).unwrap());
        assert!(member_language(&wd("4")).unwrap());
        assert!(member_language(&wd("")).unwrap());
        assert!(!member_language(&wd("134")).unwrap());
        assert!(!member_language(&wd("334")).unwrap());
        assert!(member_language(&wd("22222234")).unwrap()); // needs y₀ = 5
    }

    #[test]
    fn member_point_examples() {
        assert!(member_point(&SymbolicPoint::constant(2).unwrap()));
        assert!(!member_point(&pt("410^inf")));
        assert!(!member_point(&SymbolicPoint::constant(4).unwrap()));
        assert!(member_point(&pt("340^inf")));
        assert!(member_point(&pt("2340^inf")));
        assert!(!member_point(&pt("0340^inf")));
        // tail must be zero once a 4 occurred
        assert!(!member_point(&SymbolicPoint::new(vec![3, 4], 1).unwrap()));
        let (_, t, y) = &builtin_pairs()[0];
        for n in 0..=20 {
            assert!(member_point(&omega(n, t, y).unwrap()), "ω_{n} ∈ X");
        }
    }

    #[test]
    fn predecessor_examples() {
        let zeros = SymbolicPoint::constant(0).unwrap();
        let preds = predecessor_symbols(&zeros).unwrap();
        assert_eq!(preds, (0..5).collect());

        let preds = predecessor_symbols(&pt("340^inf")).unwrap();
        assert_eq!(preds, BTreeSet::from([2]));

        let preds = predecessor_symbols(&pt("40^inf")).unwrap();
        assert_eq!(preds, BTreeSet::from([3]));

        assert!(matches!(
            predecessor_symbols(&SymbolicPoint::constant(4).unwrap()),
            Err(Error::NotInX)
        ));
    }

    #[test]
    fn successor_examples() {
        assert_eq!(successor_symbols(&wd("34")).unwrap(), BTreeSet::from([0]));
        assert_eq!(successor_symbols(&wd("")).unwrap(), (0..5).collect());
        assert_eq!(successor_symbols(&wd("31")).unwrap(), BTreeSet::from([0, 1, 2, 3]));
        assert!(matches!(successor_symbols(&wd("44")), Err(Error::NotInLanguage)));
    }

    #[test]
    fn fast_and_recording_membership_agree() {
        // exhaustive over all 4-carrying words of length ≤ 6
        fn rec(buf: &mut Vec<u8>, len: usize) {
            if buf.len() == len {
                if buf.contains(&4) {
                    let fast = member_word(buf);
                    let slow = parse_terminal_record(buf).map_or(false, |p| p.consistent);
                    assert_eq!(fast, slow, "word {buf:?}");
                }
                return;
            }
            for a in 0..5u8 {
                buf.push(a);
                rec(buf, len);
                buf.pop();
            }
        }
        for len in 1..=6 {
            rec(&mut Vec::new(), len);
        }
    }

    #[test]
    fn terminal_words_have_unique_parses() {
        // determinism: words containing "34" have at most one parse
        let samples = ["34", "2234", "312223400", "31102222222231122222312223400"];
        for s in samples {
            match parse_structure(&wd(s)).unwrap() {
                ParseOutcome::Parses(v) => assert_eq!(v.len(), 1, "{s}"),
                ParseOutcome::NoParse => {}
            }
        }
    }

    #[test]
    fn nonterminal_parses() {
        // pure bits or runs: one alignment-free reading
        let p = parse_structure(&wd("0110")).unwrap();
        assert!(matches!(&p, ParseOutcome::Parses(v) if v.len() == 1 && v[0].top_level.is_none()));
        let p = parse_structure(&wd("2222")).unwrap();
        assert!(matches!(&p, ParseOutcome::Parses(v) if v.len() == 1));

        // a run followed by a bit can only happen across a separator
        assert_eq!(parse_structure(&wd("2201")).unwrap(), ParseOutcome::NoParse);

        // interior block pins everything: 3 11 2222 3 1 …
        let p = parse_structure(&wd("31122223122")).unwrap();
        match &p {
            ParseOutcome::Parses(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].top_level, Some(3));
                assert!(v[0].consistent);
                assert_eq!(v[0].constraints.branch_pinned.get(&1), Some(&2));
            }
            _ => panic!("expected parse"),
        }

        // "0223": complete run at an undetermined level — level 1 reading is
        // inconsistent (∅ forced out), level 2 reading consistent
        let p = parse_structure(&wd("0223")).unwrap();
        match &p {
            ParseOutcome::Parses(v) => {
                assert_eq!(v.len(), 2);
                let consistent: Vec<bool> = v.iter().map(|q| q.consistent).collect();
                assert_eq!(consistent.iter().filter(|&&c| c).count(), 1);
            }
            _ => panic!("expected parses"),
        }

        // "30…": a code block starting with 0 forces ∅ out — inconsistent
        let p = parse_structure(&wd("30")).unwrap();
        assert!(!p.any_consistent());
        let p = parse_structure(&wd("31")).unwrap();
        assert!(p.any_consistent());
    }

    #[test]
    fn language_is_factor_closed() {
        // closure under subwords for all in-language words of length ≤ 5
        fn rec(buf: &mut Vec<u8>, len: usize, acc: &mut Vec<Vec<u8>>) {
            if buf.len() == len {
                if member_word(buf) {
                    acc.push(buf.clone());
                }
                return;
            }
            for a in 0..5u8 {
                buf.push(a);
                rec(buf, len, acc);
                buf.pop();
            }
        }
        for len in 1..=5 {
            let mut words = Vec::new();
            rec(&mut Vec::new(), len, &mut words);
            for w in words {
                for i in 0..w.len() {
                    for j in i..=w.len() {
                        assert!(member_word(&w[i..j]), "subword of {w:?}");
                    }
                }
            }
        }
    }
}
