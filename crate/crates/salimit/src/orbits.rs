//! Backward-orbit enumeration in `(X, σ)`, witness orbits, structural
//! verification of segments, finite-depth limit-set probes, and the
//! truncated natural-extension metric.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subshift::{
    member_point, omega, parse_structure_point, shift_exponent, word_metric, ParseOutcome,
    SymbolicPoint,
};
use crate::words::{tree_code_bit, BranchWitness, FiniteWord, TreeSpec};

/// Default node budget for enumerations.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A finite backward-orbit segment `(x_0, …, x_N)` with `σ(x_{n+1}) = x_n`
/// and every point a member of the subshift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSegment {
    points: Vec<SymbolicPoint>,
}

impl OrbitSegment {
    /// Validates the shift relation and membership of every point.
    pub fn from_points(points: Vec<SymbolicPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("a segment needs at least one point".into()));
        }
        for pair in points.windows(2) {
            if pair[1].shift() != pair[0] {
                return Err(Error::Precondition("shift relation violated".into()));
            }
        }
        for p in &points {
            if !member_point(p) {
                return Err(Error::NotInX);
            }
        }
        Ok(OrbitSegment { points })
    }

    /// Rebuilds the whole segment from its deepest point.
    pub fn from_endpoint(endpoint: SymbolicPoint, depth: usize) -> Result<Self> {
        let mut points = Vec::with_capacity(depth + 1);
        points.push(endpoint);
        for _ in 0..depth {
            let next = points.last().unwrap().shift();
            points.push(next);
        }
        points.reverse();
        Self::from_points(points)
    }

    pub(crate) fn from_path_unchecked(points: Vec<SymbolicPoint>) -> Self {
        OrbitSegment { points }
    }

    pub fn points(&self) -> &[SymbolicPoint] {
        &self.points
    }

    pub fn depth(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> &SymbolicPoint {
        &self.points[0]
    }

    pub fn endpoint(&self) -> &SymbolicPoint {
        self.points.last().unwrap()
    }
}

/// Depth-first enumeration of backward segments; a lazily driven iterator.
/// Children are explored in symbol order, so the output order is
/// deterministic.
pub struct BackwardSegments {
    path: Vec<SymbolicPoint>,
    next_symbol: Vec<u8>,
    target: usize,
    limit: u64,
    budget: u64,
    emitted: u64,
    nodes: u64,
    complete: bool,
    done: bool,
}

impl BackwardSegments {
    /// Number of points visited so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// True when the enumeration finished without hitting the limit or the
    /// node budget (only meaningful after the iterator is exhausted).
    pub fn complete(&self) -> bool {
        self.complete
    }

    fn backtrack(&mut self) {
        self.path.pop();
        self.next_symbol.pop();
        if self.path.is_empty() {
            self.done = true;
        }
    }
}

impl Iterator for BackwardSegments {
    type Item = OrbitSegment;

    fn next(&mut self) -> Option<OrbitSegment> {
        while !self.done {
            let depth = self.path.len() - 1;
            if depth == self.target {
                let seg = OrbitSegment::from_path_unchecked(self.path.clone());
                self.backtrack();
                self.emitted += 1;
                if self.emitted >= self.limit {
                    self.done = true;
                    self.complete = false;
                }
                return Some(seg);
            }
            let mut advanced = false;
            while self.next_symbol[depth] < 5 {
                let a = self.next_symbol[depth];
                self.next_symbol[depth] += 1;
                let cand = self.path[depth].prepend(a);
                if member_point(&cand) {
                    if self.nodes >= self.budget {
                        self.done = true;
                        self.complete = false;
                        return None;
                    }
                    self.nodes += 1;
                    self.path.push(cand);
                    self.next_symbol.push(0);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                self.backtrack();
            }
        }
        None
    }
}

/// All backward segments of length `depth` from `p`, streamed depth-first,
/// cut off after `limit` segments or `budget` visited points.
pub fn backward_segments(
    p: &SymbolicPoint,
    depth: usize,
    limit: u64,
    budget: u64,
) -> Result<BackwardSegments> {
    if !member_point(p) {
        return Err(Error::NotInX);
    }
    Ok(BackwardSegments {
        path: vec![p.clone()],
        next_symbol: vec![0],
        target: depth,
        limit,
        budget,
        emitted: 0,
        nodes: 1,
        complete: true,
        done: false,
    })
}

#[derive(Debug)]
pub struct BackwardRun {
    pub segments: Vec<OrbitSegment>,
    pub complete: bool,
    pub nodes: u64,
}

pub fn backward_segments_collect(
    p: &SymbolicPoint,
    depth: usize,
    limit: u64,
    budget: u64,
) -> Result<BackwardRun> {
    let mut stream = backward_segments(p, depth, limit, budget)?;
    let segments: Vec<OrbitSegment> = stream.by_ref().collect();
    Ok(BackwardRun { segments, complete: stream.complete(), nodes: stream.nodes() })
}

/// The backward segment from `ω₀` of depth `Σ_{n=1}^{n_max} t_n` whose point
/// at cumulative depth `Σ_{n≤k} t_n` is `ω_k(T, y)`. Every intermediate
/// point is the corresponding suffix of `ω_{n_max}`.
pub fn witness_orbit(tree: &TreeSpec, y: &BranchWitness, n_max: u64) -> Result<OrbitSegment> {
    let top = omega(n_max, tree, y)?;
    let mut total = 0usize;
    for n in 1..=n_max {
        total += shift_exponent(n, y)? as usize;
    }
    let symbols = top.prefix();
    debug_assert_eq!(symbols.len(), total + 2);
    let mut points = Vec::with_capacity(total + 1);
    for k in 0..=total {
        points.push(SymbolicPoint::new(symbols[total - k..].to_vec(), 0)?);
    }
    debug_assert_eq!(points[0], SymbolicPoint::omega0());
    Ok(OrbitSegment { points })
}

/// Structural data of one 3-aligned point in a segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureEntry {
    /// Position in the segment.
    pub depth: usize,
    /// Level of the point's top block (0 for `ω₀` itself).
    pub level: usize,
    /// The code prefix `x|level` the point exhibits.
    pub code_prefix: Vec<u8>,
    /// The branch digits `y|level` the point exhibits.
    pub branch_prefix: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureReport {
    pub entries: Vec<StructureEntry>,
    pub levels_strictly_increasing: bool,
    pub code_prefixes_compatible: bool,
    pub branch_prefixes_compatible: bool,
}

impl StructureReport {
    pub fn all_true(&self) -> bool {
        self.levels_strictly_increasing
            && self.code_prefixes_compatible
            && self.branch_prefixes_compatible
    }
}

/// Extracts every 3-aligned point of the segment, reads off its level, code
/// prefix and branch prefix, and checks that levels strictly increase and
/// the prefixes are pairwise compatible along the segment.
pub fn verify_structure(seg: &OrbitSegment) -> Result<StructureReport> {
    if seg.start() != &SymbolicPoint::omega0() {
        return Err(Error::Precondition("segment must start at ω₀".into()));
    }
    let mut entries = Vec::new();
    for (depth, point) in seg.points().iter().enumerate() {
        if point.symbol_at(0) != 3 {
            continue;
        }
        let parse = match parse_structure_point(point) {
            ParseOutcome::Parses(mut v) => v.pop().expect("terminal parse is unique"),
            ParseOutcome::NoParse => {
                return Err(Error::ParseFailure(format!(
                    "3-aligned point {point} at depth {depth} has no block structure"
                )))
            }
        };
        let level = parse.top_level.ok_or_else(|| {
            Error::ParseFailure(format!("point {point} at depth {depth} lacks an anchored level"))
        })?;
        let mut code_prefix = Vec::with_capacity(level);
        for r in 0..level as u64 {
            let bit = if parse.constraints.in_ranks.contains(&r) {
                1
            } else if parse.constraints.out_ranks.contains(&r) {
                0
            } else {
                return Err(Error::ParseFailure(format!(
                    "rank {r} unobserved in a fully aligned point at depth {depth}"
                )));
            };
            code_prefix.push(bit);
        }
        let mut branch_prefix = Vec::with_capacity(level);
        for m in 0..level {
            let d = parse.constraints.branch_pinned.get(&m).ok_or_else(|| {
                Error::ParseFailure(format!(
                    "branch digit {m} unobserved in a fully aligned point at depth {depth}"
                ))
            })?;
            branch_prefix.push(*d);
        }
        entries.push(StructureEntry { depth, level, code_prefix, branch_prefix });
    }

    let levels_strictly_increasing =
        entries.windows(2).all(|p| p[1].level > p[0].level);
    let code_prefixes_compatible = entries.windows(2).all(|p| {
        p[1].code_prefix[..p[0].level] == p[0].code_prefix[..]
    });
    let branch_prefixes_compatible = entries.windows(2).all(|p| {
        p[1].branch_prefix[..p[0].level] == p[0].branch_prefix[..]
    });
    Ok(StructureReport {
        entries,
        levels_strictly_increasing,
        code_prefixes_compatible,
        branch_prefixes_compatible,
    })
}

/// The finite-depth probe `C(N, k)`: length-`k` prefixes of the endpoints of
/// all depth-`N` backward segments of `ω₀`.
///
/// This is an outer one-sided probe of the special backward limit set: the
/// length-`k` prefix of any point of the limit set shows up in `C(N, k)` for
/// infinitely many `N`, but members of `C(N, k)` need not come from limit
/// points. The exact limit set is not computable at any finite depth.
pub fn salpha_prefix_approx(k: usize, depth: usize, budget: u64) -> Result<BTreeSet<FiniteWord>> {
    if k > depth {
        return Err(Error::Precondition("prefix length must not exceed depth".into()));
    }
    let mut stream = backward_segments(&SymbolicPoint::omega0(), depth, budget, budget)?;
    let mut prefixes = BTreeSet::new();
    for seg in stream.by_ref() {
        prefixes.insert(FiniteWord::from_symbols(&seg.endpoint().initial_symbols(k))?);
    }
    if !stream.complete() {
        return Err(Error::ResourceLimit { budget });
    }
    Ok(prefixes)
}

/// Truncated natural-extension metric
/// `Σ_{n ≤ M} 2^{−n} min(1, d(x_n, y_n))`, together with the truncation
/// error bound `2^{−M}`.
pub fn natext_metric(
    s1: &OrbitSegment,
    s2: &OrbitSegment,
    truncation: usize,
) -> Result<(BigRational, BigRational)> {
    if s1.depth() < truncation || s2.depth() < truncation {
        return Err(Error::Precondition("both segments must reach the truncation depth".into()));
    }
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for n in 0..=truncation {
        let d = word_metric(&s1.points()[n], &s2.points()[n]);
        sum += &term * d.min(one.clone());
        term /= &two;
    }
    // after the loop `term` is exactly 2^{−(M+1)}; the tail is ≤ 2·term
    let bound = &term * &two;
    Ok((sum, bound))
}

/// Distances `d(ω_n(T,y), 3⌢h(T))` for `n ≤ n_max`, computed by direct
/// symbol comparison against the lazily evaluated code. Every value is
/// bounded by `2^{−(n+1)}`; here the bound is attained for all `n` because
/// code symbols lie in `{0,1}` while the symbol of `ω_n` at index `n+1` is a
/// run symbol 2 (or the terminal 4 when `n = 0`).
pub fn convergence_check(
    tree: &TreeSpec,
    y: &BranchWitness,
    n_max: u64,
) -> Result<Vec<BigRational>> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let om = omega(n, tree, y)?;
        let mut j = 0usize;
        loop {
            let target = if j == 0 { 3 } else { tree_code_bit(tree, j as u64 - 1)? };
            if om.symbol_at(j) != target {
                break;
            }
            j += 1;
            if j > n as usize + 1 {
                return Err(Error::CertificationFailed(format!(
                    "ω_{n} agrees with the code point past index {}",
                    n + 1
                )));
            }
        }
        out.push(BigRational::new(BigInt::one(), BigInt::one() << j));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::builtin_pairs;

    fn omega0() -> SymbolicPoint {
        SymbolicPoint::omega0()
    }

    #[test]
    fn backward_depth_one_from_omega0() {
        let run = backward_segments_collect(&omega0(), 1, 1000, 100_000).unwrap();
        assert!(run.complete);
        assert_eq!(run.segments.len(), 1);
        let seg = &run.segments[0];
        assert_eq!(seg.points()[1], omega0().prepend(2));
    }

    #[test]
    fn backward_depth_one_from_zeros() {
        let zeros = SymbolicPoint::constant(0).unwrap();
        let run = backward_segments_collect(&zeros, 1, 1000, 100_000).unwrap();
        assert_eq!(run.segments.len(), 5);
    }

    #[test]
    fn backward_rejects_non_members() {
        let bad = SymbolicPoint::constant(4).unwrap();
        assert!(matches!(backward_segments(&bad, 1, 10, 10), Err(Error::NotInX)));
    }

    #[test]
    fn witness_orbit_passes_through_omegas() {
        let (_, t, y) = &builtin_pairs()[0];
        let seg = witness_orbit(t, y, 3).unwrap();
        // t_1 = 5, t_2 = 8, t_3 = 12
        assert_eq!(seg.depth(), 25);
        assert_eq!(seg.points()[0], omega0());
        assert_eq!(seg.points()[5], omega(1, t, y).unwrap());
        assert_eq!(seg.points()[13], omega(2, t, y).unwrap());
        assert_eq!(seg.endpoint(), &omega(3, t, y).unwrap());
        // independent re-validation of the segment invariant
        assert!(OrbitSegment::from_points(seg.points().to_vec()).is_ok());
    }

    #[test]
    fn witness_orbit_depth_zero() {
        let (_, t, y) = &builtin_pairs()[1];
        let seg = witness_orbit(t, y, 0).unwrap();
        assert_eq!(seg.points(), &[omega0()]);
        let report = verify_structure(&seg).unwrap();
        assert!(report.all_true());
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].level, 0);
    }

    #[test]
    fn witness_orbit_structure_report() {
        let (_, t, y) = &builtin_pairs()[0];
        let seg = witness_orbit(t, y, 3).unwrap();
        let report = verify_structure(&seg).unwrap();
        assert!(report.all_true());
        let levels: Vec<usize> = report.entries.iter().map(|e| e.level).collect();
        assert_eq!(levels, vec![0, 1, 2, 3]);
        assert_eq!(report.entries[3].code_prefix, vec![1, 1, 0]);
        assert_eq!(report.entries[3].branch_prefix, vec![2, 3, 5]);
    }

    #[test]
    fn exhaustive_backward_matches_naive_frontier() {
        // frontier-by-frontier reference computation using member_point only
        let depth = 9;
        let mut frontier: BTreeSet<SymbolicPoint> = BTreeSet::new();
        frontier.insert(omega0());
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for p in &frontier {
                for a in 0..5 {
                    let c = p.prepend(a);
                    if member_point(&c) {
                        next.insert(c);
                    }
                }
            }
            frontier = next;
        }
        let run = backward_segments_collect(&omega0(), depth, 1_000_000, 1_000_000).unwrap();
        assert!(run.complete);
        let endpoints: BTreeSet<SymbolicPoint> =
            run.segments.iter().map(|s| s.endpoint().clone()).collect();
        assert_eq!(endpoints, frontier);
        assert_eq!(endpoints.len(), run.segments.len(), "segments are endpoint-unique");
    }

    #[test]
    fn salpha_probe_small() {
        let probe = salpha_prefix_approx(2, 1, 1000).unwrap();
        let expected: BTreeSet<FiniteWord> = [FiniteWord::from_symbols(&[2, 3]).unwrap()].into();
        assert_eq!(probe, expected);
    }

    #[test]
    fn salpha_budget_error() {
        assert!(matches!(
            salpha_prefix_approx(2, 14, 3),
            Err(Error::ResourceLimit { budget: 3 })
        ));
    }

    #[test]
    fn natext_metric_examples() {
        let (_, t, y) = &builtin_pairs()[0];
        let seg = witness_orbit(t, y, 2).unwrap();
        let (d, bound) = natext_metric(&seg, &seg, 5).unwrap();
        assert!(d.is_zero());
        assert_eq!(bound, BigRational::new(1.into(), 32.into()));

        // differing only at the deepest point: single-term sum
        let other_y = BranchWitness::list(vec![2, 3, 6]);
        let seg2 = witness_orbit(t, &other_y, 2).unwrap();
        let m = seg.depth().min(seg2.depth());
        let (d, _) = natext_metric(&seg, &seg2, m).unwrap();
        // terms verified against a direct recomputation
        let mut expect = BigRational::zero();
        let two = BigRational::from_integer(2.into());
        let mut term = BigRational::one();
        for n in 0..=m {
            expect += &term * word_metric(&seg.points()[n], &seg2.points()[n]);
            term /= &two;
        }
        assert_eq!(d, expect);
    }

    #[test]
    fn natext_truncations_are_monotone() {
        let (_, t, y) = &builtin_pairs()[0];
        let a = witness_orbit(t, y, 3).unwrap();
        let full = TreeSpec::full();
        let zeros = BranchWitness::zeros();
        let b = witness_orbit(&full, &zeros, 3).unwrap();
        let m = a.depth().min(b.depth());
        let mut prev = BigRational::zero();
        for trunc in 0..=m {
            let (d, bound) = natext_metric(&a, &b, trunc).unwrap();
            assert!(d >= prev);
            let (d_full, _) = natext_metric(&a, &b, m).unwrap();
            assert!(&d_full - &d <= bound);
            prev = d;
        }
    }

    #[test]
    fn convergence_values() {
        for (_, t, y) in &builtin_pairs() {
            let ds = convergence_check(t, y, 12).unwrap();
            for (n, d) in ds.iter().enumerate() {
                let expect = BigRational::new(1.into(), BigInt::one() << (n + 1));
                assert_eq!(d, &expect, "n = {n}");
            }
        }
    }
}
