//! Exact base-9 Cantor embedding, the 9-lap horseshoe, cylinder covers of
//! follower sets, and certified distance enclosures.
//!
//! The embedding sends a symbol sequence to `Σ 2 x_j / 9^{j+1}`; its image is
//! the Cantor set of points whose trajectories stay in the increasing laps of
//! the horseshoe. Distances from a rational to an embedded follower set are
//! computed by walking the base-9 digits of the point down the tree of
//! in-language cylinders. The walk either certifies the exact distance (the
//! nearest set points above and below are pinned by greedy lexicographic
//! extension, which stabilizes to a constant tail within two steps) or, past
//! the depth cap, returns a width-`9^{−depth}` enclosure.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subshift::{member_point, member_word, SymbolicPoint};

/// Exact rational scalar used throughout the certified code paths.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(num.into(), den.into())
}

/// Formats a rational as `"num/den"` (always with an explicit denominator).
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_string(s: &str) -> Result<Rational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Precondition(format!("rational {s:?} must be num/den")))?;
    let n: BigInt = n.trim().parse().map_err(|_| Error::Precondition("bad numerator".into()))?;
    let d: BigInt = d.trim().parse().map_err(|_| Error::Precondition("bad denominator".into()))?;
    if d.is_zero() {
        return Err(Error::Precondition("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}

/// An exact rational interval `[lo, hi]` certified to contain a real value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Precondition("enclosure bounds out of order".into()));
        }
        Ok(Enclosure { lo, hi })
    }

    pub fn exact(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Enclosure::exact(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Pointwise scaling by a non-negative rational.
    pub fn scale(&self, c: &Rational) -> Enclosure {
        debug_assert!(!c.is_negative());
        Enclosure { lo: &self.lo * c, hi: &self.hi * c }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rat_to_string(&self.lo), rat_to_string(&self.hi))
    }
}

impl Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Enclosure", 2)?;
        st.serialize_field("lo", &rat_to_string(&self.lo))?;
        st.serialize_field("hi", &rat_to_string(&self.hi))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Enclosure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            lo: String,
            hi: String,
        }
        let r = Repr::deserialize(d)?;
        let lo = rat_from_string(&r.lo).map_err(serde::de::Error::custom)?;
        let hi = rat_from_string(&r.hi).map_err(serde::de::Error::custom)?;
        Enclosure::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

fn nine_pow(k: usize) -> BigInt {
    BigInt::from(9).pow(k as u32)
}

fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && x <= &Rational::one()
}

/// The embedding `e(x₀x₁⋯) = Σ 2 x_j / 9^{j+1}`, exact. For a point with
/// constant tail `a` from index `m` the tail sums to `a / (4·9^m)`.
pub fn embed_e(p: &SymbolicPoint) -> Rational {
    let n = p.prefix().len();
    let mut num = BigInt::zero();
    for &s in p.prefix() {
        num = num * 9 + 2 * BigInt::from(s);
    }
    // e(p) = num / 9^n + tail / (4 · 9^n)
    BigRational::new(4 * num + p.tail(), 4 * nine_pow(n))
}

/// Left endpoint of the base-9 cylinder of `word`: `e(word ⌢ 0^∞)`.
pub(crate) fn cylinder_low(word: &[u8]) -> Rational {
    let mut num = BigInt::zero();
    for &s in word {
        num = num * 9 + 2 * BigInt::from(s);
    }
    BigRational::new(num, nine_pow(word.len()))
}

/// Lap classification of the 9-lap horseshoe. Shared endpoints resolve to
/// the increasing lap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lap {
    Increasing(u8),
    Decreasing(u8),
}

pub fn lap_index(x: &Rational) -> Result<Lap> {
    if !in_unit_interval(x) {
        return Err(Error::OutOfDomain);
    }
    let t = x * BigRational::from_integer(9.into());
    let k = t.floor().to_integer().to_i64().expect("bounded").min(8);
    if k % 2 == 0 {
        Ok(Lap::Increasing((k / 2) as u8))
    } else if t.is_integer() {
        // right endpoint of the increasing lap (k−1)/2
        Ok(Lap::Increasing(((k - 1) / 2) as u8))
    } else {
        Ok(Lap::Decreasing(((k - 1) / 2) as u8))
    }
}

/// The 9-horseshoe with 5 increasing and 4 decreasing laps of slope ±9.
pub fn base_f(x: &Rational) -> Result<Rational> {
    let nine = BigRational::from_integer(9.into());
    match lap_index(x)? {
        Lap::Increasing(i) => Ok(x * &nine - BigRational::from_integer((2 * i as i64).into())),
        Lap::Decreasing(i) => {
            Ok(BigRational::from_integer((2 * i as i64 + 2).into()) - x * &nine)
        }
    }
}

// ---------------------------------------------------------------------------
// Cylinder covers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverEntry {
    /// The in-language word after the follower symbol.
    pub word: Vec<u8>,
    /// Cylinder endpoints (exact, serialized as `num/den`).
    #[serde(with = "rat_serde")]
    pub lo: Rational,
    #[serde(with = "rat_serde")]
    pub hi: Rational,
    /// An explicit point of the follower set inside the cylinder.
    pub witness: SymbolicPoint,
}

mod rat_serde {
    use super::*;
    pub fn serialize<S: serde::Serializer>(
        r: &Rational,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rat_from_string(&s).map_err(serde::de::Error::custom)
    }
}

/// A finite union of depth-`d` base-9 cylinders covering an embedded
/// follower set, with one inner witness point per cylinder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylinderCover {
    pub symbol: u8,
    pub depth: usize,
    pub entries: Vec<CoverEntry>,
}

/// Outer cover of the embedded follower set of `i` by the cylinders of all
/// in-language length-`depth` continuations, each with the inner witness
/// `w ⌢ 0^∞` (zero-extension keeps every word of this language alive).
pub fn follower_cover(i: u8, depth: usize) -> Result<CylinderCover> {
    if i > 4 {
        return Err(Error::SymbolOutOfRange { symbol: i as u64, bound: 5 });
    }
    if depth == 0 {
        return Err(Error::Precondition("cover depth must be at least 1".into()));
    }
    let width = BigRational::new(BigInt::one(), nine_pow(depth));
    let mut entries = Vec::new();
    let mut buf = vec![i];
    fn rec(
        buf: &mut Vec<u8>,
        depth: usize,
        width: &Rational,
        entries: &mut Vec<CoverEntry>,
    ) {
        if buf.len() == depth + 1 {
            let word = buf[1..].to_vec();
            let lo = cylinder_low(&word);
            let witness = SymbolicPoint::new(word.clone(), 0).expect("valid symbols");
            debug_assert!(member_point(&witness.prepend(buf[0])));
            entries.push(CoverEntry { hi: &lo + width, lo, word, witness });
            return;
        }
        for a in 0..5 {
            buf.push(a);
            if member_word(buf) {
                rec(buf, depth, width, entries);
            }
            buf.pop();
        }
    }
    rec(&mut buf, depth, &width, &mut entries);
    Ok(CylinderCover { symbol: i, depth, entries })
}

// ---------------------------------------------------------------------------
// Exact distance machinery
// ---------------------------------------------------------------------------

/// Greedy lexicographically maximal point of the follower set of `i` with
/// prefix `w` (callers guarantee `i ⌢ w` is in the language). The greedy
/// walk stabilizes within two appended symbols: after a 4 the continuation
/// is forced to zeros, and once two 3s are adjacent no later 4 can parse, so
/// the maximal continuation is all 3s.
pub(crate) fn lexmax_point(i: u8, w: &[u8]) -> SymbolicPoint {
    let mut buf = Vec::with_capacity(w.len() + 4);
    buf.push(i);
    buf.extend_from_slice(w);
    if buf.contains(&4) {
        return SymbolicPoint::new(w.to_vec(), 0).expect("valid symbols");
    }
    let mut ext = w.to_vec();
    loop {
        buf.push(4);
        if member_word(&buf) {
            ext.push(4);
            return SymbolicPoint::new(ext, 0).expect("valid symbols");
        }
        buf.pop();
        buf.push(3);
        debug_assert!(member_word(&buf), "a 4-free extension is always in the language");
        ext.push(3);
        if ext.len() >= 2 && ext[ext.len() - 2] == 3 {
            return SymbolicPoint::new(ext, 3).expect("valid symbols");
        }
    }
}

#[derive(Debug)]
pub(crate) enum FollowerDist {
    Exact(Rational),
    Bounded(Enclosure),
}

/// Result of the digit descent at a point `u`, with the nearest in-language
/// subtrees strictly to the left and right of the walked chain.
pub(crate) struct Descent {
    pub outcome: DescentOutcome,
    pub best_left: Option<Vec<u8>>,
    pub best_right: Option<Vec<u8>>,
}

pub(crate) enum DescentOutcome {
    /// `u = e(point)` exactly; `member` tells whether it lies in the
    /// follower set. `tail` is the point's constant tail symbol.
    AtPoint { point: SymbolicPoint, member: bool, tail: u8 },
    /// The digit remainder cycled through 4-free in-language digits: `u`
    /// lies in the (closed) follower set but is not finitely representable.
    CycleMember,
    /// The walk left the in-language cylinder tree at finite depth.
    Exited,
    /// Depth cap reached inside an in-language cylinder.
    CapExceeded { chain: Vec<u8> },
}

/// Walks the base-9 digits of `u` down the in-language cylinder tree of the
/// follower set of `i`, maintaining the nearest in-language sibling subtrees
/// on both sides.
pub(crate) fn descend(u: &Rational, i: u8, cap: usize) -> Descent {
    let mut chain: Vec<u8> = vec![i];
    let mut best_left: Option<Vec<u8>> = None;
    let mut best_right: Option<Vec<u8>> = None;
    let mut lambda = u.clone();
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits_since: Vec<u8> = Vec::new();
    let nine = BigRational::from_integer(9.into());

    // probes siblings of digit `a` at the current chain: the largest
    // in-language digit below `a_lo`, the smallest above `a_hi`
    let probe = |chain: &mut Vec<u8>,
                 below: std::ops::Range<u8>,
                 above: std::ops::Range<u8>|
     -> (Option<Vec<u8>>, Option<Vec<u8>>) {
        let mut l = None;
        for d in below.rev() {
            chain.push(d);
            let ok = member_word(chain);
            if ok {
                l = Some(chain[1..].to_vec());
            }
            chain.pop();
            if ok {
                break;
            }
        }
        let mut r = None;
        for d in above {
            chain.push(d);
            let ok = member_word(chain);
            if ok {
                r = Some(chain[1..].to_vec());
            }
            chain.pop();
            if ok {
                break;
            }
        }
        (l, r)
    };

    for _ in 0..cap {
        // constant-remainder states: u is exactly a representable point
        let tail = if lambda.is_zero() {
            Some(0u8)
        } else if lambda == rat(1, 4) {
            Some(1)
        } else if lambda == rat(1, 2) {
            Some(2)
        } else if lambda == rat(3, 4) {
            Some(3)
        } else if lambda.is_one() {
            Some(4)
        } else {
            None
        };
        if let Some(t) = tail {
            let point = SymbolicPoint::new(chain[1..].to_vec(), t).expect("valid symbols");
            let member = member_point(&point.prepend(i));
            if member || t == 0 {
                // for t = 0 the chain subtree holds nothing strictly below u
                // and, when the chain carries a 4, nothing strictly above;
                // the recorded siblings already bracket u
                return Descent {
                    outcome: DescentOutcome::AtPoint { point, member, tail: t },
                    best_left,
                    best_right,
                };
            }
            // not a member and t ≥ 1: fall through and keep walking the
            // constant digits; the in-language check below exits in finitely
            // many steps (a 4-free chain with a 4-free constant tail is
            // always a member, so some symbol here involves a 4)
        }

        if let Some(&at) = seen.get(&lambda) {
            let cycle_free = digits_since[at..].iter().all(|&d| d != 4);
            let chain_free = !chain.contains(&4);
            if cycle_free && chain_free {
                return Descent { outcome: DescentOutcome::CycleMember, best_left, best_right };
            }
            // a 4 recurs in the cycle: the chain must die soon; keep walking
        } else {
            seen.insert(lambda.clone(), digits_since.len());
        }

        let s = &lambda * &nine;
        let t_floor = s.floor().to_integer().to_i64().expect("bounded");
        let (digit, next_lambda) = if t_floor % 2 == 0 && t_floor < 9 {
            let a = (t_floor / 2) as u8;
            (a, &s - BigRational::from_integer(t_floor.into()))
        } else if s.is_integer() {
            // right edge of the even-digit zone below
            let a = ((t_floor - 1) / 2) as u8;
            (a, Rational::one())
        } else {
            // strictly inside an odd gap: u is outside the Cantor set here
            let a_left = ((t_floor - 1) / 2) as u8;
            let (l, r) = probe(&mut chain, 0..a_left + 1, a_left + 1..5);
            return Descent {
                outcome: DescentOutcome::Exited,
                best_left: l.or(best_left),
                best_right: r.or(best_right),
            };
        };

        chain.push(digit);
        if !member_word(&chain) {
            chain.pop();
            let (l, r) = probe(&mut chain, 0..digit, digit + 1..5);
            return Descent {
                outcome: DescentOutcome::Exited,
                best_left: l.or(best_left),
                best_right: r.or(best_right),
            };
        }
        // record nearest in-language siblings of the entered child
        let entered = chain.pop().expect("just pushed");
        let (l, r) = probe(&mut chain, 0..digit, digit + 1..5);
        chain.push(entered);
        if let Some(l) = l {
            best_left = Some(l);
        }
        if let Some(r) = r {
            best_right = Some(r);
        }
        digits_since.push(digit);
        lambda = next_lambda;
    }
    Descent {
        outcome: DescentOutcome::CapExceeded { chain: chain[1..].to_vec() },
        best_left,
        best_right,
    }
}

/// Exact or enclosed distance from `u` to the embedded follower set of `i`.
pub(crate) fn follower_dist(u: &Rational, i: u8, cap: usize) -> FollowerDist {
    let descent = descend(u, i, cap);
    let finish_exact = |left: Option<Vec<u8>>, right: Option<Vec<u8>>| -> FollowerDist {
        let below = left.map(|w| u - embed_e(&lexmax_point(i, &w)));
        let above = right.map(|w| cylinder_low(&w) - u);
        let d = match (below, above) {
            (Some(b), Some(a)) => b.min(a),
            (Some(b), None) => b,
            (None, Some(a)) => a,
            (None, None) => unreachable!("every follower set contains the zero point"),
        };
        debug_assert!(!d.is_negative());
        FollowerDist::Exact(d)
    };
    match descent.outcome {
        DescentOutcome::AtPoint { member, point, .. } => {
            debug_assert_eq!(&embed_e(&point), u, "digit walk recovers the point");
            if member {
                FollowerDist::Exact(Rational::zero())
            } else {
                finish_exact(descent.best_left, descent.best_right)
            }
        }
        DescentOutcome::CycleMember => FollowerDist::Exact(Rational::zero()),
        DescentOutcome::Exited => finish_exact(descent.best_left, descent.best_right),
        DescentOutcome::CapExceeded { chain } => {
            // u sits in an in-language cylinder: its zero-extension witness
            // bounds the distance from above
            let hi = u - cylinder_low(&chain);
            debug_assert!(!hi.is_negative());
            FollowerDist::Bounded(Enclosure::new(Rational::zero(), hi).expect("ordered"))
        }
    }
}

/// Certified distance from `x` to the embedded follower set `A_i`: exact
/// (width 0) whenever the digit descent resolves within `depth` steps,
/// otherwise an enclosure of width at most `9^{−depth}`.
pub fn dist_to_follower(x: &Rational, i: u8, depth: usize) -> Result<Enclosure> {
    if i > 4 {
        return Err(Error::SymbolOutOfRange { symbol: i as u64, bound: 5 });
    }
    if !in_unit_interval(x) {
        return Err(Error::OutOfDomain);
    }
    Ok(match follower_dist(x, i, depth.max(1)) {
        FollowerDist::Exact(d) => Enclosure::exact(d),
        FollowerDist::Bounded(e) => e,
    })
}

/// Three-valued certified membership in `B_i`, the set of points at least as
/// close to `A_i` as to every other follower set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certainty {
    Yes,
    No,
    Unknown,
}

pub fn in_b_certified(x: &Rational, i: u8, depth: usize) -> Result<Certainty> {
    if i > 4 {
        return Err(Error::SymbolOutOfRange { symbol: i as u64, bound: 5 });
    }
    let dists: Vec<Enclosure> =
        (0..5).map(|j| dist_to_follower(x, j, depth)).collect::<Result<_>>()?;
    let di = &dists[i as usize];
    let yes = (0..5).filter(|&j| j != i as usize).all(|j| di.hi() <= dists[j].lo());
    if yes {
        return Ok(Certainty::Yes);
    }
    let no = (0..5).any(|j| j != i as usize && dists[j].hi() < di.lo());
    if no {
        return Ok(Certainty::No);
    }
    Ok(Certainty::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshift::shift_point;

    fn pt(s: &str) -> SymbolicPoint {
        s.parse().unwrap()
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(embed_e(&pt("0^inf")), rat(0, 1));
        assert_eq!(embed_e(&pt("4^inf")), rat(1, 1));
        assert_eq!(embed_e(&pt("2^inf")), rat(1, 2));
        assert_eq!(embed_e(&pt("340^inf")), rat(62, 81));
        assert_eq!(embed_e(&pt("42^inf")), rat(17, 18));
        assert_eq!(embed_e(&pt("02^inf")), rat(1, 18));
    }

    #[test]
    fn embedding_is_order_preserving() {
        // lexicographic order of symbol sequences transfers to the line
        let pts = ["0^inf", "010^inf", "02^inf", "1^inf", "30^inf", "340^inf", "4^inf"];
        let vals: Vec<Rational> = pts.iter().map(|s| embed_e(&pt(s))).collect();
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn lap_examples() {
        assert_eq!(lap_index(&rat(62, 81)).unwrap(), Lap::Increasing(3));
        assert_eq!(lap_index(&rat(3, 18)).unwrap(), Lap::Decreasing(0));
        assert_eq!(lap_index(&rat(2, 9)).unwrap(), Lap::Increasing(1));
        assert_eq!(lap_index(&rat(1, 9)).unwrap(), Lap::Increasing(0));
        assert_eq!(lap_index(&rat(1, 1)).unwrap(), Lap::Increasing(4));
        assert!(lap_index(&rat(-1, 9)).is_err());
    }

    #[test]
    fn base_map_examples() {
        assert_eq!(base_f(&rat(62, 81)).unwrap(), rat(8, 9));
        assert_eq!(base_f(&rat(1, 9)).unwrap(), rat(1, 1));
        assert_eq!(base_f(&rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(base_f(&rat(3, 18)).unwrap(), rat(1, 2));
        assert_eq!(base_f(&embed_e(&pt("42^inf"))).unwrap(), rat(1, 2));
    }

    #[test]
    fn conjugacy_on_sample_points() {
        let samples =
            ["0^inf", "340^inf", "31222340^inf", "42^inf", "123^inf", "4440^inf", "2^inf"];
        for s in samples {
            let p = pt(s);
            let lhs = base_f(&embed_e(&p)).unwrap();
            let rhs = embed_e(&shift_point(&p));
            assert_eq!(lhs, rhs, "f∘e = e∘σ at {s}");
        }
    }

    #[test]
    fn follower_cover_of_four_is_single_zero_cylinder() {
        let cover = follower_cover(4, 5).unwrap();
        assert_eq!(cover.entries.len(), 1);
        assert_eq!(cover.entries[0].word, vec![0; 5]);
        assert_eq!(cover.entries[0].witness, pt("0^inf"));
    }

    #[test]
    fn cover_soundness_small_depth() {
        // embedded members with in-language prefixes land inside the cover
        let cover = follower_cover(2, 4).unwrap();
        let member = pt("340^inf"); // 2 ⌢ ω₀ ∈ X
        let v = embed_e(&member);
        assert!(cover
            .entries
            .iter()
            .any(|e| e.lo <= v && v <= e.hi));
    }

    #[test]
    fn exact_distances_at_one() {
        // nearest follower points below 1: sup A₃ = 8/9, sup A₂ = 62/81,
        // sup A₀ = sup A₁ = 3/4, A₄ = {0}
        assert_eq!(dist_to_follower(&rat(1, 1), 3, 40).unwrap(), Enclosure::exact(rat(1, 9)));
        assert_eq!(dist_to_follower(&rat(1, 1), 2, 40).unwrap(), Enclosure::exact(rat(19, 81)));
        assert_eq!(dist_to_follower(&rat(1, 1), 0, 40).unwrap(), Enclosure::exact(rat(1, 4)));
        assert_eq!(dist_to_follower(&rat(1, 1), 1, 40).unwrap(), Enclosure::exact(rat(1, 4)));
        assert_eq!(dist_to_follower(&rat(1, 1), 4, 40).unwrap(), Enclosure::exact(rat(1, 1)));
    }

    #[test]
    fn exact_distances_at_members() {
        assert_eq!(dist_to_follower(&rat(0, 1), 4, 40).unwrap(), Enclosure::zero());
        for j in 0..4 {
            assert_eq!(dist_to_follower(&rat(1, 2), j, 40).unwrap(), Enclosure::zero());
        }
        // 1/2 = e(2^∞) and only 0^∞ may follow a 4
        assert_eq!(dist_to_follower(&rat(1, 2), 4, 40).unwrap(), Enclosure::exact(rat(1, 2)));
    }

    #[test]
    fn exact_distance_with_odd_digit_exit() {
        // u = 1/16 sits between e(023^∞) = 19/324 and e(030^∞) = 6/81
        let u = rat(1, 16);
        for j in 0..4 {
            assert_eq!(
                dist_to_follower(&u, j, 60).unwrap(),
                Enclosure::exact(rat(5, 1296)),
                "follower {j}"
            );
        }
        assert_eq!(dist_to_follower(&u, 4, 60).unwrap(), Enclosure::exact(rat(1, 16)));
    }

    #[test]
    fn periodic_code_membership() {
        // e(01 01 01 …) has a purely periodic 4-free code: in A_j for j ≤ 3
        // e(0101…) = Σ 2/9^{2k+2} = (2/81)/(1−1/81)·… = 1/40
        let u = rat(1, 40);
        assert_eq!(dist_to_follower(&u, 0, 60).unwrap(), Enclosure::zero());
        assert_eq!(dist_to_follower(&u, 3, 60).unwrap(), Enclosure::zero());
    }

    #[test]
    fn in_b_examples() {
        assert_eq!(in_b_certified(&rat(0, 1), 4, 20).unwrap(), Certainty::Yes);
        assert_eq!(in_b_certified(&rat(1, 1), 4, 20).unwrap(), Certainty::No);
        assert_eq!(in_b_certified(&rat(1, 1), 3, 20).unwrap(), Certainty::Yes);
        // four-way tie at 1/16: every i ≤ 3 certifies
        for i in 0..4 {
            assert_eq!(in_b_certified(&rat(1, 16), i, 60).unwrap(), Certainty::Yes, "i={i}");
        }
        assert_eq!(in_b_certified(&rat(1, 16), 4, 60).unwrap(), Certainty::No);
    }

    #[test]
    fn enclosure_soundness_against_known_members() {
        // true distances of known exact members lie inside the enclosures
        let member = embed_e(&pt("31222340^inf")); // ∈ A₃ (ω₁ follows a 3? no — follows 3: 3⌢ω₁? check: 3⌢31222340^inf = "331…" not in X)
        // 31222340^inf = ω₁ ∈ X; its predecessors are {2}, so e(ω₁) ∈ A₂
        let d2 = dist_to_follower(&member, 2, 60).unwrap();
        assert!(d2.contains(&Rational::zero()));
        assert!(d2.is_exact());
    }

    #[test]
    fn rational_string_roundtrip() {
        let r = rat(-62, 81);
        let s = rat_to_string(&r);
        assert_eq!(s, "-62/81");
        assert_eq!(rat_from_string(&s).unwrap(), r);
    }
}
