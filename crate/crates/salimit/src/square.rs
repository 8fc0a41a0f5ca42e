//! The gap function φ, the skew product `F(x, y) = (f(x), g_x(y))` on the
//! unit square, the embedding of the subshift as a totally invariant subset
//! of the x-axis, preimage construction, and figure-data emission.
//!
//! On an increasing lap `I_i` the gap function is `φ(x) = ½ d(f(x), B_i)`,
//! where `B_i` collects the points at least as close to the embedded
//! follower set `A_i` as to every other follower set. `B_i` is never stored;
//! its distances are certified through follower-set distances: if `A_i` is
//! (weakly) nearest, the distance is exactly zero, and otherwise the
//! 1-Lipschitz bound `d(u, B_i) ≥ (d(u, A_i) − min_j d(u, A_j))/2` applies,
//! with `d(u, A_i)` as upper bound since `A_i ⊆ B_i`.
//!
//! On a decreasing lap `[l, r]` the extension
//! `φ(t) = min(½, L(t) + min(t−l, r−t))` is used, where `L` interpolates the
//! endpoint values inherited from the neighbouring increasing laps. Both
//! endpoint values are exact rationals: `f(r) = 0` lies in every `B_j`
//! (zero is in every follower set), and `f(l) = 1` has exact distance to
//! each `B_i` computed by [`max_b_top`], an exact piecewise-linear sweep
//! over the certified follower structure near the top of the interval.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{
    base_f, dist_to_follower, embed_e, in_b_certified, lap_index, rat, rat_to_string, Certainty,
    Enclosure, Lap, Rational,
};
use crate::subshift::{member_point, SymbolicPoint};

/// Second coordinates are exact when the gap function is certified exactly,
/// enclosed otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum YCoord {
    Exact(#[serde(with = "rat_string")] Rational),
    Enclosed(Enclosure),
}

mod rat_string {
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
        crate::interval::rat_from_string(&s).map_err(serde::de::Error::custom)
    }
}

impl YCoord {
    pub fn enclosure(&self) -> Enclosure {
        match self {
            YCoord::Exact(v) => Enclosure::exact(v.clone()),
            YCoord::Enclosed(e) => e.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarePoint {
    #[serde(with = "rat_string")]
    pub x: Rational,
    pub y: YCoord,
}

impl SquarePoint {
    pub fn exact(x: Rational, y: Rational) -> Self {
        SquarePoint { x, y: YCoord::Exact(y) }
    }
}

/// A certified value of the gap function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiValue {
    pub value: Enclosure,
    pub lap: Lap,
    pub depth: usize,
}

impl PhiValue {
    pub fn is_exact_zero(&self) -> bool {
        self.value.is_exact() && self.value.hi().is_zero()
    }
}

fn in_unit(x: &Rational) -> bool {
    !x.is_negative() && x <= &Rational::one()
}

/// Certified distance from `u` to `B_i`.
pub fn dist_to_b(u: &Rational, i: u8, depth: usize) -> Result<Enclosure> {
    if !in_unit(u) {
        return Err(Error::OutOfDomain);
    }
    let dists: Vec<Enclosure> =
        (0..5).map(|j| dist_to_follower(u, j, depth)).collect::<Result<_>>()?;
    let di = &dists[i as usize];
    // u ∈ B_i certified: d(u, A_i) weakly minimal
    if (0..5).all(|j| j == i as usize || di.hi() <= dists[j].lo()) {
        return Ok(Enclosure::zero());
    }
    // Nearby points v stay outside B_i while the nearest other follower set
    // undercuts A_i: d(v, A_i) ≥ lo_i − |v−u| and d(v, A_j) ≤ hi_j + |v−u|,
    // so every v within (lo_i − min_j hi_j)/2 of u has d(v,A_j) < d(v,A_i).
    let s = (0..5)
        .filter(|&j| j != i as usize)
        .map(|j| dists[j].hi().clone())
        .min()
        .expect("five follower sets");
    let lo = ((di.lo() - &s) / rat(2, 1)).max(Rational::zero());
    let hi = di.hi().clone(); // A_i ⊆ B_i
    Enclosure::new(lo, hi)
}

// ---------------------------------------------------------------------------
// Exact top-of-interval structure of the B_i
// ---------------------------------------------------------------------------

/// Bracket of the follower set `A_j` around a value `v`: the nearest set
/// point strictly below, whether `v` itself lies in the set, and the nearest
/// point strictly above (`None` when the set has no point on that side).
struct Bracket {
    below: Rational,
    at: bool,
    above: Option<Rational>,
}

fn bracket_strict(j: u8, v: &Rational, cap: usize) -> Result<Bracket> {
    let descent = crate::interval::descend(v, j, cap);
    let left = descent
        .best_left
        .map(|w| embed_e(&crate::interval::lexmax_point(j, &w)));
    let right = descent.best_right.map(|w| crate::interval::cylinder_low(&w));
    match descent.outcome {
        crate::interval::DescentOutcome::AtPoint { member, tail, .. } => {
            if member && tail >= 1 {
                // a 4-free constant tail ≥ 1 has in-language siblings at
                // every depth: the set accumulates at v from below
                return Err(Error::CertificationFailed(format!(
                    "follower set {j} accumulates at {}",
                    rat_to_string(v)
                )));
            }
            Ok(Bracket {
                below: left.ok_or_else(|| {
                    Error::CertificationFailed("no follower mass below the bracket point".into())
                })?,
                at: member,
                above: right,
            })
        }
        crate::interval::DescentOutcome::CycleMember => Err(Error::CertificationFailed(format!(
            "follower set {j} accumulates at the non-representable point {}",
            rat_to_string(v)
        ))),
        crate::interval::DescentOutcome::Exited => Ok(Bracket {
            below: left.ok_or_else(|| {
                Error::CertificationFailed("no follower mass below the bracket point".into())
            })?,
            at: false,
            above: right,
        }),
        crate::interval::DescentOutcome::CapExceeded { .. } => Err(Error::CertificationFailed(
            format!("digit descent for follower {j} exceeded depth {cap}"),
        )),
    }
}

/// The largest point of `B_i` (exact), for `i ≤ 3`.
///
/// Works top-down: on each interval between consecutive certified follower
/// points all five distance functions are piecewise affine with breakpoints
/// only at bracket midpoints, so the condition
/// `d_i(w) ≤ d_j(w) for all j` is decided exactly per subsegment and the
/// supremum of its truth set is an exact rational. The sweep needs only the
/// follower structure above 3/4 and terminates after a few steps.
pub fn max_b_top(i: u8) -> Result<Rational> {
    if i > 3 {
        return Err(Error::Precondition(
            "the top sweep is defined for the increasing laps 0..=3".into(),
        ));
    }
    static CACHE: OnceLock<[OnceLock<Rational>; 4]> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache[i as usize].get() {
        return Ok(v.clone());
    }
    let computed = max_b_top_sweep(i)?;
    let _ = cache[i as usize].set(computed.clone());
    Ok(computed)
}

fn max_b_top_sweep(i: u8) -> Result<Rational> {
    let cap = 64;
    let mut v = Rational::one();
    for _ in 0..16 {
        let brackets: Vec<Bracket> =
            (0..5).map(|j| bracket_strict(j, &v, cap)).collect::<Result<_>>()?;
        let a = brackets.iter().map(|b| b.below.clone()).max().expect("five brackets");

        // distance functions on (a, v]: d_j(w) = min(w − L_j, R_j − w)
        let l: Vec<Rational> = brackets.iter().map(|b| b.below.clone()).collect();
        let r: Vec<Option<Rational>> = brackets
            .iter()
            .map(|b| if b.at { Some(v.clone()) } else { b.above.clone() })
            .collect();
        let d = |j: usize, w: &Rational| -> Rational {
            let down = w - &l[j];
            match &r[j] {
                Some(rj) => down.min(rj - w),
                None => down,
            }
        };

        // breakpoints: bracket midpoints interior to (a, v)
        let mut cuts: Vec<Rational> = vec![a.clone(), v.clone()];
        for j in 0..5 {
            if let Some(rj) = &r[j] {
                let mid = (&l[j] + rj) / rat(2, 1);
                if mid > a && mid < v {
                    cuts.push(mid);
                }
            }
        }
        cuts.sort();
        cuts.dedup();

        // scan subsegments from the top; inside each all d_j are affine
        for pair in cuts.windows(2).rev() {
            let (s_lo, s_hi) = (&pair[0], &pair[1]);
            // feasible sub-interval of {w : d_i(w) ≤ d_j(w) ∀ j}
            let mut feas_lo = s_lo.clone();
            let mut feas_hi = s_hi.clone();
            let mut empty = false;
            for j in 0..5 {
                if j == i as usize {
                    continue;
                }
                let h_lo = d(j, s_lo) - d(i as usize, s_lo);
                let h_hi = d(j, s_hi) - d(i as usize, s_hi);
                if !h_lo.is_negative() && !h_hi.is_negative() {
                    continue;
                }
                if h_lo.is_negative() && h_hi.is_negative() {
                    empty = true;
                    break;
                }
                // single sign change of an affine function
                let root = s_lo + (s_hi - s_lo) * &h_lo / (&h_lo - &h_hi);
                if h_lo.is_negative() {
                    feas_lo = feas_lo.max(root); // feasible above the root
                } else {
                    feas_hi = feas_hi.min(root); // feasible below the root
                }
            }
            if !empty && feas_lo <= feas_hi {
                return Ok(feas_hi);
            }
        }
        v = a;
    }
    Err(Error::CertificationFailed(format!("top sweep for B_{i} did not settle")))
}

/// Exact value of φ at the right endpoint of the increasing lap `I_i`
/// (equivalently the left endpoint of the decreasing lap to its right):
/// `½ d(1, B_i)`.
pub fn dec_lap_left_phi(i: u8) -> Result<Rational> {
    Ok((Rational::one() - max_b_top(i)?) / rat(2, 1))
}

/// The gap function. Exact (width-zero) on decreasing laps and at certified
/// points of the base interval; an enclosure otherwise.
pub fn phi(x: &Rational, depth: usize) -> Result<PhiValue> {
    if !in_unit(x) {
        return Err(Error::OutOfDomain);
    }
    match lap_index(x)? {
        lap @ Lap::Increasing(i) => {
            let u = base_f(x)?;
            let enc = dist_to_b(&u, i, depth)?.scale(&rat(1, 2));
            Ok(PhiValue { value: enc, lap, depth })
        }
        lap @ Lap::Decreasing(i) => {
            let l = rat(2 * i as i64 + 1, 9);
            let r = rat(2 * i as i64 + 2, 9);
            // affine interpolation of the endpoint values φ(l), φ(r) = 0
            let phi_l = dec_lap_left_phi(i)?;
            let interp = phi_l * (&r - x) * rat(9, 1);
            let bump = (x - &l).min(&r - x);
            let value = (interp + bump).min(rat(1, 2));
            Ok(PhiValue { value: Enclosure::exact(value), lap, depth })
        }
    }
}

/// The embedding of a symbol point onto the x-axis of the square.
pub fn embed_point(p: &SymbolicPoint) -> SquarePoint {
    SquarePoint::exact(embed_e(p), Rational::zero())
}

/// One application of the skew product `F(x, y) = (f(x), φ(x) + y(1−φ(x)))`.
///
/// The fiber maps are affine, increasing, fix 1, and send `[0,1]` onto
/// `[φ(x), 1]`; the second coordinate is exact whenever φ is certified
/// exactly, and `y = 1` maps to exactly 1 regardless.
pub fn apply_f(p: &SquarePoint, depth: usize) -> Result<SquarePoint> {
    if !in_unit(&p.x) {
        return Err(Error::OutOfDomain);
    }
    let fx = base_f(&p.x)?;
    let y_enc = p.y.enclosure();
    if !(!y_enc.lo().is_negative() && y_enc.hi() <= &Rational::one()) {
        return Err(Error::OutOfDomain);
    }
    if let YCoord::Exact(y) = &p.y {
        if y.is_one() {
            return Ok(SquarePoint { x: fx, y: YCoord::Exact(Rational::one()) });
        }
    }
    let pv = phi(&p.x, depth)?;
    let g = |ph: &Rational, y: &Rational| ph + y * (Rational::one() - ph);
    let y = match (&p.y, pv.value.is_exact()) {
        (YCoord::Exact(y), true) => YCoord::Exact(g(pv.value.lo(), y)),
        _ => {
            // g is monotone in both arguments on the square
            let lo = g(pv.value.lo(), y_enc.lo());
            let hi = g(pv.value.hi(), y_enc.hi());
            YCoord::Enclosed(Enclosure::new(lo, hi)?)
        }
    };
    let out = SquarePoint { x: fx, y };
    let e = out.y.enclosure();
    debug_assert!(!e.lo().is_negative() && e.hi() <= &Rational::one());
    Ok(out)
}

/// A preimage of `target` under the skew product: locates a strip whose
/// `B`-membership certifies at `u`, inverts the increasing lap exactly, and
/// solves the affine fiber map. The first coordinate is exact; the second is
/// exact whenever the strip certifies `Yes`.
pub fn preimage_point(target: &SquarePoint, depth: usize) -> Result<SquarePoint> {
    let u = &target.x;
    if !in_unit(u) {
        return Err(Error::OutOfDomain);
    }
    let YCoord::Exact(v) = &target.y else {
        return Err(Error::Precondition("preimage targets carry exact coordinates".into()));
    };
    if !in_unit(v) {
        return Err(Error::OutOfDomain);
    }
    let invert = |i: u8| -> Rational { (u + rat(2 * i as i64, 1)) / rat(9, 1) };
    let mut unknowns: Vec<u8> = Vec::new();
    for i in 0..5u8 {
        match in_b_certified(u, i, depth)? {
            Certainty::Yes => {
                // φ is exactly zero at the inverted point, so the fiber map
                // is the identity
                return Ok(SquarePoint::exact(invert(i), v.clone()));
            }
            Certainty::Unknown => unknowns.push(i),
            Certainty::No => {}
        }
    }
    // fall back to the best unresolved strip
    let tol = BigRational::new(BigInt::one(), BigInt::from(9).pow(depth as u32));
    for i in unknowns {
        let x = invert(i);
        let pv = phi(&x, depth)?;
        let mid = (pv.value.lo() + pv.value.hi()) / rat(2, 1);
        let denom = Rational::one() - &mid;
        let y = ((v - &mid) / denom).max(Rational::zero()).min(Rational::one());
        let g = |ph: &Rational| ph + &y * (Rational::one() - ph);
        let residual =
            (g(pv.value.lo()) - v).abs().max((g(pv.value.hi()) - v).abs());
        if residual <= tol {
            return Ok(SquarePoint::exact(x, y));
        }
    }
    Err(Error::CertificationFailed(format!(
        "no strip reaches tolerance {} at depth {depth}",
        rat_to_string(&tol)
    )))
}

// ---------------------------------------------------------------------------
// Property verification
// ---------------------------------------------------------------------------

/// Samples for the three defining properties of the gap function.
#[derive(Debug, Clone, Default)]
pub struct PhiSamples {
    /// Points of the subshift (membership re-verified): φ must vanish
    /// exactly at their embeddings.
    pub members: Vec<SymbolicPoint>,
    /// Pairs `(a, p)` with `p` in the subshift but `a ⌢ p` outside it: the
    /// embedding of `a ⌢ p` maps into the embedded subshift, so φ must be
    /// certified positive there.
    pub entering: Vec<(u8, SymbolicPoint)>,
    /// Grid resolution `g`: preimages are constructed for all `(g+1)²`
    /// targets `(k/g, m/g)`.
    pub grid: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiVerdict {
    pub kind: String,
    pub item: String,
    pub pass: bool,
    pub unknown: bool,
    pub depth: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiPropertyReport {
    pub verdicts: Vec<PhiVerdict>,
    pub unknowns: usize,
    pub failures: usize,
}

impl PhiPropertyReport {
    pub fn all_pass(&self) -> bool {
        self.failures == 0 && self.unknowns == 0
    }
}

pub fn verify_phi_properties(samples: &PhiSamples, depth: usize) -> Result<PhiPropertyReport> {
    let mut verdicts = Vec::new();

    for p in &samples.members {
        let mut pass = false;
        let detail = if !member_point(p) {
            "sample is not a member".to_string()
        } else {
            let pv = phi(&embed_e(p), depth)?;
            pass = pv.is_exact_zero();
            format!("phi = {}", pv.value)
        };
        verdicts.push(PhiVerdict {
            kind: "vanishes-on-members".into(),
            item: p.to_string(),
            pass,
            unknown: false,
            depth,
            detail,
        });
    }

    for (a, p) in &samples.entering {
        let q = p.prepend(*a);
        let mut pass = false;
        let mut unknown = false;
        let detail;
        if !member_point(p) || member_point(&q) {
            detail = "not an entering pair".to_string();
        } else {
            let pv = phi(&embed_e(&q), depth)?;
            pass = pv.value.lo().is_positive();
            unknown = !pass && !pv.value.hi().is_zero();
            detail = format!("phi = {}", pv.value);
        }
        verdicts.push(PhiVerdict {
            kind: "positive-on-entering".into(),
            item: q.to_string(),
            pass,
            unknown,
            depth,
            detail,
        });
    }

    if samples.grid > 0 {
        let g = samples.grid as i64;
        let tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000));
        for k in 0..=g {
            for m in 0..=g {
                let target = SquarePoint::exact(rat(k, g), rat(m, g));
                let (pass, unknown, detail) = match preimage_point(&target, depth) {
                    Ok(pre) => {
                        let img = apply_f(&pre, depth)?;
                        let first_exact = img.x == target.x;
                        let e = img.y.enclosure();
                        let YCoord::Exact(v) = &target.y else { unreachable!() };
                        let residual = (e.lo() - v).abs().max((e.hi() - v).abs());
                        let ok = first_exact && residual <= tol;
                        (ok, false, format!("residual {}", rat_to_string(&residual)))
                    }
                    Err(e) => (false, true, e.to_string()),
                };
                verdicts.push(PhiVerdict {
                    kind: "preimage-on-grid".into(),
                    item: format!("({k}/{g}, {m}/{g})"),
                    pass,
                    unknown,
                    depth,
                    detail,
                });
            }
        }
    }

    let unknowns = verdicts.iter().filter(|v| v.unknown).count();
    let failures = verdicts.iter().filter(|v| !v.pass && !v.unknown).count();
    Ok(PhiPropertyReport { verdicts, unknowns, failures })
}

// ---------------------------------------------------------------------------
// Figure data (non-certified floats)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polyline {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Sampled images of the boundary of one of the nine vertical strips under
/// the skew product. Float output for plotting; not certified.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureData {
    pub strip: u8,
    pub resolution: u32,
    pub polylines: Vec<Polyline>,
}

fn phi_mid_f64(x: &Rational, depth: usize) -> f64 {
    let pv = phi(x, depth).expect("in-domain sample");
    let mid = (pv.value.lo() + pv.value.hi()) / rat(2, 1);
    mid.to_f64().unwrap_or(0.0)
}

pub fn figure_rectangles(strip: u8, resolution: u32) -> Result<FigureData> {
    if strip > 8 {
        return Err(Error::Precondition("strip index ranges over 0..=8".into()));
    }
    if resolution < 2 {
        return Err(Error::Precondition("resolution must be at least 2".into()));
    }
    let depth = 8;
    let n = resolution as i64;
    let xs: Vec<Rational> =
        (0..=n).map(|k| rat(strip as i64 * n + k, 9 * n)).collect();
    let fx: Vec<f64> =
        xs.iter().map(|x| base_f(x).expect("domain").to_f64().unwrap()).collect();
    let phis: Vec<f64> = xs.iter().map(|x| phi_mid_f64(x, depth)).collect();

    let bottom = Polyline {
        label: "bottom-edge-image".into(),
        points: fx.iter().zip(&phis).map(|(&a, &b)| (a, b)).collect(),
    };
    let top = Polyline {
        label: "top-edge-image".into(),
        points: fx.iter().map(|&a| (a, 1.0)).collect(),
    };
    let mut sides = Vec::new();
    for (label, idx) in [("left-edge-image", 0usize), ("right-edge-image", xs.len() - 1)] {
        let x = &xs[idx];
        let fx0 = base_f(x).expect("domain").to_f64().unwrap();
        let ph = phi_mid_f64(x, depth);
        let points = (0..=n)
            .map(|j| {
                let y = j as f64 / n as f64;
                (fx0, ph + y * (1.0 - ph))
            })
            .collect();
        sides.push(Polyline { label: label.into(), points });
    }
    let mut polylines = vec![bottom, top];
    polylines.extend(sides);
    Ok(FigureData { strip, resolution, polylines })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> SymbolicPoint {
        s.parse().unwrap()
    }

    #[test]
    fn exact_top_boundaries() {
        // values cross-checked against the geometry of the follower sets:
        // sup A₀ = sup A₁ = 3/4, sup A₂ = 62/81 (only a 2 precedes ω₀),
        // sup A₃ = 8/9 (only a 3 precedes 4⌢0^∞)
        assert_eq!(max_b_top(0).unwrap(), rat(491, 648));
        assert_eq!(max_b_top(1).unwrap(), rat(491, 648));
        assert_eq!(max_b_top(2).unwrap(), rat(67, 81));
        assert_eq!(max_b_top(3).unwrap(), rat(1, 1));
    }

    #[test]
    fn dec_lap_endpoint_values() {
        assert_eq!(dec_lap_left_phi(0).unwrap(), rat(157, 1296));
        assert_eq!(dec_lap_left_phi(1).unwrap(), rat(157, 1296));
        assert_eq!(dec_lap_left_phi(2).unwrap(), rat(7, 81));
        assert_eq!(dec_lap_left_phi(3).unwrap(), rat(0, 1));
    }

    #[test]
    fn phi_vanishes_at_members() {
        // a = e(02^∞): both a and f(a) embed members
        let a = embed_e(&pt("02^inf"));
        let pv = phi(&a, 20).unwrap();
        assert!(pv.is_exact_zero());

        let w0 = embed_e(&SymbolicPoint::omega0());
        let pv = phi(&w0, 20).unwrap();
        assert!(pv.is_exact_zero());
    }

    #[test]
    fn phi_positive_at_b() {
        // b = e(42^∞) = 17/18: not a member, but its image 1/2 embeds one
        let b = rat(17, 18);
        let pv = phi(&b, 20).unwrap();
        assert!(matches!(pv.lap, Lap::Increasing(4)));
        assert!(pv.value.lo().is_positive());
        // true value: ½ d(1/2, B₄) = ½ · ½
        assert!(pv.value.contains(&rat(1, 4)));
    }

    #[test]
    fn phi_on_decreasing_lap_is_exact() {
        let x = rat(3, 18); // interior of the first decreasing lap
        let pv = phi(&x, 8).unwrap();
        assert!(matches!(pv.lap, Lap::Decreasing(0)));
        assert!(pv.value.is_exact());
        // interpolation 157/2592 plus the interior bump 1/18
        assert_eq!(pv.value.lo(), &rat(301, 2592));

        // strictly positive inside, bounded by ½, continuous at endpoints
        let l = rat(1, 9);
        let r = rat(2, 9);
        let eps = rat(1, 10_000);
        let near_l = phi(&(&l + &eps), 8).unwrap();
        assert!(near_l.value.lo() > &Rational::zero());
        assert!(near_l.value.hi() <= &rat(1, 2));
        let at_l = phi(&l, 8).unwrap(); // tie-break: increasing lap clause
        assert!(matches!(at_l.lap, Lap::Increasing(0)));
        let drift = (near_l.value.lo() - at_l.value.hi()).abs();
        assert!(drift < rat(1, 100));
        let near_r = phi(&(&r - &eps), 8).unwrap();
        assert!(near_r.value.lo() > &Rational::zero());
        assert!(near_r.value.hi() < &rat(1, 100));
    }

    #[test]
    fn apply_examples() {
        // exact semiconjugacy at ω₀
        let p = embed_point(&SymbolicPoint::omega0());
        assert_eq!(p, SquarePoint::exact(rat(62, 81), rat(0, 1)));
        let img = apply_f(&p, 12).unwrap();
        assert_eq!(img, SquarePoint::exact(rat(8, 9), rat(0, 1)));

        // the top edge is fixed regardless of φ
        let top = SquarePoint::exact(rat(17, 18), rat(1, 1));
        let img = apply_f(&top, 6).unwrap();
        assert_eq!(img.y, YCoord::Exact(rat(1, 1)));
    }

    #[test]
    fn preimage_examples() {
        let target = SquarePoint::exact(rat(8, 9), rat(0, 1));
        let pre = preimage_point(&target, 12).unwrap();
        assert_eq!(pre, SquarePoint::exact(rat(62, 81), rat(0, 1)));
        let img = apply_f(&pre, 12).unwrap();
        assert_eq!(img, target);

        // y = 1 targets lift to y = 1
        let target = SquarePoint::exact(rat(1, 3), rat(1, 1));
        let pre = preimage_point(&target, 12).unwrap();
        assert_eq!(pre.y, YCoord::Exact(rat(1, 1)));
    }

    #[test]
    fn verify_properties_small() {
        let samples = PhiSamples {
            members: vec![pt("02^inf"), SymbolicPoint::omega0(), pt("31222340^inf")],
            entering: vec![(4, pt("2^inf")), (0, SymbolicPoint::omega0())],
            grid: 4,
        };
        let report = verify_phi_properties(&samples, 12).unwrap();
        assert!(report.all_pass(), "{:#?}", report.verdicts.iter().filter(|v| !v.pass).collect::<Vec<_>>());
    }

    #[test]
    fn figure_shapes() {
        let fig = figure_rectangles(8, 16).unwrap();
        assert_eq!(fig.polylines.len(), 4);
        let top = fig.polylines.iter().find(|p| p.label == "top-edge-image").unwrap();
        assert!(top.points.iter().all(|&(_, y)| y == 1.0));
    }
}
