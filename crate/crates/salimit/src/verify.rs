//! Runnable invariant suites. Each suite exercises the certified contracts
//! of one module at configurable depth and reports one line per check; the
//! CLI `verify` command drives these, and the acceptance tests pin the
//! deeper parameter choices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{general_embed, FullShiftLanguage, TreeShiftLanguage};
use crate::error::{Error, Result};
use crate::interval::{
    base_f, dist_to_follower, embed_e, follower_cover, in_b_certified, rat, Certainty, Lap,
    Rational,
};
use crate::oracle::FactorOracle;
use crate::orbits::{
    backward_segments_collect, convergence_check, natext_metric, salpha_prefix_approx,
    verify_structure, witness_orbit,
};
use crate::square::{
    apply_f, embed_point, phi, verify_phi_properties, PhiSamples, SquarePoint, YCoord,
};
use crate::subshift::{
    member_point, member_word, omega, parse_symbols, predecessor_symbols, shift_exponent,
    shift_point, successor_symbols, word_metric, ParseOutcome, SymbolicPoint,
};
use crate::words::{builtin_pairs, enum_word, word_rank, FiniteWord};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VerifyParams {
    /// Scales the expensive checks down when set.
    pub fast: bool,
    /// Depth used by the interval and square suites.
    pub depth: usize,
    /// Node budget for orbit enumerations.
    pub budget: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { fast: false, depth: 6, budget: 1_000_000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(checks: &mut Vec<CheckResult>, name: &str, passed: bool, detail: String) {
    checks.push(CheckResult { name: name.to_string(), passed, detail });
}

pub fn run_suite(suite: &str, params: &VerifyParams) -> Result<Vec<SuiteReport>> {
    match suite {
        "words" => Ok(vec![words_suite(params)]),
        "subshift" => Ok(vec![subshift_suite(params)]),
        "orbits" => Ok(vec![orbits_suite(params)]),
        "interval" => Ok(vec![interval_suite(params)]),
        "square" => Ok(vec![square_suite(params)]),
        "all" => Ok(vec![
            words_suite(params),
            subshift_suite(params),
            orbits_suite(params),
            interval_suite(params),
            square_suite(params),
        ]),
        other => Err(Error::Precondition(format!("unknown suite {other:?}"))),
    }
}

pub fn words_suite(params: &VerifyParams) -> SuiteReport {
    let mut checks = Vec::new();
    let n = if params.fast { 2_000 } else { 10_000 };

    let inverse = (0..n).all(|i| word_rank(&enum_word(i)) == i.into());
    check(&mut checks, "enumeration-rank-inverse", inverse, format!("checked {n} ranks"));

    let prefix_total = (0..n.min(3_000)).all(|i| {
        let w = enum_word(i);
        (0..w.len()).all(|k| {
            let p = w.initial_segment(k);
            enum_word(u64::try_from(word_rank(&p)).expect("small")) == p
        })
    });
    check(&mut checks, "prefix-closure-totality", prefix_total, "initial segments enumerate".into());

    // ultrametric inequality on random triples
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ultra = true;
    for _ in 0..if params.fast { 200 } else { 2_000 } {
        let mut sample = || {
            let len = rng.gen_range(0..8);
            let prefix: Vec<u8> = (0..len).map(|_| rng.gen_range(0..5)).collect();
            SymbolicPoint::new(prefix, rng.gen_range(0..5)).expect("valid")
        };
        let (p, q, r) = (sample(), sample(), sample());
        let (dpr, dpq, dqr) =
            (word_metric(&p, &r), word_metric(&p, &q), word_metric(&q, &r));
        if dpr > dpq.max(dqr) {
            ultra = false;
        }
    }
    check(&mut checks, "metric-is-ultrametric", ultra, "random triples".into());

    SuiteReport { suite: "words".into(), checks }
}

pub fn subshift_suite(params: &VerifyParams) -> SuiteReport {
    let mut checks = Vec::new();

    let (_, t, y) = &builtin_pairs()[0];
    let om3 = omega(3, t, y).expect("certified pair");
    check(
        &mut checks,
        "omega3-block-structure",
        om3.to_string() == "3110222222223112222231222340^inf",
        om3.to_string(),
    );

    let n_max = if params.fast { 12 } else { 50 };
    let mut shift_ok = true;
    for (_, t, y) in &builtin_pairs() {
        for n in 1..=n_max {
            let mut p = omega(n, t, y).expect("certified");
            for _ in 0..shift_exponent(n, y).expect("digits") {
                p = shift_point(&p);
            }
            if p != omega(n - 1, t, y).expect("certified") {
                shift_ok = false;
            }
        }
    }
    check(
        &mut checks,
        "shift-exponent-identity",
        shift_ok,
        format!("both built-in pairs, n ≤ {n_max}"),
    );

    let max_len = if params.fast { 5 } else { 6 };
    let oracle = FactorOracle::build(max_len);
    let mut agree = true;
    let mut buf = Vec::new();
    fn walk(buf: &mut Vec<u8>, len: usize, oracle: &FactorOracle, agree: &mut bool) {
        if buf.len() == len {
            if member_word(buf) != oracle.member(buf) {
                *agree = false;
            }
            return;
        }
        for a in 0..5 {
            buf.push(a);
            walk(buf, len, oracle, agree);
            buf.pop();
        }
    }
    for len in 1..=max_len {
        walk(&mut buf, len, &oracle, &mut agree);
    }
    check(
        &mut checks,
        "language-oracle-equivalence",
        agree,
        format!("all words of length ≤ {max_len}"),
    );

    // surjectivity shadow at small length
    let len_cap = if params.fast { 6 } else { 8 };
    let mut surjective = true;
    fn walk_lang(buf: &mut Vec<u8>, cap: usize, ok: &mut bool) {
        if !member_word(buf) {
            return;
        }
        if !buf.is_empty() {
            let succ = (0..5).any(|a| {
                buf.push(a);
                let m = member_word(buf);
                buf.pop();
                m
            });
            let pred = (0..5).any(|a| {
                let mut v = Vec::with_capacity(buf.len() + 1);
                v.push(a);
                v.extend_from_slice(buf);
                member_word(&v)
            });
            if !succ || !pred {
                *ok = false;
            }
        }
        if buf.len() < cap {
            for a in 0..5 {
                buf.push(a);
                walk_lang(buf, cap, ok);
                buf.pop();
            }
        }
    }
    walk_lang(&mut Vec::new(), len_cap, &mut surjective);
    check(
        &mut checks,
        "language-surjectivity-shadow",
        surjective,
        format!("every word of length ≤ {len_cap} extends both ways"),
    );

    let spot = predecessor_symbols(&SymbolicPoint::omega0()).map(|s| s == [2].into());
    check(
        &mut checks,
        "omega0-predecessor",
        spot.unwrap_or(false),
        "only a 2 precedes ω₀".into(),
    );
    let succ = successor_symbols(&FiniteWord::from_symbols(&[3, 4]).expect("valid"))
        .map(|s| s == [0].into());
    check(&mut checks, "post-terminal-successors", succ.unwrap_or(false), "34 → {0}".into());

    // parses of terminal words are unique
    let mut unique = true;
    fn walk_parse(buf: &mut Vec<u8>, len: usize, ok: &mut bool) {
        if buf.len() == len {
            if buf.windows(2).any(|w| w == [3, 4]) {
                if let ParseOutcome::Parses(v) = parse_symbols(buf) {
                    if v.len() != 1 {
                        *ok = false;
                    }
                }
            }
            return;
        }
        for a in 0..5 {
            buf.push(a);
            walk_parse(buf, len, ok);
            buf.pop();
        }
    }
    walk_parse(&mut Vec::new(), if params.fast { 5 } else { 6 }, &mut unique);
    check(&mut checks, "terminal-parse-determinism", unique, "words containing 34".into());

    SuiteReport { suite: "subshift".into(), checks }
}

pub fn orbits_suite(params: &VerifyParams) -> SuiteReport {
    let mut checks = Vec::new();
    let depth = if params.fast { 10 } else { 14 };

    let run = backward_segments_collect(
        &SymbolicPoint::omega0(),
        depth,
        params.budget,
        params.budget,
    )
    .expect("ω₀ is a member");
    check(
        &mut checks,
        "backward-enumeration-complete",
        run.complete,
        format!("depth {depth}: {} segments, {} nodes", run.segments.len(), run.nodes),
    );

    let mut segment_invariant = true;
    let mut structure = true;
    for seg in &run.segments {
        if crate::orbits::OrbitSegment::from_points(seg.points().to_vec()).is_err() {
            segment_invariant = false;
        }
        match verify_structure(seg) {
            Ok(report) => {
                if !report.all_true() {
                    structure = false;
                }
            }
            Err(_) => structure = false,
        }
    }
    check(&mut checks, "segment-invariant-recheck", segment_invariant, "independent validation".into());
    check(&mut checks, "structure-flags-all-true", structure, "levels and prefixes compatible".into());

    let (_, t, y) = &builtin_pairs()[0];
    let seg = witness_orbit(t, y, if params.fast { 3 } else { 5 }).expect("certified");
    let endpoint_prefix = seg.endpoint().initial_symbols(4);
    let k = 4.min(seg.depth());
    let probe = salpha_prefix_approx(k, seg.depth(), params.budget);
    let witnessed = probe
        .map(|set| set.contains(&FiniteWord::from_symbols(&endpoint_prefix[..k]).expect("ok")))
        .unwrap_or(false);
    check(
        &mut checks,
        "salpha-probe-reproduces-witness",
        witnessed,
        "witness-orbit endpoint prefix appears in the probe".into(),
    );

    let full = &builtin_pairs()[1];
    let other = witness_orbit(&full.1, &full.2, if params.fast { 3 } else { 5 }).expect("ok");
    let m = seg.depth().min(other.depth());
    let mut monotone = true;
    let mut prev = BigRational::zero();
    for trunc in 0..=m {
        let (d, bound) = natext_metric(&seg, &other, trunc).expect("depths fit");
        let (d_full, _) = natext_metric(&seg, &other, m).expect("depths fit");
        if d < prev || &d_full - &d > bound {
            monotone = false;
        }
        prev = d;
    }
    check(&mut checks, "natext-truncation-monotone", monotone, "bounded tails".into());

    let mut conv = true;
    for (_, t, y) in &builtin_pairs() {
        let ds = convergence_check(t, y, if params.fast { 10 } else { 20 }).expect("certified");
        for (n, d) in ds.iter().enumerate() {
            if d > &BigRational::new(BigInt::one(), BigInt::one() << (n + 1)) {
                conv = false;
            }
        }
    }
    check(&mut checks, "convergence-bound", conv, "d(ω_n, code point) ≤ 2^{-(n+1)}".into());

    SuiteReport { suite: "orbits".into(), checks }
}

pub fn interval_suite(params: &VerifyParams) -> SuiteReport {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = if params.fast { 200 } else { 1_000 };

    let mut conjugate = true;
    let mut ordered = true;
    let mut prev: Option<(SymbolicPoint, Rational)> = None;
    for _ in 0..n {
        let len = rng.gen_range(0..12);
        let prefix: Vec<u8> = (0..len).map(|_| rng.gen_range(0..5)).collect();
        let p = SymbolicPoint::new(prefix, rng.gen_range(0..5)).expect("valid");
        let x = embed_e(&p);
        if base_f(&x).expect("in unit") != embed_e(&shift_point(&p)) {
            conjugate = false;
        }
        if let Some((q, xq)) = prev {
            // order embedding: lexicographic comparison transfers
            let lex = (0..)
                .map(|k| (p.symbol_at(k), q.symbol_at(k)))
                .find(|(a, b)| a != b)
                .map(|(a, b)| a.cmp(&b));
            if let Some(ord) = lex {
                if x.cmp(&xq) != ord {
                    ordered = false;
                }
            } else if x != xq {
                ordered = false;
            }
        }
        prev = Some((p, x));
    }
    check(&mut checks, "conjugacy-f-e", conjugate, format!("{n} random points"));
    check(&mut checks, "order-embedding", ordered, "lexicographic order transfers".into());

    let depth = params.depth.clamp(2, 6);
    let mut sound = true;
    for i in 0..5u8 {
        let cover = follower_cover(i, depth).expect("depth ≥ 1");
        for entry in cover.entries.iter().step_by(7) {
            let v = embed_e(&entry.witness);
            if !(entry.lo <= v && v <= entry.hi) {
                sound = false;
            }
            if !member_point(&entry.witness.prepend(i)) {
                sound = false;
            }
        }
    }
    check(&mut checks, "cover-witness-soundness", sound, format!("depth {depth} covers"));

    // enclosure soundness at points of known exact distance
    let known = [
        (rat(0, 1), 4u8, rat(0, 1)),
        (rat(1, 1), 4, rat(1, 1)),
        (rat(1, 1), 3, rat(1, 9)),
        (rat(1, 2), 2, rat(0, 1)),
        (rat(17, 18), 3, rat(17, 18) - rat(8, 9)),
    ];
    let mut enclosed = true;
    for (x, i, truth) in &known {
        let e = dist_to_follower(x, *i, 40).expect("domain");
        if !e.contains(truth) {
            enclosed = false;
        }
    }
    check(&mut checks, "distance-enclosure-soundness", enclosed, "known exact distances".into());

    // decision stability across depths
    let mut stable = true;
    for k in 0..=16 {
        let x = rat(k, 16);
        for i in 0..5u8 {
            let mut verdicts = Vec::new();
            for d in [4usize, 8, 20, 40] {
                verdicts.push(in_b_certified(&x, i, d).expect("domain"));
            }
            let yes = verdicts.iter().any(|v| *v == Certainty::Yes);
            let no = verdicts.iter().any(|v| *v == Certainty::No);
            if yes && no {
                stable = false;
            }
        }
    }
    check(&mut checks, "membership-decision-stability", stable, "grid times depths".into());

    // covering property: some strip certifies at every grid point
    let mut covered = true;
    for k in 0..=32 {
        let x = rat(k, 32);
        let any = (0..5u8).any(|i| {
            matches!(in_b_certified(&x, i, 40), Ok(Certainty::Yes | Certainty::Unknown))
        });
        if !any {
            covered = false;
        }
    }
    check(&mut checks, "strips-cover-the-interval", covered, "no point rejects all strips".into());

    SuiteReport { suite: "interval".into(), checks }
}

pub fn square_suite(params: &VerifyParams) -> SuiteReport {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let n = if params.fast { 60 } else { 200 };

    // exact semiconjugacy on members
    let mut semiconjugate = true;
    let mut into_square = true;
    for k in 0..n {
        let p = if k % 4 == 0 {
            let (_, t, y) = &builtin_pairs()[0];
            let seg = witness_orbit(t, y, 3).expect("certified");
            seg.points()[k % seg.points().len()].clone()
        } else {
            let len = rng.gen_range(0..10);
            let prefix: Vec<u8> = (0..len).map(|_| rng.gen_range(0..4)).collect();
            SymbolicPoint::new(prefix, rng.gen_range(0..4)).expect("valid")
        };
        debug_assert!(member_point(&p));
        let img = apply_f(&embed_point(&p), params.depth.max(8)).expect("domain");
        if img != embed_point(&shift_point(&p)) {
            semiconjugate = false;
        }
        let e = img.y.enclosure();
        if e.lo().is_negative() || e.hi() > &Rational::one() {
            into_square = false;
        }
    }
    check(&mut checks, "semiconjugacy-on-members", semiconjugate, format!("{n} members"));
    check(&mut checks, "images-stay-in-square", into_square, "second coordinates in [0,1]".into());

    // fiber maps: affine, increasing, fix 1, land in [phi, 1]
    let mut fiber = true;
    for k in 0..10 {
        let x = rat(2 * k + 1, 32);
        let pv = phi(&x, params.depth.max(6)).expect("domain");
        let top = apply_f(&SquarePoint::exact(x.clone(), rat(1, 1)), 6).expect("domain");
        if top.y != YCoord::Exact(rat(1, 1)) {
            fiber = false;
        }
        let bottom = apply_f(&SquarePoint::exact(x.clone(), rat(0, 1)), 6).expect("domain");
        let be = bottom.y.enclosure();
        if be.lo() < pv.value.lo() || be.hi() > pv.value.hi() {
            fiber = false;
        }
    }
    check(&mut checks, "fiber-maps-affine-fix-one", fiber, "g_x(1) = 1, g_x(0) = φ(x)".into());

    let samples = PhiSamples {
        members: vec![
            "02^inf".parse().expect("point"),
            SymbolicPoint::omega0(),
            "31222340^inf".parse().expect("point"),
        ],
        entering: vec![(4, "2^inf".parse().expect("point")), (0, SymbolicPoint::omega0())],
        grid: if params.fast { 4 } else { 8 },
    };
    let report = verify_phi_properties(&samples, params.depth.max(8)).expect("samples valid");
    check(
        &mut checks,
        "phi-three-properties",
        report.all_pass(),
        format!("{} verdicts, {} unknowns", report.verdicts.len(), report.unknowns),
    );

    // generic construction agrees with the hand-built one
    let map = general_embed(5, TreeShiftLanguage).expect("language ok");
    let mut agrees = true;
    for k in 0..if params.fast { 20 } else { 60 } {
        let x = rat(2 * k + 1, 128);
        if map.base_map(&x).expect("domain") != base_f(&x).expect("domain") {
            agrees = false;
        }
        let g = map.phi(&x, 4).expect("domain");
        let h = phi(&x, 30).expect("domain");
        if !g.intersects(&h.value) {
            agrees = false;
        }
    }
    let full = general_embed(2, FullShiftLanguage(2)).expect("full shift");
    for k in 0..=24 {
        let x = rat(k, 24);
        if let Ok(Lap::Increasing(_)) = full.lap_index(&x) {
            let ph = full.phi(&x, 4).expect("domain");
            if !(ph.is_exact() && ph.hi().is_zero()) {
                agrees = false;
            }
        }
    }
    check(&mut checks, "generic-embedding-agreement", agrees, "r = 5 and r = 2 cases".into());

    SuiteReport { suite: "square".into(), checks }
}
