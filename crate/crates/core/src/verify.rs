//! Reproducibility suites. Each suite recomputes one published claim from
//! scratch and reports pass/fail with a few lines of detail; the CLI's
//! `verify-paper` command and the acceptance tests both run them.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_prime, prime_divisors};
use crate::aut::{automorphism_group, dihedral_beta, qdr_wreath_witness, set_stabilizer};
use crate::cayley::search::{exhaustive_sweep, Positions};
use crate::cayley::{build_cayley, is_drr, normaliser_identity_check, ConnectionSet, Kind};
use crate::classify::{classify, Clause};
use crate::error::{Error, Result};
use crate::group::{enumerate_groups, ElemSet, SquarefreeGroup, Subgroup};
use crate::witness::{
    construct_case1_witness, construct_case2_witness, psl2_witness, search_witness, Strategy,
    WitnessOutcome, LADDER_BUDGET,
};
use crate::wreath::{admissible_pairs, alpha_k, check_wreath_condition, find_gen_wreath};

/// A suite: identifier, one-line claim, and whether failure is tolerated.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Suite {
    pub id: &'static str,
    pub claim: &'static str,
    pub stretch: bool,
}

pub const SUITES: &[Suite] = &[
    Suite {
        id: "dihedral-small",
        claim: "D6 and D10 are DRR-detecting (all 2^5 and 2^9 connection sets)",
        stretch: false,
    },
    Suite {
        id: "f21",
        claim: "C7:C3 is GRR-detecting but not DRR-detecting",
        stretch: false,
    },
    Suite {
        id: "d30-graph",
        claim: "D30 is GRR-detecting (all inverse-closed sets)",
        stretch: false,
    },
    Suite {
        id: "d30-digraph",
        claim: "D30 is not DRR-detecting (verified digraph witness)",
        stretch: false,
    },
    Suite {
        id: "normaliser",
        claim: "N_A(R-hat) = R-hat x| Aut(R)_S on 500 random (R, S), |R| <= 42",
        stretch: false,
    },
    Suite {
        id: "wreath-soundness",
        claim: "1000 generalised wreath products are never DRRs (|R| <= 60)",
        stretch: false,
    },
    Suite {
        id: "constructions",
        claim: "explicit GRR witnesses on C21:C2, C7:C6 and C5x(C7:C3)",
        stretch: false,
    },
    Suite {
        id: "special-automorphisms",
        claim: "wreath-type sets on D6, D10, C7:C3 and C7xD6 have nontrivial Aut(R)_S",
        stretch: false,
    },
    Suite {
        id: "classifier",
        claim: "classification agrees with exhaustive search up to order 30; one clause per group up to 110",
        stretch: false,
    },
    Suite {
        id: "psl2-11",
        claim: "a 55-vertex Cayley graph on C11:C5 with automorphism group PSL(2,11)",
        stretch: true,
    },
];

/// Outcome of one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub id: String,
    pub claim: String,
    pub stretch: bool,
    pub passed: bool,
    pub details: Vec<String>,
    pub elapsed_ms: u128,
}

/// Options shared by the suites.
#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub seed: u64,
    /// Include optional large instances.
    pub stretch: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 1,
            stretch: true,
        }
    }
}

pub fn find_suite(id: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.id == id)
}

/// Runs a suite by id. Errors inside a suite are reported as failures.
pub fn run_suite(id: &str, cfg: &Config) -> Result<SuiteReport> {
    let suite = find_suite(id).ok_or_else(|| Error::NotConfigured(format!("unknown suite {id:?}")))?;
    let start = Instant::now();
    let mut details = Vec::new();
    let outcome = match suite.id {
        "dihedral-small" => dihedral_small(&mut details),
        "f21" => f21(&mut details),
        "d30-graph" => d30_graph(&mut details),
        "d30-digraph" => d30_digraph(&mut details, cfg),
        "normaliser" => normaliser(&mut details, cfg),
        "wreath-soundness" => wreath_soundness(&mut details, cfg),
        "constructions" => constructions(&mut details, cfg),
        "special-automorphisms" => special_automorphisms(&mut details),
        "classifier" => classifier(&mut details),
        "psl2-11" => psl2(&mut details),
        _ => unreachable!(),
    };
    let passed = match outcome {
        Ok(p) => p,
        Err(e) => {
            details.push(format!("error: {e}"));
            false
        }
    };
    Ok(SuiteReport {
        id: suite.id.into(),
        claim: suite.claim.into(),
        stretch: suite.stretch,
        passed,
        details,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn grp(s: &str) -> SquarefreeGroup {
    s.parse().expect("built-in group literal")
}

fn mask_set(r: &SquarefreeGroup, mask: u64) -> ElemSet {
    ElemSet::from_iter(r.len(), (1..r.len()).filter(|&i| mask >> (i - 1) & 1 == 1))
}

fn dihedral_small(out: &mut Vec<String>) -> Result<bool> {
    let mut ok = true;
    for name in ["D6", "D10"] {
        let r = grp(name);
        let aut = automorphism_group(&r)?;
        let total = 1u64 << (r.len() - 1);
        let (mut trivial, mut regular) = (0, 0);
        for mask in 0..total {
            let set = mask_set(&r, mask);
            if !aut.stabilizer_is_trivial(&set) {
                continue;
            }
            trivial += 1;
            if is_drr(&r, &ConnectionSet::from_set(&r, set)?)? {
                regular += 1;
            }
        }
        ok &= trivial == regular;
        out.push(format!(
            "{name}: {total} sets, {trivial} with trivial Aut(R)_S, {regular} of those DRRs"
        ));
    }
    Ok(ok)
}

fn f21(out: &mut Vec<String>) -> Result<bool> {
    let r = grp("F21");
    let d = exhaustive_sweep(&r, Kind::Digraph, false)?;
    let g = exhaustive_sweep(&r, Kind::Graph, false)?;
    out.push(format!(
        "digraphs: {} orbit classes (orbit count {}), least witness {}",
        d.orbit_classes,
        d.burnside_classes,
        match &d.witness {
            Some(w) => ConnectionSet::new(&r, w.iter().copied())?.format(&r),
            None => "none".into(),
        }
    ));
    out.push(format!(
        "graphs: {} orbit classes, {} with trivial Aut(R)_S, witness {}",
        g.orbit_classes,
        g.trivial_stabilizer_classes,
        if g.witness.is_some() { "found" } else { "absent" }
    ));
    let witness_ok = match &d.witness {
        Some(w) => {
            let s = ConnectionSet::new(&r, w.iter().copied())?;
            crate::witness::WitnessCertificate::certify(&r, &s, Kind::Digraph, None, "sweep").is_ok()
        }
        None => false,
    };
    Ok(witness_ok && d.complete && d.orbit_classes == d.burnside_classes && g.certifies_detecting())
}

fn d30_graph(out: &mut Vec<String>) -> Result<bool> {
    let r = grp("D30");
    let g = exhaustive_sweep(&r, Kind::Graph, false)?;
    out.push(format!(
        "{} raw sets, {} orbit classes (orbit count {}), {} with trivial Aut(R)_S, witness {}",
        g.raw_subsets,
        g.orbit_classes,
        g.burnside_classes,
        g.trivial_stabilizer_classes,
        if g.witness.is_some() { "found" } else { "absent" }
    ));
    Ok(g.certifies_detecting())
}

fn d30_digraph(out: &mut Vec<String>, cfg: &Config) -> Result<bool> {
    let r = grp("D30");
    match search_witness(&r, Kind::Digraph, Strategy::Ladder, LADDER_BUDGET, cfg.seed)? {
        WitnessOutcome::Found(c) => {
            out.push(format!(
                "witness S = {} ({}), |Aut| = {}",
                c.s.format(&r),
                c.source,
                c.aut_order
            ));
            Ok(c.verify().is_ok())
        }
        WitnessOutcome::NonExistence(rep) => {
            out.push(format!("no witness in {} orbit classes", rep.orbit_classes));
            Ok(false)
        }
    }
}

fn groups_up_to(max: u64) -> Result<Vec<SquarefreeGroup>> {
    let mut out = Vec::new();
    for order in 1..=max {
        if crate::arith::is_squarefree(order) {
            out.extend(enumerate_groups(order)?);
        }
    }
    Ok(out)
}

fn normaliser(out: &mut Vec<String>, cfg: &Config) -> Result<bool> {
    let groups = groups_up_to(42)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = 0;
    let mut largest = 0u128;
    for _ in 0..500 {
        let r = &groups[rng.gen_range(0..groups.len())];
        let mask: u64 = rng.gen::<u64>() & ((1u64 << (r.len() - 1)) - 1);
        let s = ConnectionSet::from_set(r, mask_set(r, mask))?;
        let rep = normaliser_identity_check(r, &s)?;
        largest = largest.max(rep.normaliser_order);
        if !rep.equal {
            failures += 1;
            out.push(format!("mismatch on {} with S = {}", r.name(), s.format(r)));
        }
    }
    out.push(format!(
        "500 pairs over {} groups, {failures} mismatches, largest normaliser {largest}",
        groups.len()
    ));
    Ok(failures == 0)
}

/// Blocks whose unions are exactly the sets satisfying the wreath condition
/// for `(K, H)`: single elements of `H ∖ 1` and double cosets `KgK` outside `H`.
fn wreath_blocks(r: &SquarefreeGroup, k: &Subgroup, h: &Subgroup) -> Vec<Vec<usize>> {
    let mut seen = vec![false; r.len()];
    seen[0] = true;
    let mut blocks = Vec::new();
    for g in 1..r.len() {
        if seen[g] {
            continue;
        }
        let mut b: Vec<usize> = if h.contains(g) {
            vec![g]
        } else {
            k.elements
                .iter()
                .flat_map(|&a| k.elements.iter().map(move |&c| (a, c)))
                .map(|(a, c)| r.mul_idx(r.mul_idx(a, g), c))
                .collect()
        };
        b.sort_unstable();
        b.dedup();
        for &e in &b {
            seen[e] = true;
        }
        blocks.push(b);
    }
    blocks
}

fn wreath_soundness(out: &mut Vec<String>, cfg: &Config) -> Result<bool> {
    let mut pool = Vec::new();
    for r in groups_up_to(60)? {
        let pairs = admissible_pairs(&r)?;
        if !pairs.is_empty() {
            pool.push((r, pairs));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let (mut certified, mut failures, mut degenerate) = (0, 0, 0);
    for _ in 0..1000 {
        let (r, pairs) = &pool[rng.gen_range(0..pool.len())];
        let (k, h) = &pairs[rng.gen_range(0..pairs.len())];
        let blocks = wreath_blocks(r, k, h);
        let set = ElemSet::from_iter(
            r.len(),
            blocks.iter().filter(|_| rng.gen_bool(0.5)).flatten().copied(),
        );
        let s = ConnectionSet::from_set(r, set)?;
        let Some(cert) = check_wreath_condition(r, s.as_set(), k, h)? else {
            failures += 1;
            out.push(format!("{}: generated set fails its own pair", r.name()));
            continue;
        };
        certified += 1;
        degenerate += cert.degenerate as u32;
        let kk = k.elements[rng.gen_range(1..k.elements.len())];
        let g = build_cayley(r, &s)?;
        let alpha_ok = alpha_k(&g, &cert, kk).is_ok();
        if !alpha_ok || is_drr(r, &s)? {
            failures += 1;
            out.push(format!("{}: S = {} is a counterexample", r.name(), s.format(r)));
        }
    }
    out.push(format!(
        "{certified} certificates over {} groups ({degenerate} degenerate), {failures} failures",
        pool.len()
    ));
    Ok(failures == 0 && certified == 1000)
}

fn constructions(out: &mut Vec<String>, cfg: &Config) -> Result<bool> {
    let mut ok = true;
    let cases: [(&str, fn(&SquarefreeGroup) -> Result<crate::witness::WitnessCertificate>); 3] = [
        ("sqfree:t=1,n=21,m=2,j=20", construct_case1_witness),
        ("sqfree:t=1,n=7,m=6,j=3", construct_case1_witness),
        ("sqfree:t=5,n=7,m=3,j=2", construct_case2_witness),
    ];
    for (lit, f) in cases {
        let r = grp(lit);
        match f(&r) {
            Ok(c) => out.push(format!(
                "{}: |S| = {}, |Aut(R)| = {}, |Aut| = {}, {}",
                r.name(),
                c.s.len(),
                c.stabilizer_sweep,
                c.aut_order,
                c.wreath.as_ref().map(|w| w.describe(&r)).unwrap_or_default()
            )),
            Err(e) => {
                ok = false;
                out.push(format!("{}: {e}", r.name()));
            }
        }
    }
    if cfg.stretch {
        let r = grp("sqfree:t=1,n=91,m=3,j=16");
        match construct_case1_witness(&r) {
            Ok(c) => out.push(format!(
                "stretch {}: |S| = {}, |Aut| = {}",
                r.name(),
                c.s.len(),
                c.aut_order
            )),
            Err(e) => out.push(format!("stretch {} not certified: {e}", r.name())),
        }
    }
    Ok(ok)
}

/// Inverse-closed subsets as masks over inverse classes.
fn inverse_closed_sets(r: &SquarefreeGroup) -> (Positions, u64) {
    let p = Positions::new(r, Kind::Graph);
    let n = 1u64 << p.len();
    (p, n)
}

fn special_automorphisms(out: &mut Vec<String>) -> Result<bool> {
    let mut ok = true;
    // Dihedral groups of order 6 and 10: every inverse-closed set.
    for name in ["D6", "D10"] {
        let r = grp(name);
        let (pos, n) = inverse_closed_sets(&r);
        let mut good = 0;
        for mask in 0..n {
            let s = ElemSet::from_iter(r.len(), pos.elements_of(mask as u128));
            let b = dihedral_beta(&r, &s)?;
            if !b.is_identity() && b.fixes_set(&s) && b.is_multiplicative(&r) {
                good += 1;
            }
        }
        ok &= good == n;
        out.push(format!("{name}: {good}/{n} inverse-closed sets have a verified beta"));
    }
    // Nonabelian groups of order pq: every set with a wreath pair has a
    // nontrivial stabilizer (all sets at order 21, a sample at order 55).
    for (name, samples) in [("F21", None), ("sqfree:t=1,n=11,m=5,j=3", Some(20_000u64))] {
        let r = grp(name);
        let aut = automorphism_group(&r)?;
        let pairs = admissible_pairs(&r)?;
        let fast = PairMasks::new(&r, &pairs, true);
        let all = (1u64 << (r.len() - 1)) - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let total = samples.unwrap_or(all + 1);
        let (mut wreaths, mut bad) = (0u64, 0u64);
        for i in 0..total {
            let mask = match samples {
                None => i,
                // Bias the sample towards wreath sets: a random union of
                // blocks for a random pair.
                Some(_) => {
                    let (k, h) = &pairs[rng.gen_range(0..pairs.len())];
                    wreath_blocks(&r, k, h)
                        .iter()
                        .filter(|_| rng.gen_bool(0.5))
                        .flatten()
                        .fold(0u64, |m, &g| m | 1 << (g - 1))
                }
            };
            if fast.matching(mask << 1).is_empty() {
                continue;
            }
            wreaths += 1;
            let s = mask_set(&r, mask);
            debug_assert!(find_gen_wreath(&r, &s)?.is_some());
            bad += aut.stabilizer_is_trivial(&s) as u64;
        }
        ok &= bad == 0 && wreaths > 0;
        out.push(format!(
            "{}: {wreaths} of {total} {}sets are wreath products, {bad} with trivial Aut(R)_S",
            r.name(),
            if samples.is_some() { "sampled " } else { "" }
        ));
    }
    // C7 x D6: every inverse-closed set with a prime-order wreath pair.
    let r = grp("sqfree:t=7,n=3,m=2,j=2");
    let pairs: Vec<(Subgroup, Subgroup)> = admissible_pairs(&r)?
        .into_iter()
        .filter(|(k, _)| is_prime(k.order() as u64))
        .collect();
    let (pos, n) = inverse_closed_sets(&r);
    let (mut instances, mut verified, mut sets) = (0u64, 0u64, 0u64);
    let mut cases = std::collections::BTreeMap::new();
    let mut failures = Vec::new();
    let fast = PairMasks::new(&r, &pairs, false);
    for mask in 0..n {
        let elems = pos.elements_of(mask as u128);
        let emask = elems.iter().fold(0u64, |m, &g| m | 1 << g);
        let hits = fast.matching(emask);
        if hits.is_empty() {
            continue;
        }
        sets += 1;
        let s = ElemSet::from_iter(r.len(), elems);
        for i in hits {
            let (k, h) = &pairs[i];
            instances += 1;
            match qdr_wreath_witness(&r, k, h, &s) {
                Ok((a, case)) => {
                    if !a.is_identity() && a.fixes_set(&s) && a.is_multiplicative(&r) {
                        verified += 1;
                        *cases.entry(format!("{case:?}")).or_insert(0u64) += 1;
                    }
                }
                Err(e) => {
                    if failures.len() < 3 {
                        failures.push(format!("{e}"));
                    }
                }
            }
        }
    }
    ok &= verified == instances;
    out.push(format!(
        "C7xD6: {sets} inverse-closed sets with prime-order pairs, {verified}/{instances} (set, pair) instances verified"
    ));
    out.push(format!("C7xD6 cases: {cases:?}"));
    out.extend(failures);
    Ok(ok)
}

/// Bitmask tests of the wreath condition for many pairs at once (groups of
/// order at most 64). Without `both_sides` only `K(S ∖ H) = S ∖ H` is tested,
/// which suffices for inverse-closed sets.
struct PairMasks {
    // Per pair: mask of H, and multiplication maps by K's generators.
    pairs: Vec<(u64, Vec<Vec<usize>>)>,
}

impl PairMasks {
    fn new(r: &SquarefreeGroup, pairs: &[(Subgroup, Subgroup)], both_sides: bool) -> Self {
        let pairs = pairs
            .iter()
            .map(|(k, h)| {
                let hm = h.elements.iter().fold(0u64, |m, &g| m | 1 << g);
                let mut maps: Vec<Vec<usize>> = k
                    .generators
                    .iter()
                    .map(|&g| (0..r.len()).map(|x| r.mul_idx(g, x)).collect())
                    .collect();
                if both_sides {
                    maps.extend(
                        k.generators
                            .iter()
                            .map(|&g| (0..r.len()).map(|x| r.mul_idx(x, g)).collect()),
                    );
                }
                (hm, maps)
            })
            .collect();
        PairMasks { pairs }
    }

    /// Indices of the pairs satisfied by the set with element mask `s`.
    fn matching(&self, s: u64) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, (hm, maps)) in self.pairs.iter().enumerate() {
            let t = s & !hm;
            let stable = maps.iter().all(|m| {
                let mut x = t;
                while x != 0 {
                    let e = x.trailing_zeros() as usize;
                    x &= x - 1;
                    if t >> m[e] & 1 == 0 {
                        return false;
                    }
                }
                true
            });
            if stable {
                out.push(i);
            }
        }
        out
    }
}

/// The clauses whose defining conditions hold, computed from element orders
/// and centres rather than from the normal-form parameters.
pub fn matching_clauses(r: &SquarefreeGroup) -> Vec<Clause> {
    let order = r.order();
    let primes = prime_divisors(order);
    let abelian = (0..r.len()).all(|g| r.generators().iter().all(|&h| r.commutes(g, h)));
    let mut out = Vec::new();
    if order == 1 {
        out.push(Clause::Trivial);
    }
    if primes.len() == 1 {
        out.push(Clause::Prime);
    }
    if primes.len() == 2 {
        let (p, q) = (primes[0], primes[1]);
        if abelian {
            out.push(Clause::AbelianTwoPrimes);
        } else {
            let special31 = (q, p) == (31, 5);
            let safe = q == 2 * p + 1 && q % 4 == 3 && q >= 11;
            let f21 = (q, p) == (7, 3);
            if special31 {
                out.push(Clause::ThirtyOneFive);
            }
            if safe {
                out.push(Clause::SafePrimePair);
            }
            if f21 {
                out.push(Clause::TwentyOne);
            }
            if !special31 && !safe && !f21 {
                out.push(Clause::OtherTwoPrimes);
            }
        }
    }
    if primes.len() >= 3 {
        if abelian {
            out.push(Clause::AbelianThreePrimes);
        } else {
            let z = r.centre();
            let d30 = order == 30 && z.order() == 1 && (0..r.len()).any(|g| r.order_idx(g) == 15);
            // C_q × D_2r: prime centre, and the quotient is dihedral of order 6 or 10.
            let cd = is_prime(z.order() as u64) && {
                let rest = order / z.order() as u64;
                (rest == 6 || rest == 10)
                    && (0..r.len())
                        .filter(|&g| r.order_idx(g) == 2)
                        .count() as u64
                        == rest / 2
            };
            if d30 {
                out.push(Clause::Dihedral30);
            }
            if cd {
                out.push(Clause::CyclicTimesDihedral);
            }
            if !d30 && !cd {
                out.push(Clause::NotGrrDetecting);
            }
        }
    }
    out
}

fn classifier(out: &mut Vec<String>) -> Result<bool> {
    let mut ok = true;
    let mut compared = 0;
    for r in groups_up_to(30)? {
        let v = classify(&r);
        let d = search_witness(&r, Kind::Digraph, Strategy::ExhaustiveOrbitReduced, 0, 0)?;
        let g = search_witness(&r, Kind::Graph, Strategy::ExhaustiveOrbitReduced, 0, 0)?;
        let detecting = |o: &WitnessOutcome| match o {
            WitnessOutcome::Found(_) => false,
            WitnessOutcome::NonExistence(rep) => rep.certifies_detecting(),
        };
        let (sd, sg) = (detecting(&d), detecting(&g));
        compared += 1;
        if (sd, sg) != (v.drr_detecting, v.grr_detecting) {
            ok = false;
            out.push(format!(
                "{}: classified ({}, {}) but search says ({sd}, {sg})",
                r.name(),
                v.drr_detecting,
                v.grr_detecting
            ));
        }
    }
    out.push(format!("{compared} groups of order <= 30 agree with exhaustive search"));
    let mut total = 0;
    for r in groups_up_to(110)? {
        total += 1;
        let m = matching_clauses(&r);
        let v = classify(&r);
        if m != [v.clause] {
            ok = false;
            out.push(format!("{}: clauses {m:?}, classified {}", r.name(), v.clause));
        }
        if v.drr_detecting && !v.grr_detecting {
            ok = false;
        }
    }
    out.push(format!("{total} groups of order <= 110 each match exactly one clause"));
    Ok(ok)
}

fn psl2(out: &mut Vec<String>) -> Result<bool> {
    let w = psl2_witness(11)?;
    let c = &w.certificate;
    let r = &c.group;
    let stab = set_stabilizer(r, c.s.as_set())?;
    out.push(format!(
        "{} on {} vertices, S = {}, |Aut| = {}, |Aut(R)_S| = {}, |N(R-hat)| = {}",
        r.name(),
        w.degree,
        c.s.format(r),
        c.aut_order,
        stab.elements.len(),
        w.normaliser_order
    ));
    Ok(c.aut_order == BigUint::from(660u32) && stab.trivial && w.self_normalising() && w.degree == 55)
}
