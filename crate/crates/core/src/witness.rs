//! Witnesses: connection sets `S` with `Aut(R)_S = 1` whose Cayley (di)graph
//! is nevertheless not a DRR/GRR.
//!
//! Three sources: the explicit constructions for groups with at least three
//! prime divisors ([`construct_case1_witness`], [`construct_case2_witness`]),
//! searches ([`search_witness`]), and the PSL(2,11) instance ([`psl2_witness`]).

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::prime_divisors;
use crate::aut::{automorphism_group, set_stabilizer};
use crate::cayley::search::{exhaustive_sweep, find_grr_set, Positions, SweepReport, Tester};
use crate::cayley::{
    build_cayley, graph_automorphisms, is_drr, stabilizer_witness, ConnectionSet, Kind,
};
use crate::classify::pointwise_rigidity_check;
use crate::error::{Error, Result};
use crate::group::{identify_table, ElemSet, SquarefreeGroup, Subgroup};
use crate::perm::{coset_action, normalizer_in, PermGroup, Permutation};
use crate::wreath::{admissible_pairs, alpha_k, check_wreath_condition, WreathCertificate};

/// Evidence that `R` is not DRR-detecting (or not GRR-detecting, for graphs).
#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    pub group: SquarefreeGroup,
    pub s: ConnectionSet,
    pub kind: Kind,
    /// `|Aut(R)|`, i.e. the number of automorphisms swept to show `Aut(R)_S = 1`.
    pub stabilizer_sweep: usize,
    pub aut_order: BigUint,
    /// An automorphism of `Cay(R, S)` outside `R̂`.
    pub extra: Permutation,
    pub wreath: Option<WreathCertificate>,
    /// How the set was found.
    pub source: String,
}

impl WitnessCertificate {
    /// Builds and checks a certificate for `S`.
    pub fn certify(
        r: &SquarefreeGroup,
        s: &ConnectionSet,
        kind: Kind,
        wreath: Option<WreathCertificate>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if kind == Kind::Graph && !s.is_inverse_closed() {
            return Err(Error::NotInverseClosed);
        }
        let stab = set_stabilizer(r, s.as_set())?;
        if !stab.trivial {
            return Err(Error::Rejected(format!(
                "Aut(R)_S has order {}",
                stab.elements.len()
            )));
        }
        let g = build_cayley(r, s)?;
        let aut = graph_automorphisms(&g)?;
        if aut.order <= BigUint::from(r.order()) {
            return Err(Error::Rejected("Cay(R, S) is regular".into()));
        }
        let extra = match &wreath {
            Some(w) => {
                let k = w.k.elements.iter().copied().find(|&k| k != 0).expect("K > 1");
                alpha_k(&g, w, k)?
            }
            None => stabilizer_witness(&g)?
                .ok_or_else(|| Error::Internal("no automorphism fixing the identity".into()))?,
        };
        let cert = WitnessCertificate {
            group: r.clone(),
            s: s.clone(),
            kind,
            stabilizer_sweep: stab.aut_order,
            aut_order: aut.order,
            extra,
            wreath,
            source: source.into(),
        };
        cert.verify()?;
        Ok(cert)
    }

    /// Re-checks every claim from scratch.
    pub fn verify(&self) -> Result<()> {
        let r = &self.group;
        if self.kind == Kind::Graph && !self.s.is_inverse_closed() {
            return Err(Error::NotInverseClosed);
        }
        let aut_r = automorphism_group(r)?;
        if aut_r.order() != self.stabilizer_sweep || !aut_r.stabilizer_is_trivial(self.s.as_set()) {
            return Err(Error::Rejected("Aut(R)_S is not trivial".into()));
        }
        let g = build_cayley(r, &self.s)?;
        if self.extra.degree() != r.len() || !g.is_automorphism(&self.extra) || g.in_regular(&self.extra) {
            return Err(Error::Rejected("stored automorphism is invalid".into()));
        }
        let order = graph_automorphisms(&g)?.order;
        if order != self.aut_order || order <= BigUint::from(r.order()) {
            return Err(Error::Rejected("automorphism group order mismatch".into()));
        }
        if let Some(w) = &self.wreath {
            if check_wreath_condition(r, self.s.as_set(), &w.k, &w.h)?.is_none() {
                return Err(Error::Rejected("wreath pair does not hold".into()));
            }
        }
        Ok(())
    }
}

fn element_of_order(r: &SquarefreeGroup, k: u64, pred: impl Fn(usize) -> bool) -> Option<usize> {
    (0..r.len()).find(|&g| r.order_idx(g) == k && pred(g))
}

/// Whether some element of order `p·q` exists with `p | m` and `q | nt`.
fn cyclic_cross_pairs(r: &SquarefreeGroup) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in prime_divisors(r.m()) {
        for q in prime_divisors(r.n() * r.t()) {
            if element_of_order(r, p * q, |_| true).is_some() {
                out.push((p, q));
            }
        }
    }
    out
}

/// A GRR connection set on the subgroup `H`, as elements of `R`.
fn grr_on_subgroup(r: &SquarefreeGroup, h: &Subgroup) -> Result<Vec<usize>> {
    let (hg, emb) = r.subgroup_as_group(h)?;
    let s = find_grr_set(&hg)?;
    Ok(s.iter().map(|g| emb[g]).collect())
}

fn coset_of(r: &SquarefreeGroup, k: &Subgroup, g: usize) -> Vec<usize> {
    k.elements.iter().map(|&kk| r.mul_idx(kk, g)).collect()
}

/// The witness for `R = C_n ⋊ C_m` when every subgroup of order `pq`
/// (`p | m`, `q | n`) is nonabelian.
///
/// If `m` is not prime, `S` is a GRR set on the characteristic subgroup `H`
/// of index `p` (the least prime of `m`) and the pair is `K = H`. Otherwise
/// `K` is the subgroup of order `q` (the largest prime of `n`), `H = ⟨K, x⟩`
/// and `S = S' ∪ K·hw ∪ K·(hw)⁻¹` with `S'` a GRR set on `H`, `h = x` and
/// `w` of order `n/q`.
pub fn construct_case1_witness(r: &SquarefreeGroup) -> Result<WitnessCertificate> {
    if r.t() != 1 || r.is_abelian() {
        return Err(Error::HypothesisFailed(format!("{} has nontrivial centre", r.name())));
    }
    if prime_divisors(r.order()).len() < 3 {
        return Err(Error::HypothesisFailed("|R| has fewer than three prime divisors".into()));
    }
    if let Some((p, q)) = cyclic_cross_pairs(r).first() {
        return Err(Error::HypothesisFailed(format!("R has a cyclic subgroup of order {}", p * q)));
    }
    let (n, m) = (r.n(), r.m());
    let p = prime_divisors(m)[0];
    let y = r.index(&r.y());
    let x = r.index(&r.x());
    if m != p {
        let xp = r.pow_idx(x, p as i64);
        let h = r.subgroup(&[y, xp]);
        if !pointwise_rigidity_check(r, &h)? {
            return Err(Error::Internal("C_Aut(R)(H) is nontrivial".into()));
        }
        let s = ConnectionSet::new(r, grr_on_subgroup(r, &h)?)?;
        let w = check_wreath_condition(r, s.as_set(), &h, &h)?
            .ok_or_else(|| Error::Internal("S ⊆ H but (H, H) fails".into()))?;
        return WitnessCertificate::certify(r, &s, Kind::Graph, Some(w), "case 1, m not prime");
    }
    let q = *prime_divisors(n).last().expect("n > 1");
    if q < 7 {
        return Err(Error::HypothesisFailed(format!("largest prime of n is {q} < 7")));
    }
    let n1 = n / q;
    let k = r.pow_idx(y, n1 as i64);
    let kk = r.subgroup(&[k]);
    let h = r.subgroup(&[k, x]);
    let w = r.pow_idx(y, q as i64);
    let hw = r.mul_idx(x, w);
    let mut elems = grr_on_subgroup(r, &h)?;
    elems.extend(coset_of(r, &kk, hw));
    elems.extend(coset_of(r, &kk, r.inv_idx(hw)));
    let s = ConnectionSet::new(r, elems)?;
    let wr = check_wreath_condition(r, s.as_set(), &kk, &h)?
        .ok_or_else(|| Error::Internal("(K, H) fails for the case 1 set".into()))?;
    WitnessCertificate::certify(r, &s, Kind::Graph, Some(wr), "case 1, m prime")
}

/// The witness for groups with a cyclic subgroup of order `pq`, `p | m`,
/// `q | nt`, `p` as large as possible (then `q` least).
///
/// `H` is the characteristic subgroup of index `p`, `k`, `g`, `x` have orders
/// `q`, `r = nt/q`, `p` with `x` commuting with `k`, and
/// `S = S' ∪ Kx^{±1} ∪ K(gx)^{±1} ∪ K(g³x)^{±1}`, where `S'` is a GRR set on
/// `H` or `{kg, (kg)⁻¹}` when `H` is cyclic. Requires `r > 5`.
pub fn construct_case2_witness(r: &SquarefreeGroup) -> Result<WitnessCertificate> {
    if r.is_abelian() {
        return Err(Error::HypothesisFailed("R is abelian".into()));
    }
    if prime_divisors(r.order()).len() < 3 {
        return Err(Error::HypothesisFailed("|R| has fewer than three prime divisors".into()));
    }
    let pairs = cyclic_cross_pairs(r);
    let p = pairs
        .iter()
        .map(|&(p, _)| p)
        .max()
        .ok_or_else(|| Error::HypothesisFailed("no cyclic subgroup of order pq".into()))?;
    let q = pairs.iter().filter(|&&(pp, _)| pp == p).map(|&(_, q)| q).min().expect("p occurs");
    let nt = r.n() * r.t();
    let rr = nt / q;
    if rr <= 5 {
        return Err(Error::HypothesisFailed(format!(
            "r = {rr} is at most 5 (R is C_q x D_2r or close to it)"
        )));
    }
    let (z, y, x) = (r.index(&r.z()), r.index(&r.y()), r.index(&r.x()));
    let c = r.mul_idx(z, y);
    let k = r.pow_idx(c, rr as i64);
    let g = r.pow_idx(c, q as i64);
    let xp = r.pow_idx(x, p as i64);
    let h = r.subgroup(&[z, y, xp]);
    let kk = r.subgroup(&[k]);
    let xe = element_of_order(r, p, |e| r.commutes(e, k))
        .ok_or_else(|| Error::Internal("no element of order p commuting with k".into()))?;
    let kg = r.mul_idx(k, g);
    let mut elems = if h.generators.iter().all(|&a| h.generators.iter().all(|&b| r.commutes(a, b))) {
        vec![kg, r.inv_idx(kg)]
    } else {
        grr_on_subgroup(r, &h)?
    };
    let gx = r.mul_idx(g, xe);
    let g3x = r.mul_idx(r.pow_idx(g, 3), xe);
    let cosets = [coset_of(r, &kk, xe), coset_of(r, &kk, gx), coset_of(r, &kk, g3x)];
    for i in 0..3 {
        for j in i + 1..3 {
            if cosets[i].iter().any(|e| cosets[j].contains(e)) {
                return Err(Error::Internal("the three K-cosets are not distinct".into()));
            }
        }
    }
    for base in [xe, gx, g3x] {
        elems.extend(coset_of(r, &kk, base));
        elems.extend(coset_of(r, &kk, r.inv_idx(base)));
    }
    let s = ConnectionSet::new(r, elems)?;
    let wr = check_wreath_condition(r, s.as_set(), &kk, &h)?
        .ok_or_else(|| Error::Internal("(K, H) fails for the case 2 set".into()))?;
    WitnessCertificate::certify(r, &s, Kind::Graph, Some(wr), "case 2")
}

/// Search strategies for [`search_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// One set per `Aut(R)`-orbit; a full sweep certifies non-existence.
    ExhaustiveOrbitReduced,
    /// Unions of `K`-blocks for wreath pairs `(K, H)`, then the exhaustive sweep.
    StructuredFirst,
    /// Random sets under a sample budget.
    Randomized,
    /// Structured, then randomized, then exhaustive.
    Ladder,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exhaustive" | "exhaustive_orbit_reduced" => Strategy::ExhaustiveOrbitReduced,
            "structured" | "structured_first" => Strategy::StructuredFirst,
            "randomized" | "random" => Strategy::Randomized,
            "ladder" => Strategy::Ladder,
            _ => return Err(crate::error::parse_err(0, format!("unknown strategy {s:?}"))),
        })
    }
}

/// Default randomized budget of the ladder.
pub const LADDER_BUDGET: u64 = 1_000_000;
/// Sets tried per wreath pair in the structured phase.
pub const STRUCTURED_PER_PAIR: u64 = 1 << 16;

/// Result of a witness search.
#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    Found(Box<WitnessCertificate>),
    /// A complete sweep found nothing: `R` is detecting for this kind.
    NonExistence(SweepReport),
}

/// Searches for a witness. `budget` bounds the randomized phase.
pub fn search_witness(
    r: &SquarefreeGroup,
    kind: Kind,
    strategy: Strategy,
    budget: u64,
    seed: u64,
) -> Result<WitnessOutcome> {
    let found = |c: WitnessCertificate| Ok(WitnessOutcome::Found(Box::new(c)));
    match strategy {
        Strategy::ExhaustiveOrbitReduced => exhaustive(r, kind),
        Strategy::Randomized => match randomized(r, kind, budget, seed)? {
            Some(c) => found(c),
            None => Err(Error::BudgetExhausted(budget)),
        },
        Strategy::StructuredFirst => match structured(r, kind, seed)? {
            Some(c) => found(c),
            None => exhaustive(r, kind),
        },
        Strategy::Ladder => {
            if let Some(c) = structured(r, kind, seed)? {
                return found(c);
            }
            if let Some(c) = randomized(r, kind, budget, seed)? {
                return found(c);
            }
            exhaustive(r, kind)
        }
    }
}

fn exhaustive(r: &SquarefreeGroup, kind: Kind) -> Result<WitnessOutcome> {
    let rep = exhaustive_sweep(r, kind, true)?;
    match &rep.witness {
        Some(elems) => {
            let s = ConnectionSet::new(r, elems.iter().copied())?;
            let c = WitnessCertificate::certify(r, &s, kind, None, "exhaustive sweep")?;
            Ok(WitnessOutcome::Found(Box::new(c)))
        }
        None => Ok(WitnessOutcome::NonExistence(rep)),
    }
}

/// Structured phase: for each wreath pair `(K, H)` in scan order with
/// `Z(H) ∩ K ≤ Z(R)` (otherwise conjugation by an element of `K` stabilizes
/// every such set), try sets `A ∪ B` with `A ⊆ H∖{1}` and `B` a union of
/// double cosets `KgK` outside `H`. Every such set satisfies the wreath
/// condition, so the first one with `Aut(R)_S = 1` is a witness.
fn structured(r: &SquarefreeGroup, kind: Kind, seed: u64) -> Result<Option<WitnessCertificate>> {
    let aut = automorphism_group(r)?;
    let centre = r.centre();
    for (k, h) in admissible_pairs(r)? {
        let zk = k
            .elements
            .iter()
            .filter(|&&g| h.generators.iter().all(|&a| r.commutes(g, a)));
        if zk.clone().any(|&g| !centre.contains(g)) {
            continue;
        }
        let blocks = structured_blocks(r, kind, &k, &h);
        let npos = blocks.len();
        if npos == 0 || npos > 120 {
            continue;
        }
        let exhaustive = npos <= 16;
        let count = if exhaustive { (1u64 << npos) - 1 } else { STRUCTURED_PER_PAIR };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let mask: u128 = if exhaustive {
                i as u128 + 1
            } else {
                rng.gen::<u128>() & ((1u128 << npos) - 1)
            };
            let set = ElemSet::from_iter(
                r.len(),
                (0..npos).filter(|&b| mask >> b & 1 == 1).flat_map(|b| blocks[b].iter().copied()),
            );
            if set.is_empty() || !aut.stabilizer_is_trivial(&set) {
                continue;
            }
            let s = ConnectionSet::from_set(r, set)?;
            let w = check_wreath_condition(r, s.as_set(), &k, &h)?
                .ok_or_else(|| Error::Internal("structured set fails its pair".into()))?;
            return WitnessCertificate::certify(r, &s, kind, Some(w), "structured").map(Some);
        }
    }
    Ok(None)
}

fn structured_blocks(r: &SquarefreeGroup, kind: Kind, k: &Subgroup, h: &Subgroup) -> Vec<Vec<usize>> {
    let mut seen = vec![false; r.len()];
    seen[0] = true;
    let mut blocks = Vec::new();
    for g in 1..r.len() {
        if seen[g] {
            continue;
        }
        let mut block: Vec<usize> = if h.contains(g) {
            vec![g]
        } else {
            let mut b = Vec::new();
            for &a in &k.elements {
                for &c in &k.elements {
                    b.push(r.mul_idx(r.mul_idx(a, g), c));
                }
            }
            b
        };
        if kind == Kind::Graph {
            let inv: Vec<usize> = block.iter().map(|&e| r.inv_idx(e)).collect();
            block.extend(inv);
        }
        block.sort_unstable();
        block.dedup();
        for &e in &block {
            seen[e] = true;
        }
        blocks.push(block);
    }
    blocks
}

const SAMPLE_CHUNK: u64 = 4096;

fn sample_mask(seed: u64, i: u64, npos: usize) -> u128 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let full = if npos >= 128 { u128::MAX } else { (1u128 << npos) - 1 };
    rng.gen::<u128>() & full
}

/// Samples `budget` random sets (sample `i` drawn from a generator seeded by
/// `seed` and `i`); the witness with the least sample index is returned.
fn randomized(r: &SquarefreeGroup, kind: Kind, budget: u64, seed: u64) -> Result<Option<WitnessCertificate>> {
    let positions = Positions::new(r, kind);
    let npos = positions.len();
    let tester = if r.len() <= 64 { Some(Tester::new(r, kind)?) } else { None };
    let aut = automorphism_group(r)?;
    let test = |i: u64| -> Result<Option<u128>> {
        let mask = sample_mask(seed, i, npos);
        if mask == 0 {
            return Ok(None);
        }
        match &tester {
            Some(t) => {
                let m = mask as u64;
                if t.stabilizer_trivial(m) && !t.is_regular(m)?.0 {
                    return Ok(Some(mask));
                }
            }
            None => {
                let s = positions.connection_set(r, mask);
                if aut.stabilizer_is_trivial(s.as_set()) && !is_drr(r, &s)? {
                    return Ok(Some(mask));
                }
            }
        }
        Ok(None)
    };
    let mut start = 0;
    while start < budget {
        let end = (start + SAMPLE_CHUNK * 16).min(budget);
        let hit = (start..end)
            .into_par_iter()
            .map(|i| test(i).map(|m| m.map(|m| (i, m))))
            .find_first(|res| !matches!(res, Ok(None)));
        if let Some(res) = hit {
            let (i, mask) = res?.expect("filtered");
            let s = positions.connection_set(r, mask);
            let c = WitnessCertificate::certify(r, &s, kind, None, format!("randomized, sample {i}"))?;
            return Ok(Some(c));
        }
        start = end;
    }
    Ok(None)
}

/// The PSL(2,11) graph witness on `C_11 ⋊ C_5`.
#[derive(Debug, Clone)]
pub struct Psl2Witness {
    pub certificate: WitnessCertificate,
    /// Order of the group generated by the configured generators.
    pub psl_order: u128,
    /// Degree of the coset action.
    pub degree: usize,
    /// Order of the point stabilizer used for the coset action.
    pub stabilizer_order: u128,
    /// `|N_A(R̂)|` inside `A = Aut(Cay(R, S))`.
    pub normaliser_order: u128,
}

impl Psl2Witness {
    pub fn self_normalising(&self) -> bool {
        self.normaliser_order == self.certificate.group.order() as u128
    }
}

const PSL2_11: &str = include_str!("../data/psl2_11.txt");

/// Parses generator files: one permutation per line in cycle notation,
/// `#` starts a comment.
pub fn parse_generator_file(text: &str, degree: usize) -> Result<Vec<Permutation>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| Permutation::parse_cycles(l, degree))
        .collect()
}

/// Action of arbitrary elements of `G` on the right cosets of `H`.
struct CosetMap {
    h_elems: Vec<Permutation>,
    reps: Vec<Permutation>,
    ids: HashMap<Vec<u32>, usize>,
}

impl CosetMap {
    fn new(g: &PermGroup, h: &PermGroup) -> Result<Self> {
        let (_, reps) = coset_action(g, h)?;
        let h_elems = h.elements(1 << 20)?;
        let mut m = CosetMap {
            h_elems,
            reps: Vec::new(),
            ids: HashMap::new(),
        };
        for (i, rep) in reps.iter().enumerate() {
            let k = m.key(rep);
            m.ids.insert(k, i);
        }
        m.reps = reps;
        Ok(m)
    }

    fn key(&self, x: &Permutation) -> Vec<u32> {
        self.h_elems
            .iter()
            .map(|k| k.then(x).images().to_vec())
            .min()
            .expect("H is nonempty")
    }

    fn image(&self, g: &Permutation) -> Result<Permutation> {
        Permutation::from_fn(self.reps.len(), |i| self.ids[&self.key(&self.reps[i].then(g))])
    }
}

fn order_twelve_subgroups(g: &PermGroup, elems: &[Permutation]) -> Result<Vec<PermGroup>> {
    let d = g.degree();
    let mut out = Vec::new();
    // The normaliser of a cyclic subgroup of order 6 (dihedral of order 12) ...
    if let Some(c) = elems.iter().find(|e| e.order() == 6) {
        let n = normalizer_in(g, &PermGroup::new(d, vec![c.clone()])?)?;
        if n.order() == 12 {
            out.push(n);
        }
    }
    // ... and the normaliser of a Klein four-group (A4).
    let invols: Vec<&Permutation> = elems.iter().filter(|e| e.order() == 2).collect();
    'outer: for a in &invols {
        for b in &invols {
            if a != b && a.then(b) == b.then(a) {
                let v = PermGroup::new(d, vec![(*a).clone(), (*b).clone()])?;
                let n = normalizer_in(g, &v)?;
                if n.order() == 12 {
                    out.push(n);
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

/// Builds a Cayley graph on `C_q ⋊ C_{(q−1)/2}` whose automorphism group is
/// `PSL(2, q)`, from a coset action of degree 55. Only `q = 11` is configured.
pub fn psl2_witness(q: u64) -> Result<Psl2Witness> {
    if q != 11 {
        return Err(Error::NotConfigured(format!("no PSL(2,{q}) generators are bundled")));
    }
    let gens = parse_generator_file(PSL2_11, 12)?;
    let g = PermGroup::new(12, gens)?;
    let psl_order = g.order();
    if psl_order != 660 {
        return Err(Error::Internal(format!("generators give order {psl_order}")));
    }
    let elems = g.elements(1000)?;
    let a = elems.iter().find(|e| e.order() == 11).expect("order 11 element").clone();
    let borel = normalizer_in(&g, &PermGroup::new(12, vec![a])?)?;
    if borel.order() != 55 {
        return Err(Error::Internal("Borel subgroup has the wrong order".into()));
    }
    let borel_elems = borel.elements(100)?;
    for h in order_twelve_subgroups(&g, &elems)? {
        let cm = CosetMap::new(&g, &h)?;
        let degree = cm.reps.len();
        let b_img: Vec<Permutation> = borel_elems.iter().map(|e| cm.image(e)).collect::<Result<_>>()?;
        let index: HashMap<&Permutation, usize> = b_img.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let id = b_img.iter().position(|p| p.is_identity()).expect("identity");
        let (r, emb) = identify_table(55, &|i, j| index[&b_img[i].then(&b_img[j])], id)?;
        // Vertex v of Cay(R, S) is the point 0^φ(v).
        let point: Vec<usize> = (0..55).map(|v| b_img[emb[v]].image(0)).collect();
        let mut vertex = vec![usize::MAX; degree];
        for (v, &p) in point.iter().enumerate() {
            vertex[p] = v;
        }
        if vertex.contains(&usize::MAX) {
            return Err(Error::Internal("Borel subgroup is not regular".into()));
        }
        let action_gens: Vec<Permutation> = g.generators().iter().map(|x| cm.image(x)).collect::<Result<_>>()?;
        let action = PermGroup::new(degree, action_gens)?;
        let suborbits: Vec<Vec<usize>> = action
            .point_stabilizer(0)
            .orbits()
            .into_iter()
            .map(|o| {
                let mut v: Vec<usize> = o.into_iter().map(|p| vertex[p]).collect();
                v.sort_unstable();
                v
            })
            .filter(|o| o[0] != 0)
            .filter(|o| o.iter().all(|&v| o.contains(&r.inv_idx(v))))
            .collect();
        let aut_r = automorphism_group(&r)?;
        for mask in 1u64..(1 << suborbits.len()) - 1 {
            let elems: Vec<usize> = (0..suborbits.len())
                .filter(|&i| mask >> i & 1 == 1)
                .flat_map(|i| suborbits[i].iter().copied())
                .collect();
            let s = ConnectionSet::new(&r, elems)?;
            if !aut_r.stabilizer_is_trivial(s.as_set()) {
                continue;
            }
            let cay = build_cayley(&r, &s)?;
            let aut = graph_automorphisms(&cay)?;
            if aut.order != BigUint::from(660u32) {
                continue;
            }
            let rhat = crate::perm::regular_representation(&r)?;
            let normaliser_order = normalizer_in(&aut.group, &rhat)?.order();
            let certificate = WitnessCertificate::certify(
                &r,
                &s,
                Kind::Graph,
                None,
                format!("PSL(2,11) on cosets of a subgroup of order {}", h.order()),
            )?;
            return Ok(Psl2Witness {
                certificate,
                psl_order,
                degree,
                stabilizer_order: h.order(),
                normaliser_order,
            });
        }
    }
    Err(Error::Internal("no orbital graph has automorphism group PSL(2,11)".into()))
}
