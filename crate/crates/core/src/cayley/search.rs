//! Orbit-reduced exhaustive sweeps over connection sets, and the search for
//! DRR/GRR connection sets on a given group.
//!
//! Subsets are encoded as bit masks over *positions*: for digraphs position
//! `i` is the element `i + 1`; for graphs a position is an inverse class
//! `{g, g⁻¹}`, ordered by its least element. `Aut(R)` permutes positions,
//! and a mask is canonical when no automorphism maps it to a numerically
//! smaller mask.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aut::automorphism_group;
use crate::cayley::fast::{FastCayley, MAX_FAST};
use crate::cayley::{build_cayley, stabilizer_witness, ConnectionSet, Kind};
use crate::error::{Error, Result};
use crate::group::{ElemSet, SquarefreeGroup};

/// Largest number of positions an exhaustive sweep will enumerate.
pub const MAX_SWEEP_POSITIONS: usize = 34;
const CHUNK: u64 = 1 << 16;
const SUPER_CHUNK: u64 = 1 << 22;

type ByteTable = [[u64; 256]; 8];

fn table(npos: usize, f: impl Fn(usize) -> u64) -> Box<ByteTable> {
    let mut t = Box::new([[0u64; 256]; 8]);
    for b in 0..8 {
        for x in 1..256usize {
            let pos = b * 8 + x.trailing_zeros() as usize;
            let bits = if pos < npos { f(pos) } else { 0 };
            t[b][x] = t[b][x & (x - 1)] | bits;
        }
    }
    t
}

#[inline]
fn apply(t: &ByteTable, mut m: u64) -> u64 {
    let mut out = 0;
    let mut b = 0;
    while m != 0 {
        out |= t[b][(m & 0xff) as usize];
        m >>= 8;
        b += 1;
    }
    out
}

/// The positions of a sweep and the action of `Aut(R)` on them.
pub struct Positions {
    pub kind: Kind,
    /// Elements making up each position.
    pub classes: Vec<Vec<usize>>,
    pos_of: Vec<usize>,
}

impl Positions {
    pub fn new(r: &SquarefreeGroup, kind: Kind) -> Self {
        let n = r.len();
        let mut pos_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 1..n {
            if pos_of[g] != usize::MAX {
                continue;
            }
            let mut class = vec![g];
            let gi = r.inv_idx(g);
            if kind == Kind::Graph && gi != g {
                class.push(gi);
            }
            for &e in &class {
                pos_of[e] = classes.len();
            }
            classes.push(class);
        }
        Positions {
            kind,
            classes,
            pos_of,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn position(&self, g: usize) -> usize {
        self.pos_of[g]
    }

    pub fn elements_of(&self, mask: u128) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.len())
            .filter(|&p| mask >> p & 1 == 1)
            .flat_map(|p| self.classes[p].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn connection_set(&self, r: &SquarefreeGroup, mask: u128) -> ConnectionSet {
        ConnectionSet::new(r, self.elements_of(mask)).expect("positions exclude the identity")
    }

    /// Position permutation induced by an automorphism map.
    pub fn induced(&self, map: &[u32]) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| self.pos_of[map[c[0]] as usize])
            .collect()
    }
}

/// Decides DRR status for masks of a fixed group and position set, using the
/// bitset prefilter when possible.
pub struct Tester {
    pub group: SquarefreeGroup,
    pub positions: Positions,
    aut_tables: Vec<Box<ByteTable>>,
    cycle_counts: Vec<usize>,
    to_elems: Box<ByteTable>,
    fast: FastCayley,
}

/// Classification of one mask during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskStatus {
    NotCanonical,
    NontrivialStabilizer,
    Regular { fast: bool },
    Witness,
}

impl Tester {
    pub fn new(r: &SquarefreeGroup, kind: Kind) -> Result<Self> {
        let fast = FastCayley::new(r).ok_or(Error::TooLarge {
            size: r.order() as u128,
            bound: MAX_FAST as u128,
        })?;
        let positions = Positions::new(r, kind);
        let npos = positions.len();
        let aut = automorphism_group(r)?;
        let mut aut_tables = Vec::new();
        let mut cycle_counts = Vec::new();
        for a in aut.nontrivial() {
            let perm = positions.induced(a.map());
            cycle_counts.push(count_cycles(&perm));
            aut_tables.push(table(npos, |p| 1u64 << perm[p]));
        }
        let to_elems = table(npos, |p| {
            positions.classes[p].iter().fold(0u64, |m, &g| m | 1 << g)
        });
        Ok(Tester {
            group: r.clone(),
            positions,
            aut_tables,
            cycle_counts,
            to_elems,
            fast,
        })
    }

    pub fn aut_order(&self) -> usize {
        self.aut_tables.len() + 1
    }

    /// Number of `Aut(R)`-orbits on subsets of positions, by orbit counting.
    pub fn burnside_count(&self) -> u128 {
        let npos = self.positions.len() as u32;
        let total: u128 = (1u128 << npos)
            + self
                .cycle_counts
                .iter()
                .map(|&c| 1u128 << c)
                .sum::<u128>();
        total / self.aut_order() as u128
    }

    /// Element mask of the connection set for a position mask.
    pub fn element_mask(&self, mask: u64) -> u64 {
        apply(&self.to_elems, mask)
    }

    pub fn stabilizer_trivial(&self, mask: u64) -> bool {
        self.aut_tables.iter().all(|t| apply(t, mask) != mask)
    }

    /// Whether `Cay(R, S)` is a DRR for the given position mask; the flag
    /// reports whether the bitset prefilter alone decided it.
    pub fn is_regular(&self, mask: u64) -> Result<(bool, bool)> {
        if self.fast.discrete(self.element_mask(mask)) {
            return Ok((true, true));
        }
        let s = self.positions.connection_set(&self.group, mask as u128);
        let g = build_cayley(&self.group, &s)?;
        Ok((stabilizer_witness(&g)?.is_none(), false))
    }

    pub fn status(&self, mask: u64) -> Result<MaskStatus> {
        let mut fixed = false;
        for t in &self.aut_tables {
            let img = apply(t, mask);
            if img < mask {
                return Ok(MaskStatus::NotCanonical);
            }
            fixed |= img == mask;
        }
        if fixed {
            return Ok(MaskStatus::NontrivialStabilizer);
        }
        let (regular, fast) = self.is_regular(mask)?;
        Ok(if regular {
            MaskStatus::Regular { fast }
        } else {
            MaskStatus::Witness
        })
    }
}

fn count_cycles(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for i in 0..perm.len() {
        if !seen[i] {
            cycles += 1;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
            }
        }
    }
    cycles
}

/// Outcome of an orbit-reduced sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub group: String,
    pub kind: Kind,
    pub positions: usize,
    pub raw_subsets: u64,
    pub aut_order: usize,
    /// Canonical masks visited (equals `burnside_classes` for a full sweep).
    pub orbit_classes: u64,
    pub burnside_classes: u64,
    pub trivial_stabilizer_classes: u64,
    pub decided_by_refinement: u64,
    /// Least witness in mask order, as element indices.
    pub witness: Option<Vec<usize>>,
    /// Whether every subset was visited.
    pub complete: bool,
}

impl SweepReport {
    /// A complete sweep without witnesses certifies that `R` is detecting.
    pub fn certifies_detecting(&self) -> bool {
        self.complete && self.witness.is_none() && self.orbit_classes == self.burnside_classes
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    classes: u64,
    trivial: u64,
    fast: u64,
    witness: Option<u64>,
}

fn sweep_range(t: &Tester, lo: u64, hi: u64, stop_at_first: bool) -> Result<Tally> {
    let mut tally = Tally::default();
    for mask in lo..hi {
        match t.status(mask)? {
            MaskStatus::NotCanonical => continue,
            MaskStatus::NontrivialStabilizer => tally.classes += 1,
            MaskStatus::Regular { fast } => {
                tally.classes += 1;
                tally.trivial += 1;
                tally.fast += fast as u64;
            }
            MaskStatus::Witness => {
                tally.classes += 1;
                tally.trivial += 1;
                if tally.witness.is_none() {
                    tally.witness = Some(mask);
                }
                if stop_at_first {
                    break;
                }
            }
        }
    }
    Ok(tally)
}

/// Visits one connection set per `Aut(R)`-orbit (inverse-closed sets for
/// [`Kind::Graph`]) and tests every set with `Aut(R)_S = 1`.
///
/// With `stop_at_first`, the sweep ends at the first super-chunk containing a
/// witness; the reported witness is still the least one overall.
pub fn exhaustive_sweep(r: &SquarefreeGroup, kind: Kind, stop_at_first: bool) -> Result<SweepReport> {
    let t = Tester::new(r, kind)?;
    let npos = t.positions.len();
    if npos > MAX_SWEEP_POSITIONS {
        return Err(Error::TooLarge {
            size: 1u128 << npos,
            bound: 1u128 << MAX_SWEEP_POSITIONS,
        });
    }
    let total: u64 = 1 << npos;
    let mut acc = Tally::default();
    let mut complete = true;
    let mut start = 0u64;
    while start < total {
        let end = (start + SUPER_CHUNK).min(total);
        let chunks: Vec<(u64, u64)> = (start..end)
            .step_by(CHUNK as usize)
            .map(|lo| (lo, (lo + CHUNK).min(end)))
            .collect();
        let tallies: Vec<Tally> = chunks
            .par_iter()
            .map(|&(lo, hi)| sweep_range(&t, lo, hi, stop_at_first))
            .collect::<Result<_>>()?;
        for x in tallies {
            acc.classes += x.classes;
            acc.trivial += x.trivial;
            acc.fast += x.fast;
            if acc.witness.is_none() {
                acc.witness = x.witness;
            }
        }
        start = end;
        if stop_at_first && acc.witness.is_some() {
            complete = end == total;
            break;
        }
    }
    Ok(SweepReport {
        group: r.literal(),
        kind,
        positions: npos,
        raw_subsets: 1u64 << npos,
        aut_order: t.aut_order(),
        orbit_classes: acc.classes,
        burnside_classes: t.burnside_count() as u64,
        trivial_stabilizer_classes: acc.trivial,
        decided_by_refinement: acc.fast,
        witness: acc.witness.map(|m| t.positions.elements_of(m as u128)),
        complete,
    })
}

/// Search bound for [`find_drr_set`] and [`find_grr_set`].
pub const MAX_SET_SEARCH_ORDER: usize = 128;

type SetCache = Mutex<HashMap<((u64, u64, u64, u64), Kind), ConnectionSet>>;

fn set_cache() -> &'static SetCache {
    static CACHE: OnceLock<SetCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Whether `h` admits a GRR, for groups of squarefree order: all but the
/// abelian groups of exponent greater than 2 and the dihedral groups of
/// orders 6 and 10.
pub fn admits_grr(h: &SquarefreeGroup) -> bool {
    if h.is_abelian() {
        return h.order() <= 2;
    }
    !matches!(h.params(), (1, 3, 2, _) | (1, 5, 2, _))
}

/// A connection set `S = S⁻¹` with `Cay(H, S)` a GRR; the first found by
/// increasing `|S|`, lexicographic order among subsets of inverse classes.
pub fn find_grr_set(h: &SquarefreeGroup) -> Result<ConnectionSet> {
    if !admits_grr(h) {
        return Err(Error::NoGrrExists(h.name()));
    }
    find_regular_set(h, Kind::Graph)
}

/// A connection set with `Cay(H, S)` a DRR, found as in [`find_grr_set`].
pub fn find_drr_set(h: &SquarefreeGroup) -> Result<ConnectionSet> {
    find_regular_set(h, Kind::Digraph)
}

fn find_regular_set(h: &SquarefreeGroup, kind: Kind) -> Result<ConnectionSet> {
    h.check_bound(MAX_SET_SEARCH_ORDER)?;
    let key = (h.params(), kind);
    if let Some(s) = set_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(s.clone());
    }
    let s = search_regular_set(h, kind)?;
    set_cache()
        .lock()
        .expect("cache poisoned")
        .insert(key, s.clone());
    Ok(s)
}

/// Lexicographic comparison of two equal-size sets given as masks: the
/// first differing element decides.
fn lex_less(a: u128, b: u128) -> bool {
    let d = a ^ b;
    d != 0 && a & (d & d.wrapping_neg()) != 0
}

fn search_regular_set(h: &SquarefreeGroup, kind: Kind) -> Result<ConnectionSet> {
    let positions = Positions::new(h, kind);
    let npos = positions.len();
    if h.len() <= 2 {
        return Ok(positions.connection_set(h, (1u128 << npos) - 1));
    }
    let aut = automorphism_group(h)?;
    let perms: Vec<Vec<usize>> = aut
        .nontrivial()
        .iter()
        .map(|a| positions.induced(a.map()))
        .collect();
    let image = |perm: &[usize], mask: u128| {
        let mut out = 0u128;
        let mut m = mask;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1u128 << perm[p];
        }
        out
    };
    for k in 1..=npos {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mask = idx.iter().fold(0u128, |m, &p| m | 1u128 << p);
            let mut canonical = true;
            let mut trivial = true;
            for p in &perms {
                let img = image(p, mask);
                if img == mask {
                    trivial = false;
                } else if lex_less(img, mask) {
                    canonical = false;
                    break;
                }
            }
            if canonical && trivial {
                let s = positions.connection_set(h, mask);
                let g = build_cayley(h, &s)?;
                if stabilizer_witness(&g)?.is_none() {
                    return Ok(s);
                }
            }
            // Next combination in lexicographic order.
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < npos - k + i {
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    match kind {
        Kind::Graph => Err(Error::NoGrrExists(h.name())),
        Kind::Digraph => Err(Error::Internal(format!("no DRR found on {}", h.name()))),
    }
}

/// Shared handle for callers that keep a tester around.
pub fn tester(r: &SquarefreeGroup, kind: Kind) -> Result<Arc<Tester>> {
    Ok(Arc::new(Tester::new(r, kind)?))
}

/// Element set helper for masks over element indices.
pub fn mask_to_set(r: &SquarefreeGroup, mask: u64) -> ElemSet {
    ElemSet::from_iter(r.len(), (0..r.len()).filter(|&i| mask >> i & 1 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_six_is_detecting() {
        let d6: SquarefreeGroup = "D6".parse().unwrap();
        let rep = exhaustive_sweep(&d6, Kind::Digraph, false).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.orbit_classes, rep.burnside_classes);
        assert!(rep.certifies_detecting());
    }

    #[test]
    fn abelian_has_digraph_witness() {
        let c6: SquarefreeGroup = "C6".parse().unwrap();
        let rep = exhaustive_sweep(&c6, Kind::Digraph, false).unwrap();
        assert!(rep.witness.is_some());
        let g = exhaustive_sweep(&c6, Kind::Graph, false).unwrap();
        assert!(g.witness.is_none());
        assert_eq!(g.trivial_stabilizer_classes, 0);
    }

    #[test]
    fn lex_order() {
        assert!(lex_less(0b0011, 0b0101));
        assert!(!lex_less(0b0101, 0b0011));
        assert!(lex_less(0b1001, 0b1010));
    }

    #[test]
    fn regular_sets() {
        let c5: SquarefreeGroup = "C5".parse().unwrap();
        assert_eq!(find_drr_set(&c5).unwrap().to_vec(), vec![1]);
        let d6: SquarefreeGroup = "D6".parse().unwrap();
        assert!(matches!(find_grr_set(&d6), Err(Error::NoGrrExists(_))));
        let f21: SquarefreeGroup = "F21".parse().unwrap();
        let s = find_grr_set(&f21).unwrap();
        assert!(s.is_inverse_closed());
        assert!(crate::cayley::is_grr(&f21, &s).unwrap());
    }
}
