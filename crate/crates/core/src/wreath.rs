//! Generalised wreath products: pairs `1 < K ⊴ H < R` with
//! `K(S∖H) = S∖H = (S∖H)K`.

use rayon::prelude::*;

use crate::aut::{is_characteristic, set_stabilizer};
use crate::cayley::{build_cayley, CayleyDigraph, ConnectionSet};
use crate::error::{Error, Result};
use crate::group::{ElemSet, SquarefreeGroup, Subgroup};
use crate::perm::{right_mult, PermGroup, Permutation};

/// A verified pair `(K, H)` for a connection set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathCertificate {
    pub k: Subgroup,
    pub h: Subgroup,
    /// `K(S∖H) = S∖H` was checked directly.
    pub left_checked: bool,
    /// `(S∖H)K = S∖H` was checked directly.
    pub right_checked: bool,
    /// The right-hand condition follows from the left one because `K ⊴ R`
    /// or `S = S⁻¹`, and was not checked separately.
    pub right_by_equivalence: bool,
    /// `S ⊆ H`, so the condition is vacuous.
    pub degenerate: bool,
}

impl WreathCertificate {
    /// `K = H`: an ordinary wreath product rather than a generalised one.
    pub fn is_plain(&self) -> bool {
        self.k.order() == self.h.order()
    }

    pub fn describe(&self, r: &SquarefreeGroup) -> String {
        format!(
            "K = {} (order {}), H = {} (order {}){}",
            self.k.describe(r),
            self.k.order(),
            self.h.describe(r),
            self.h.order(),
            if self.degenerate { ", degenerate" } else { "" }
        )
    }
}

fn normal_in(r: &SquarefreeGroup, k: &Subgroup, h: &Subgroup) -> bool {
    h.generators
        .iter()
        .all(|&g| k.elements.iter().all(|&x| k.contains(r.conj_idx(g, x))))
}

fn check_chain(r: &SquarefreeGroup, k: &Subgroup, h: &Subgroup) -> Result<()> {
    if k.order() <= 1 {
        return Err(Error::BadChain("K is trivial".into()));
    }
    if !k.is_subgroup_of(h) {
        return Err(Error::BadChain("K is not contained in H".into()));
    }
    if h.order() >= r.len() {
        return Err(Error::BadChain("H is not proper in R".into()));
    }
    if !normal_in(r, k, h) {
        return Err(Error::BadChain("K is not normal in H".into()));
    }
    Ok(())
}

/// `K·T = T`, checked on generators of `K`.
fn left_stable(r: &SquarefreeGroup, k: &Subgroup, t: &ElemSet) -> bool {
    k.generators
        .iter()
        .all(|&g| t.iter().all(|x| t.contains(r.mul_idx(g, x))))
}

fn right_stable(r: &SquarefreeGroup, k: &Subgroup, t: &ElemSet) -> bool {
    k.generators
        .iter()
        .all(|&g| t.iter().all(|x| t.contains(r.mul_idx(x, g))))
}

/// Checks the wreath condition for `(K, H)`; `None` when it fails.
///
/// When `K ⊴ R` or `S = S⁻¹` the two one-sided conditions are equivalent,
/// so only `K(S∖H) = S∖H` is computed.
pub fn check_wreath_condition(
    r: &SquarefreeGroup,
    s: &ElemSet,
    k: &Subgroup,
    h: &Subgroup,
) -> Result<Option<WreathCertificate>> {
    check_chain(r, k, h)?;
    let t = s.difference(&h.set);
    let degenerate = t.is_empty();
    if !left_stable(r, k, &t) {
        return Ok(None);
    }
    let inverse_closed = s.iter().all(|g| s.contains(r.inv_idx(g)));
    let by_equivalence = k.is_normal || inverse_closed;
    if !by_equivalence && !right_stable(r, k, &t) {
        return Ok(None);
    }
    Ok(Some(WreathCertificate {
        k: k.clone(),
        h: h.clone(),
        left_checked: true,
        right_checked: !by_equivalence,
        right_by_equivalence: by_equivalence,
        degenerate,
    }))
}

/// All chains `1 < K ⊴ H < R` in scan order: by `|H|`, then `|K|`, then
/// position in [`SquarefreeGroup::subgroups`].
pub fn admissible_pairs(r: &SquarefreeGroup) -> Result<Vec<(Subgroup, Subgroup)>> {
    let subs = r.subgroups()?;
    let mut pairs = Vec::new();
    for (hi, h) in subs.iter().enumerate() {
        if h.order() >= r.len() {
            continue;
        }
        for (ki, k) in subs.iter().enumerate() {
            if k.order() > 1 && k.is_subgroup_of(h) && normal_in(r, k, h) {
                pairs.push(((h.order(), k.order(), hi, ki), (k.clone(), h.clone())));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(pairs.into_iter().map(|(_, p)| p).collect())
}

/// The first pair in scan order satisfying the wreath condition.
pub fn find_gen_wreath(r: &SquarefreeGroup, s: &ElemSet) -> Result<Option<WreathCertificate>> {
    let pairs = admissible_pairs(r)?;
    let found = pairs
        .par_iter()
        .map(|(k, h)| check_wreath_condition(r, s, k, h))
        .find_first(|c| !matches!(c, Ok(None)));
    found.transpose().map(Option::flatten)
}

/// The vertex map that right-multiplies the elements of `H` by `k` and
/// fixes every other vertex. It is an automorphism of `Cay(R, S)` outside `R̂`.
pub fn alpha_k(g: &CayleyDigraph, cert: &WreathCertificate, k: usize) -> Result<Permutation> {
    if k == 0 || !cert.k.contains(k) {
        return Err(Error::NotInK);
    }
    let r = &g.group;
    let alpha = Permutation::from_fn(r.len(), |v| {
        if cert.h.contains(v) {
            r.mul_idx(v, k)
        } else {
            v
        }
    })?;
    if !g.is_automorphism(&alpha) {
        return Err(Error::Internal(format!(
            "vertex map for k = {} is not an automorphism",
            r.format_idx(k)
        )));
    }
    if g.in_regular(&alpha) {
        return Err(Error::Internal("vertex map lies in the regular group".into()));
    }
    Ok(alpha)
}

/// Tests `K(S∖H) = S∖H` together with `K(S∖K) ≠ S∖K`, for `K`
/// characteristic in `R` and maximal in `H`. When both hold, every element
/// of `Aut(R)_S` is checked to map `H` to itself.
pub fn char_h_blocks(r: &SquarefreeGroup, s: &ElemSet, k: &Subgroup, h: &Subgroup) -> Result<bool> {
    if k.order() <= 1 || k.order() >= h.order() || h.order() >= r.len() || !k.is_subgroup_of(h) {
        return Err(Error::HypothesisViolated("need 1 < K < H < R".into()));
    }
    if !is_characteristic(r, k)? {
        return Err(Error::HypothesisViolated("K is not characteristic in R".into()));
    }
    let between = r
        .subgroups()?
        .into_iter()
        .any(|l| l.order() > k.order() && l.order() < h.order() && k.is_subgroup_of(&l) && l.is_subgroup_of(h));
    if between {
        return Err(Error::HypothesisViolated("K is not maximal in H".into()));
    }
    let outside_h = s.difference(&h.set);
    let outside_k = s.difference(&k.set);
    let holds = left_stable(r, k, &outside_h) && !left_stable(r, k, &outside_k);
    if holds {
        let stab = set_stabilizer(r, s)?;
        if !stab.elements.iter().all(|a| a.fixes_subgroup(h)) {
            return Err(Error::Internal("Aut(R)_S does not normalise H".into()));
        }
    }
    Ok(holds)
}

/// Derives the wreath condition from a group `R̂ ≤ G ≤ Aut(Cay(R, S))`.
///
/// With `G₁` the stabilizer of the identity vertex, `G₁K ⊆ G₁G₁^r` holds
/// exactly when `rK` lies in the `G₁`-orbit of `r`, and `G₁K^r ⊆ G₁G₁^r`
/// exactly when `Kr` does; `H ≤ N_R(G₁)` means `G₁` fixes `H` pointwise.
/// Both inclusions are required for every `r ∉ H`, the second only when
/// `S ≠ S⁻¹`. A successful result is re-verified by [`check_wreath_condition`].
pub fn gen_wreath_from_stabilizer(
    r: &SquarefreeGroup,
    s: &ConnectionSet,
    g: &PermGroup,
    k: &Subgroup,
    h: &Subgroup,
) -> Result<WreathCertificate> {
    let gamma = build_cayley(r, s)?;
    if g.degree() != r.len() {
        return Err(Error::DegreeMismatch {
            expected: r.len(),
            found: g.degree(),
        });
    }
    if !g.generators().iter().all(|p| gamma.is_automorphism(p)) {
        return Err(Error::NotAutSubgroup);
    }
    for gen in r.generators() {
        if !g.contains(&right_mult(r, gen))? {
            return Err(Error::NotAutSubgroup);
        }
    }
    check_chain(r, k, h)?;
    let g1 = g.point_stabilizer(0);
    if !h.elements.iter().all(|&x| g1.generators().iter().all(|p| p.fixes(x))) {
        return Err(Error::HypothesisNotMet("H does not normalise G_1".into()));
    }
    let mut orbit_of = vec![usize::MAX; r.len()];
    for (i, orb) in g1.orbits().into_iter().enumerate() {
        for v in orb {
            orbit_of[v] = i;
        }
    }
    let both = !s.is_inverse_closed();
    for x in 0..r.len() {
        if h.contains(x) {
            continue;
        }
        for &kk in &k.elements {
            if orbit_of[r.mul_idx(x, kk)] != orbit_of[x] {
                return Err(Error::HypothesisNotMet(format!(
                    "G_1 K is not inside G_1 G_1^r for r = {}",
                    r.format_idx(x)
                )));
            }
            if both && orbit_of[r.mul_idx(kk, x)] != orbit_of[x] {
                return Err(Error::HypothesisNotMet(format!(
                    "G_1 K^r is not inside G_1 G_1^r for r = {}",
                    r.format_idx(x)
                )));
            }
        }
    }
    match check_wreath_condition(r, s.as_set(), k, h)? {
        Some(c) => Ok(c),
        None => panic!("coset inclusions hold but the wreath condition fails"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_coset_in_f21() {
        let r: SquarefreeGroup = "F21".parse().unwrap();
        let s = ConnectionSet::parse(&r, "<y>*x").unwrap();
        let y = r.index(&r.y());
        let k = r.subgroup(&[y]);
        let cert = check_wreath_condition(&r, s.as_set(), &k, &k).unwrap().unwrap();
        assert!(!cert.degenerate);
        let g = build_cayley(&r, &s).unwrap();
        let a = alpha_k(&g, &cert, y).unwrap();
        let moved: Vec<usize> = (0..21).filter(|&v| !a.fixes(v)).collect();
        assert_eq!(moved, k.elements);
        assert_eq!(alpha_k(&g, &cert, 0).unwrap_err(), Error::NotInK);
    }

    #[test]
    fn scan_order() {
        let r: SquarefreeGroup = "F21".parse().unwrap();
        let x = r.index(&r.x());
        let s = ElemSet::from_iter(21, [x]);
        let c = find_gen_wreath(&r, &s).unwrap().unwrap();
        assert!(c.degenerate);
        assert_eq!(c.h.order(), 3);
        assert!(c.h.contains(x));
        let y = r.index(&r.y());
        let s = ElemSet::from_iter(21, [x, y]);
        assert!(find_gen_wreath(&r, &s).unwrap().is_none());
    }

    #[test]
    fn regular_group_fails_hypotheses() {
        let r: SquarefreeGroup = "F21".parse().unwrap();
        let s = ConnectionSet::parse(&r, "<y>*x").unwrap();
        let g = crate::perm::regular_representation(&r).unwrap();
        let k = r.subgroup(&[r.index(&r.y())]);
        assert!(matches!(
            gen_wreath_from_stabilizer(&r, &s, &g, &k, &k),
            Err(Error::HypothesisNotMet(_))
        ));
    }
}
