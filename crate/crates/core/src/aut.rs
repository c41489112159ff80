//! Automorphisms of groups of squarefree order.
//!
//! `Aut(R)` is found by brute force over images of the generators `z, y, x`
//! that respect the defining relations. The special automorphisms used to
//! show `Aut(R)_S > 1` for wreath-type connection sets are built here too.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElemSet, GroupElement, SquarefreeGroup, Subgroup, ENGINE_BOUND};
use crate::perm::Permutation;

/// An automorphism, stored by the images of `z, y, x` and the induced map on
/// element indices.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupAutomorphism {
    pub z: GroupElement,
    pub y: GroupElement,
    pub x: GroupElement,
    #[serde(skip)]
    map: Vec<u32>,
}

impl std::fmt::Debug for GroupAutomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Aut(z->({},{},{}), y->({},{},{}), x->({},{},{}))",
            self.z.a, self.z.b, self.z.c, self.y.a, self.y.b, self.y.c, self.x.a, self.x.b, self.x.c
        )
    }
}

fn powers(r: &SquarefreeGroup, g: usize, k: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k as usize);
    let mut p = 0;
    for _ in 0..k {
        out.push(p);
        p = r.mul_idx(p, g);
    }
    out
}

impl GroupAutomorphism {
    /// Builds the endomorphism `z^a y^b x^c ↦ z'^a y'^b x'^c` and checks that
    /// it is a well-defined bijective homomorphism.
    pub fn from_images(
        r: &SquarefreeGroup,
        z: GroupElement,
        y: GroupElement,
        x: GroupElement,
    ) -> Result<Self> {
        let (zi, yi, xi) = (r.index(&z), r.index(&y), r.index(&x));
        let bad = |why: &str| Error::HypothesisFailed(format!("generator images {why}"));
        if r.pow_idx(zi, r.t() as i64) != 0
            || r.pow_idx(yi, r.n() as i64) != 0
            || r.pow_idx(xi, r.m() as i64) != 0
        {
            return Err(bad("have the wrong orders"));
        }
        if !r.commutes(zi, yi) || !r.commutes(zi, xi) {
            return Err(bad("break centrality of z"));
        }
        if r.conj_idx(xi, yi) != r.pow_idx(yi, r.j() as i64) {
            return Err(bad("break x y x^-1 = y^j"));
        }
        let map = Self::induced_map(r, zi, yi, xi).ok_or_else(|| bad("are not bijective"))?;
        Ok(GroupAutomorphism { z, y, x, map })
    }

    fn induced_map(r: &SquarefreeGroup, zi: usize, yi: usize, xi: usize) -> Option<Vec<u32>> {
        let zp = powers(r, zi, r.t());
        let yp = powers(r, yi, r.n());
        let xp = powers(r, xi, r.m());
        let mut map = vec![0u32; r.len()];
        let mut seen = ElemSet::new(r.len());
        for (g, slot) in map.iter_mut().enumerate() {
            let e = r.elem(g);
            let v = r.mul_idx(r.mul_idx(zp[e.a as usize], yp[e.b as usize]), xp[e.c as usize]);
            if !seen.insert(v) {
                return None;
            }
            *slot = v as u32;
        }
        Some(map)
    }

    pub fn identity(r: &SquarefreeGroup) -> Self {
        GroupAutomorphism {
            z: r.z(),
            y: r.y(),
            x: r.x(),
            map: (0..r.len() as u32).collect(),
        }
    }

    /// Conjugation `h ↦ g·h·g⁻¹`.
    pub fn inner(r: &SquarefreeGroup, g: usize) -> Self {
        let img = |h: GroupElement| r.elem(r.conj_idx(g, r.index(&h)));
        let map = (0..r.len()).map(|h| r.conj_idx(g, h) as u32).collect();
        GroupAutomorphism {
            z: img(r.z()),
            y: img(r.y()),
            x: img(r.x()),
            map,
        }
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.map[g] as usize
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self` first, then `other`.
    pub fn then(&self, r: &SquarefreeGroup, other: &GroupAutomorphism) -> GroupAutomorphism {
        let map: Vec<u32> = self.map.iter().map(|&v| other.map[v as usize]).collect();
        let img = |g: GroupElement| r.elem(map[r.index(&g)] as usize);
        GroupAutomorphism {
            z: img(r.z()),
            y: img(r.y()),
            x: img(r.x()),
            map,
        }
    }

    pub fn inverse(&self, r: &SquarefreeGroup) -> GroupAutomorphism {
        let mut map = vec![0u32; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[v as usize] = i as u32;
        }
        let img = |g: GroupElement| r.elem(map[r.index(&g)] as usize);
        GroupAutomorphism {
            z: img(r.z()),
            y: img(r.y()),
            x: img(r.x()),
            map,
        }
    }

    /// The induced permutation of the elements of `R`.
    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_images(self.map.clone()).expect("automorphisms are bijective")
    }

    pub fn fixes_set(&self, s: &ElemSet) -> bool {
        s.iter().all(|g| s.contains(self.apply(g)))
    }

    pub fn fixes_subgroup(&self, h: &Subgroup) -> bool {
        h.generators.iter().all(|&g| h.contains(self.apply(g)))
    }

    /// Checks `φ(gh) = φ(g)φ(h)` on all pairs.
    pub fn is_multiplicative(&self, r: &SquarefreeGroup) -> bool {
        (0..r.len()).all(|g| {
            (0..r.len()).all(|h| self.apply(r.mul_idx(g, h)) == r.mul_idx(self.apply(g), self.apply(h)))
        })
    }
}

/// `Aut(R)` as an explicit list; the identity comes first.
#[derive(Debug, Clone)]
pub struct AutGroup {
    pub group: SquarefreeGroup,
    elements: Vec<GroupAutomorphism>,
}

impl AutGroup {
    pub fn elements(&self) -> &[GroupAutomorphism] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Non-identity automorphisms.
    pub fn nontrivial(&self) -> &[GroupAutomorphism] {
        &self.elements[1..]
    }

    pub fn stabilizer(&self, s: &ElemSet) -> Vec<GroupAutomorphism> {
        self.elements.iter().filter(|a| a.fixes_set(s)).cloned().collect()
    }

    /// Whether only the identity fixes `s`.
    pub fn stabilizer_is_trivial(&self, s: &ElemSet) -> bool {
        self.nontrivial().iter().all(|a| !a.fixes_set(s))
    }
}

fn aut_cache() -> &'static Mutex<HashMap<(u64, u64, u64, u64), Arc<AutGroup>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64, u64), Arc<AutGroup>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All automorphisms of `R`; memoized per group.
pub fn automorphism_group(r: &SquarefreeGroup) -> Result<Arc<AutGroup>> {
    r.check_bound(ENGINE_BOUND)?;
    if let Some(a) = aut_cache().lock().expect("cache lock").get(&r.params()) {
        return Ok(a.clone());
    }
    let a = Arc::new(compute_aut(r));
    aut_cache()
        .lock()
        .expect("cache lock")
        .insert(r.params(), a.clone());
    Ok(a)
}

fn compute_aut(r: &SquarefreeGroup) -> AutGroup {
    let centre = r.centre();
    let zs: Vec<usize> = centre
        .elements
        .iter()
        .copied()
        .filter(|&g| r.order_idx(g) == r.t())
        .collect();
    let yi = r.index(&r.y());
    let ys: Vec<usize> = (0..r.n())
        .map(|b| r.pow_idx(yi, b as i64))
        .filter(|&g| r.order_idx(g) == r.n())
        .collect();
    let xs: Vec<usize> = (0..r.len()).filter(|&g| r.order_idx(g) == r.m()).collect();
    let mut elements = vec![GroupAutomorphism::identity(r)];
    for &zi in &zs {
        for &yi in &ys {
            let yj = r.pow_idx(yi, r.j() as i64);
            for &xi in &xs {
                if r.conj_idx(xi, yi) != yj {
                    continue;
                }
                if (zi, yi, xi) == (r.index(&r.z()), r.index(&r.y()), r.index(&r.x())) {
                    continue;
                }
                if let Some(map) = GroupAutomorphism::induced_map(r, zi, yi, xi) {
                    elements.push(GroupAutomorphism {
                        z: r.elem(zi),
                        y: r.elem(yi),
                        x: r.elem(xi),
                        map,
                    });
                }
            }
        }
    }
    elements[1..].sort_by(|a, b| a.map.cmp(&b.map));
    AutGroup {
        group: r.clone(),
        elements,
    }
}

/// `Aut(R)_S` together with `|Aut(R)|`.
#[derive(Debug, Clone)]
pub struct AutStabReport {
    pub aut_order: usize,
    pub elements: Vec<GroupAutomorphism>,
    pub trivial: bool,
}

/// The setwise stabilizer `Aut(R)_S`.
pub fn set_stabilizer(r: &SquarefreeGroup, s: &ElemSet) -> Result<AutStabReport> {
    if s.contains(0) {
        return Err(Error::IdentityInS);
    }
    let aut = automorphism_group(r)?;
    let elements = aut.stabilizer(s);
    Ok(AutStabReport {
        aut_order: aut.order(),
        trivial: elements.len() == 1,
        elements,
    })
}

/// Whether `K` is invariant under every automorphism of `R`.
pub fn is_characteristic(r: &SquarefreeGroup, k: &Subgroup) -> Result<bool> {
    let aut = automorphism_group(r)?;
    Ok(aut.elements().iter().all(|a| a.fixes_subgroup(k)))
}

/// Reflection exponent `c` such that conjugation by `y^c x` in a dihedral
/// group of order `2r` preserves the set of reflections `{y^b x : b ∈ bs}`.
///
/// Conjugation by `y^c x` sends `y^b x` to `y^{2c-b} x`.
fn midpoint_reflection(r: u64, bs: &[u64]) -> u64 {
    let half = (r + 1) / 2;
    let choose = |v: &[u64]| -> Option<u64> {
        match v {
            [] => Some(0),
            [b] => Some(*b),
            [b1, b2] => Some((b1 + b2) * half % r),
            _ => None,
        }
    };
    if let Some(c) = choose(bs) {
        return c;
    }
    let complement: Vec<u64> = (0..r).filter(|b| !bs.contains(b)).collect();
    if let Some(c) = choose(&complement) {
        return c;
    }
    // More than two reflections on both sides only happens for r > 5; pick
    // any c that works.
    (0..r)
        .find(|&c| bs.iter().all(|&b| bs.contains(&((2 * c + r - b % r) % r))))
        .unwrap_or(0)
}

fn dihedral_params(r: &SquarefreeGroup) -> Option<u64> {
    (r.m() == 2 && matches!(r.n(), 3 | 5)).then_some(r.n())
}

/// For `D ∈ {D6, D10}` and inverse-closed `S`, a nontrivial automorphism
/// fixing `S` and inverting the rotations: conjugation by a well-chosen
/// reflection.
pub fn dihedral_beta(d: &SquarefreeGroup, s: &ElemSet) -> Result<GroupAutomorphism> {
    let rr = match (d.t(), dihedral_params(d)) {
        (1, Some(rr)) => rr,
        _ => return Err(Error::WrongShape(format!("{} is not D6 or D10", d.name()))),
    };
    if s.contains(0) {
        return Err(Error::IdentityInS);
    }
    if s.iter().any(|g| !s.contains(d.inv_idx(g))) {
        return Err(Error::NotInverseClosed);
    }
    let bs: Vec<u64> = s
        .iter()
        .map(|g| d.elem(g))
        .filter(|e| e.c == 1)
        .map(|e| e.b)
        .collect();
    let c = midpoint_reflection(rr, &bs);
    let w = d.index(&GroupElement::new(0, c, 1));
    let beta = GroupAutomorphism::inner(d, w);
    if beta.is_identity() || !beta.fixes_set(s) {
        return Err(Error::Internal("dihedral reflection choice failed".into()));
    }
    Ok(beta)
}

/// Conjugation by some `k ∈ (Z(H) ∩ K) ∖ Z(R)`, which fixes `S` whenever
/// `(K, H)` satisfies the wreath condition for `S`.
pub fn conjugation_witness(
    r: &SquarefreeGroup,
    k: &Subgroup,
    h: &Subgroup,
    s: &ElemSet,
) -> Result<GroupAutomorphism> {
    if crate::wreath::check_wreath_condition(r, s, k, h)?.is_none() {
        return Err(Error::HypothesisFailed(
            "(K, H) does not satisfy the wreath condition for S".into(),
        ));
    }
    let gens = r.generators();
    let kk = k
        .elements
        .iter()
        .copied()
        .find(|&g| {
            h.generators.iter().all(|&hh| r.commutes(g, hh)) && !gens.iter().all(|&x| r.commutes(g, x))
        })
        .ok_or_else(|| Error::HypothesisFailed("Z(H) ∩ K is contained in Z(R)".into()))?;
    let alpha = GroupAutomorphism::inner(r, kk);
    if alpha.is_identity() || !alpha.fixes_set(s) {
        return Err(Error::Internal("conjugation does not fix S".into()));
    }
    Ok(alpha)
}

/// Which normalized `(K, H)` pair an automorphism came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QdrCase {
    /// `K = <y>`, `H = <x, y>`.
    RotationsInDihedral,
    /// `K = <y>`, `H = <y, z>`.
    RotationsInCyclic,
    /// `K = <z>`, `H = <y, z>`.
    CentreInCyclicRotations,
    /// `K = <z>`, `H = <x, z>`.
    CentreWithReflection,
    /// `K = <x>`, `H = <x, z>`.
    ReflectionWithCentre,
}

/// For `R = C_q × D_{2r}` (`r ∈ {3, 5}`), inverse-closed `S`, and a wreath
/// certificate `(K, H)` with `|K|` prime, a nontrivial element of `Aut(R)_S`.
///
/// `(K, H)` is first conjugated so that `K` is generated by `x`, `y` or `z`,
/// and `H` is enlarged to a maximal proper subgroup normalizing `K`.
pub fn qdr_wreath_witness(
    r: &SquarefreeGroup,
    k: &Subgroup,
    h: &Subgroup,
    s: &ElemSet,
) -> Result<(GroupAutomorphism, QdrCase)> {
    let q = r.t();
    let rr = dihedral_params(r).filter(|&rr| q > 2 && crate::arith::is_prime(q) && q != rr);
    let Some(rr) = rr else {
        return Err(Error::WrongShape(format!(
            "{} is not C_q x D_2r with r in {{3, 5}} and q an odd prime other than r",
            r.name()
        )));
    };
    if s.contains(0) {
        return Err(Error::IdentityInS);
    }
    if s.iter().any(|g| !s.contains(r.inv_idx(g))) {
        return Err(Error::NotInverseClosed);
    }
    if !crate::arith::is_prime(k.order() as u64) {
        return Err(Error::HypothesisFailed("|K| is not prime".into()));
    }
    if crate::wreath::check_wreath_condition(r, s, k, h)?.is_none() {
        return Err(Error::HypothesisFailed(
            "(K, H) does not satisfy the wreath condition for S".into(),
        ));
    }
    let (zi, yi, xi) = (r.index(&r.z()), r.index(&r.y()), r.index(&r.x()));
    let sub = |g: &[usize]| r.subgroup(g);
    let cases = [
        (QdrCase::RotationsInDihedral, sub(&[yi]), sub(&[xi, yi])),
        (QdrCase::RotationsInCyclic, sub(&[yi]), sub(&[yi, zi])),
        (QdrCase::CentreInCyclicRotations, sub(&[zi]), sub(&[yi, zi])),
        (QdrCase::CentreWithReflection, sub(&[zi]), sub(&[xi, zi])),
        (QdrCase::ReflectionWithCentre, sub(&[xi]), sub(&[xi, zi])),
    ];
    for (case, ki, hi) in &cases {
        for g in 0..r.len() {
            let kg = r.conjugate(k, g);
            if kg.elements != ki.elements || !r.conjugate(h, g).is_subgroup_of(hi) {
                continue;
            }
            let iota = GroupAutomorphism::inner(r, g);
            let s2 = ElemSet::from_iter(r.len(), s.iter().map(|v| iota.apply(v)));
            let a2 = match case {
                QdrCase::RotationsInCyclic | QdrCase::ReflectionWithCentre => {
                    conjugation_witness(r, ki, hi, &s2)?
                }
                QdrCase::RotationsInDihedral => {
                    let bs: Vec<u64> = s2
                        .iter()
                        .map(|v| r.elem(v))
                        .filter(|e| e.a == 0 && e.c == 1)
                        .map(|e| e.b)
                        .collect();
                    let c = midpoint_reflection(rr, &bs);
                    GroupAutomorphism::inner(r, r.index(&GroupElement::new(0, c, 1)))
                }
                QdrCase::CentreInCyclicRotations => {
                    // Reflections of the quotient R/<z> ≅ D_2r that occur in S.
                    let mut bs: Vec<u64> = s2
                        .iter()
                        .map(|v| r.elem(v))
                        .filter(|e| e.c == 1)
                        .map(|e| e.b)
                        .collect();
                    bs.sort_unstable();
                    bs.dedup();
                    let c = midpoint_reflection(rr, &bs);
                    GroupAutomorphism::from_images(
                        r,
                        r.inv(&r.z()),
                        r.inv(&r.y()),
                        GroupElement::new(0, 2 * c % rr, 1),
                    )?
                }
                QdrCase::CentreWithReflection => {
                    GroupAutomorphism::from_images(r, r.inv(&r.z()), r.y(), r.x())?
                }
            };
            let alpha = iota.then(r, &a2).then(r, &iota.inverse(r));
            if alpha.is_identity() || !alpha.fixes_set(s) {
                return Err(Error::Internal(format!(
                    "automorphism for case {case:?} does not fix S"
                )));
            }
            return Ok((alpha, *case));
        }
    }
    Err(Error::NoCaseMatched {
        k: k.describe(r),
        h: h.describe(r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> SquarefreeGroup {
        s.parse().unwrap()
    }

    #[test]
    fn aut_orders() {
        assert_eq!(automorphism_group(&g("C7")).unwrap().order(), 6);
        assert_eq!(automorphism_group(&g("D6")).unwrap().order(), 6);
        assert_eq!(automorphism_group(&g("F21")).unwrap().order(), 42);
        assert_eq!(automorphism_group(&g("C1")).unwrap().order(), 1);
    }

    #[test]
    fn automorphisms_are_multiplicative() {
        let r = g("sqfree:t=5,n=3,m=2,j=2");
        let aut = automorphism_group(&r).unwrap();
        assert_eq!(aut.order(), 4 * 6);
        for a in aut.elements() {
            assert!(a.is_multiplicative(&r));
        }
        assert!(aut.elements()[0].is_identity());
    }

    #[test]
    fn stabilizer_of_y_in_f21() {
        let r = g("F21");
        let s = ElemSet::from_iter(21, [r.index(&r.y())]);
        let rep = set_stabilizer(&r, &s).unwrap();
        assert_eq!(rep.elements.len(), 7);
        assert!(!rep.trivial);
        for a in &rep.elements {
            assert_eq!(a.y, r.y());
        }
        let all = set_stabilizer(&r, &ElemSet::new(21)).unwrap();
        assert_eq!(all.elements.len(), 42);
        assert_eq!(
            set_stabilizer(&r, &ElemSet::from_iter(21, [0])).unwrap_err(),
            Error::IdentityInS
        );
    }

    #[test]
    fn characteristic_subgroups_of_f21() {
        let r = g("F21");
        let c7 = r.subgroup(&[r.index(&r.y())]);
        let c3 = r.subgroup(&[r.index(&r.x())]);
        assert!(is_characteristic(&r, &c7).unwrap());
        assert!(!is_characteristic(&r, &c3).unwrap());
    }

    #[test]
    fn beta_for_every_inverse_closed_set() {
        for name in ["D6", "D10"] {
            let d = g(name);
            let nonid: Vec<usize> = (1..d.len()).collect();
            for mask in 0u32..(1 << nonid.len()) {
                let s = ElemSet::from_iter(
                    d.len(),
                    nonid.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v),
                );
                if s.iter().any(|v| !s.contains(d.inv_idx(v))) {
                    continue;
                }
                let beta = dihedral_beta(&d, &s).unwrap();
                assert!(!beta.is_identity() && beta.fixes_set(&s));
                let y = d.index(&d.y());
                assert_eq!(beta.apply(y), d.inv_idx(y));
            }
        }
    }

    #[test]
    fn conjugation_by_x_in_f21() {
        let r = g("F21");
        let x = r.index(&r.x());
        let k = r.subgroup(&[x]);
        let s = ElemSet::from_iter(21, [x]);
        let a = conjugation_witness(&r, &k, &k, &s).unwrap();
        assert_eq!(a, GroupAutomorphism::inner(&r, x));
        let c = g("C15");
        let k = c.subgroup(&[3]);
        let s = ElemSet::from_iter(15, [3]);
        assert!(matches!(
            conjugation_witness(&c, &k, &k, &s),
            Err(Error::HypothesisFailed(_))
        ));
    }

    #[test]
    fn qdr_inversion_of_centre() {
        let r = g("sqfree:t=7,n=3,m=2,j=2");
        let (z, y, x) = (r.index(&r.z()), r.index(&r.y()), r.index(&r.x()));
        let k = r.subgroup(&[z]);
        let h = r.subgroup(&[x, z]);
        let mut s = ElemSet::from_iter(r.len(), [x]);
        for kk in &k.elements {
            s.insert(r.mul_idx(*kk, y));
            s.insert(r.mul_idx(*kk, r.mul_idx(y, y)));
        }
        let (a, case) = qdr_wreath_witness(&r, &k, &h, &s).unwrap();
        assert_eq!(case, QdrCase::CentreWithReflection);
        assert_eq!(a.z, r.inv(&r.z()));
        assert_eq!((a.y, a.x), (r.y(), r.x()));
    }
}
