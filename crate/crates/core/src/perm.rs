//! Permutations and permutation groups.
//!
//! Permutations act on the right: `p * q` applies `p` first, then `q`, and
//! `x^p` is written `p.image(x)`. Stabilizer chains are built by a
//! deterministic Schreier–Sims procedure, so results are reproducible.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::group::SquarefreeGroup;

/// Largest group order for which [`normalizer_in`] sweeps all elements.
pub const SWEEP_LIMIT: u128 = 10_000_000;
/// Largest index accepted by [`coset_action`].
pub const MAX_COSET_INDEX: u128 = 10_000;

/// A permutation of `0..degree`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree as u32).collect())
    }

    /// Checks that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &v in &images {
            let v = v as usize;
            if v >= d || std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotSubgroup(format!(
                    "image array is not a permutation of 0..{d}"
                )));
            }
        }
        Ok(Permutation(images))
    }

    pub fn from_fn(degree: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::from_images((0..degree).map(|i| f(i) as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation(inv)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&v| other.0[v as usize]).collect())
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().then(self).then(g)
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| crate::arith::lcm(acc, c.len() as u64))
    }

    /// Non-trivial cycles, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for s in 0..d {
            if seen[s] || self.image(s) == s {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut p = self.image(s);
            while p != s {
                seen[p] = true;
                cyc.push(p);
                p = self.image(p);
            }
            out.push(cyc);
        }
        out
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.image(x) == x
    }

    /// Parses cycle notation such as `(0 1 2)(3,4)`; `()` is the identity.
    pub fn parse_cycles(s: &str, degree: usize) -> Result<Self> {
        let mut img: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        let bytes = s.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            match bytes[pos] {
                b' ' | b'\t' => pos += 1,
                b'(' => {
                    let close = s[pos..]
                        .find(')')
                        .ok_or_else(|| parse_err(pos, "unclosed cycle"))?
                        + pos;
                    let mut pts = Vec::new();
                    for tok in s[pos + 1..close].split(|c: char| c == ',' || c.is_whitespace()) {
                        if tok.is_empty() {
                            continue;
                        }
                        let v: usize = tok
                            .parse()
                            .map_err(|_| parse_err(pos, format!("bad point {tok:?}")))?;
                        if v >= degree {
                            return Err(parse_err(pos, format!("point {v} >= degree {degree}")));
                        }
                        if std::mem::replace(&mut seen[v], true) {
                            return Err(parse_err(pos, format!("point {v} repeated")));
                        }
                        pts.push(v);
                    }
                    for k in 0..pts.len() {
                        img[pts[k]] = pts[(k + 1) % pts.len()] as u32;
                    }
                    pos = close + 1;
                }
                _ => return Err(parse_err(pos, "expected '('")),
            }
        }
        Ok(Permutation(img))
    }
}

impl Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub base: usize,
    /// Strong generators fixing all earlier base points.
    pub gens: Vec<Permutation>,
    pub orbit: Vec<u32>,
    /// Position of each point in `orbit`, or `u32::MAX`.
    pub pos: Vec<u32>,
    /// `reps[k]` maps `base` to `orbit[k]`.
    pub reps: Vec<Permutation>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut pos = vec![u32::MAX; degree];
        pos[base] = 0;
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base as u32],
            pos,
            reps: vec![Permutation::identity(degree)],
        }
    }

    /// Extends the orbit with the current generators; returns the old length.
    fn extend_orbit(&mut self) -> usize {
        let old = self.orbit.len();
        let mut k = 0;
        while k < self.orbit.len() {
            let p = self.orbit[k] as usize;
            for gi in 0..self.gens.len() {
                let q = self.gens[gi].image(p);
                if self.pos[q] == u32::MAX {
                    self.pos[q] = self.orbit.len() as u32;
                    self.orbit.push(q as u32);
                    let rep = self.reps[k].then(&self.gens[gi]);
                    self.reps.push(rep);
                }
            }
            k += 1;
        }
        old
    }

    pub fn rep_for(&self, point: usize) -> Option<&Permutation> {
        match self.pos[point] {
            u32::MAX => None,
            k => Some(&self.reps[k as usize]),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Chain {
    pub levels: Vec<Level>,
}

impl Chain {
    /// Strips `g` from level `from`; returns the residue and the level where
    /// stripping stopped (`levels.len()` if it went all the way).
    fn strip(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (l, lev) in self.levels.iter().enumerate().skip(from) {
            let q = g.image(lev.base);
            match lev.rep_for(q) {
                None => return (g, l),
                Some(u) => g = g.then(&u.inverse()),
            }
        }
        let n = self.levels.len();
        (g, n)
    }

    fn build(degree: usize, gens: &[Permutation], prefix: &[usize]) -> Chain {
        let mut chain = Chain::default();
        let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for &b in prefix {
            if chain.levels.iter().all(|l| l.base != b) {
                chain.levels.push(Level::new(b, degree));
            }
        }
        if gens.is_empty() {
            return chain;
        }
        if chain.levels.is_empty() {
            chain.levels.push(Level::new(first_moved(&gens[0], &[]), degree));
        }
        // Generators at level i are those fixing base points 0..i.
        for g in &gens {
            let (h, j) = chain.strip(g.clone(), 0);
            if !h.is_identity() {
                chain.add_strong_gen(h, 0, j, prefix, degree);
            }
        }
        for l in chain.levels.iter_mut() {
            l.extend_orbit();
        }
        let mut tested: Vec<HashSet<(u32, u32)>> = vec![HashSet::new(); chain.levels.len()];
        let mut i = chain.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let iu = i as usize;
            if tested.len() < chain.levels.len() {
                tested.resize(chain.levels.len(), HashSet::new());
            }
            let lev = &chain.levels[iu];
            let orbit_len = lev.orbit.len();
            let ngens = lev.gens.len();
            for k in 0..orbit_len {
                for gi in 0..ngens {
                    if !tested[iu].insert((k as u32, gi as u32)) {
                        continue;
                    }
                    let lev = &chain.levels[iu];
                    let s = &lev.gens[gi];
                    let p = lev.orbit[k] as usize;
                    let q = s.image(p);
                    let uq = lev.rep_for(q).expect("orbit closed under generators");
                    let schreier = lev.reps[k].then(s).then(&uq.inverse());
                    let (h, j) = chain.strip(schreier, iu + 1);
                    if !h.is_identity() {
                        let top = chain.add_strong_gen(h, iu + 1, j, prefix, degree);
                        for l in (iu + 1)..=top {
                            chain.levels[l].extend_orbit();
                        }
                        i = top as isize;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
        chain
    }

    /// Adds `h` (fixing base points before `j`) to levels `from..=j`, creating
    /// a new level if needed. Returns the deepest level touched.
    fn add_strong_gen(
        &mut self,
        h: Permutation,
        from: usize,
        j: usize,
        prefix: &[usize],
        degree: usize,
    ) -> usize {
        let top = j;
        if j == self.levels.len() {
            let used: Vec<usize> = self.levels.iter().map(|l| l.base).collect();
            let b = prefix
                .iter()
                .copied()
                .find(|&b| !used.contains(&b) && !h.fixes(b))
                .unwrap_or_else(|| first_moved(&h, &used));
            self.levels.push(Level::new(b, degree));
        }
        for l in from..=top {
            if !self.levels[l].gens.contains(&h) {
                self.levels[l].gens.push(h.clone());
            }
        }
        top
    }

    fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }
}

fn first_moved(g: &Permutation, avoid: &[usize]) -> usize {
    (0..g.degree())
        .find(|&x| !g.fixes(x) && !avoid.contains(&x))
        .expect("non-identity permutation moves a point")
}

/// A permutation group given by generators.
///
/// The stabilizer chain is built on first use; call [`PermGroup::freeze`] to
/// build it eagerly before sharing the group across threads.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    base_prefix: Vec<usize>,
    chain: OnceLock<Chain>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("gens", &self.gens)
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self> {
        Self::with_base(degree, gens, Vec::new())
    }

    /// Like [`PermGroup::new`], but the chain starts with the given base points.
    pub fn with_base(degree: usize, gens: Vec<Permutation>, base_prefix: Vec<usize>) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        Ok(PermGroup {
            degree,
            gens,
            base_prefix,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("no generators")
    }

    /// Builds a group from a known base and strong generating set.
    ///
    /// `gens_by_level[i]` must hold generators fixing `base[0..i]` whose orbit
    /// of `base[i]`, together with deeper generators, is the full basic orbit.
    pub(crate) fn from_bsgs(degree: usize, base: &[usize], strong: &[Permutation]) -> Self {
        let mut chain = Chain::default();
        for (i, &b) in base.iter().enumerate() {
            let mut lev = Level::new(b, degree);
            lev.gens = strong
                .iter()
                .filter(|g| base[..i].iter().all(|&p| g.fixes(p)))
                .cloned()
                .collect();
            lev.extend_orbit();
            chain.levels.push(lev);
        }
        let g = PermGroup {
            degree,
            gens: strong.to_vec(),
            base_prefix: base.to_vec(),
            chain: OnceLock::new(),
        };
        let _ = g.chain.set(chain);
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    pub(crate) fn chain(&self) -> &Chain {
        self.chain
            .get_or_init(|| Chain::build(self.degree, &self.gens, &self.base_prefix))
    }

    /// Builds the stabilizer chain now.
    pub fn freeze(self) -> Self {
        self.chain();
        self
    }

    pub fn base(&self) -> Vec<usize> {
        self.chain().levels.iter().map(|l| l.base).collect()
    }

    /// Basic orbit lengths along the base.
    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.chain().levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order_big(&self) -> BigUint {
        self.chain().order()
    }

    /// The order; saturates at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.chain()
            .levels
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(|g| g.is_identity())
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: g.degree(),
            });
        }
        let chain = self.chain();
        let (h, _) = chain.strip(g.clone(), 0);
        Ok(h.is_identity())
    }

    pub fn orbit(&self, pt: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[pt] = true;
        let mut out = vec![pt];
        let mut k = 0;
        while k < out.len() {
            let p = out[k];
            for g in &self.gens {
                let q = g.image(p);
                if !seen[q] {
                    seen[q] = true;
                    out.push(q);
                }
            }
            k += 1;
        }
        out
    }

    /// Orbits, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if seen[p] {
                continue;
            }
            let mut o = self.orbit(p);
            for &q in &o {
                seen[q] = true;
            }
            o.sort_unstable();
            out.push(o);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Transitive with trivial point stabilizers.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == self.degree as u128
    }

    pub fn point_stabilizer(&self, pt: usize) -> PermGroup {
        let g = PermGroup::with_base(self.degree, self.gens.clone(), vec![pt])
            .expect("degrees already checked");
        let chain = g.chain();
        if chain.levels.first().map(|l| l.base) != Some(pt) {
            return PermGroup::trivial(self.degree);
        }
        let tail = Chain {
            levels: chain.levels[1..].to_vec(),
        };
        let gens = tail.levels.first().map(|l| l.gens.clone()).unwrap_or_default();
        let st = PermGroup {
            degree: self.degree,
            gens,
            base_prefix: tail.levels.iter().map(|l| l.base).collect(),
            chain: OnceLock::new(),
        };
        let _ = st.chain.set(tail);
        st
    }

    /// All elements; errors if the order exceeds `limit`.
    pub fn elements(&self, limit: u128) -> Result<Vec<Permutation>> {
        let ord = self.order();
        if ord > limit {
            return Err(Error::TooLarge {
                size: ord,
                bound: limit,
            });
        }
        let mut out = Vec::with_capacity(ord as usize);
        self.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        Ok(out)
    }

    /// Calls `f` on every element until it returns `false`.
    pub fn for_each_element(&self, mut f: impl FnMut(&Permutation) -> bool) {
        let chain = self.chain();
        // g = u_{k-1} * ... * u_0, built from the deepest level up.
        fn rec(
            chain: &Chain,
            level: isize,
            acc: &Permutation,
            f: &mut dyn FnMut(&Permutation) -> bool,
        ) -> bool {
            if level < 0 {
                return f(acc);
            }
            for u in &chain.levels[level as usize].reps {
                let next = acc.then(u);
                if !rec(chain, level - 1, &next, f) {
                    return false;
                }
            }
            true
        }
        let top = chain.levels.len() as isize - 1;
        rec(chain, top, &Permutation::identity(self.degree), &mut f);
    }

    /// Whether `self` is a subgroup of `other`.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        for g in &self.gens {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether every generator of `self` normalizes `h`.
    pub fn normalizes(&self, h: &PermGroup) -> Result<bool> {
        for g in &self.gens {
            for k in h.generators() {
                if !h.contains(&k.conjugate_by(g))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Right-multiplication permutation `r ↦ r·s` on the elements of `R`.
pub fn right_mult(r: &SquarefreeGroup, s: usize) -> Permutation {
    Permutation((0..r.len()).map(|g| r.mul_idx(g, s) as u32).collect())
}

/// Left-multiplication permutation `r ↦ s·r` on the elements of `R`.
pub fn left_mult(r: &SquarefreeGroup, s: usize) -> Permutation {
    Permutation((0..r.len()).map(|g| r.mul_idx(s, g) as u32).collect())
}

/// The right-regular representation of `R` on its own elements.
pub fn regular_representation(r: &SquarefreeGroup) -> Result<PermGroup> {
    r.check_bound(crate::group::ENGINE_BOUND)?;
    let gens = r.generators().into_iter().map(|s| right_mult(r, s)).collect();
    PermGroup::new(r.len(), gens)
}

/// The normalizer `N_A(H)`.
pub fn normalizer_in(a: &PermGroup, h: &PermGroup) -> Result<PermGroup> {
    if a.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            expected: a.degree(),
            found: h.degree(),
        });
    }
    if !h.is_subgroup_of(a)? {
        return Err(Error::NotSubgroup("H is not contained in A".into()));
    }
    if a.normalizes(h)? {
        return Ok(a.clone());
    }
    if a.order() <= SWEEP_LIMIT {
        normalizer_sweep(a, h)
    } else {
        normalizer_backtrack(a, h)
    }
}

fn normalizes_elem(g: &Permutation, h: &PermGroup) -> bool {
    h.generators()
        .iter()
        .all(|k| h.contains(&k.conjugate_by(g)).unwrap_or(false))
}

fn normalizer_sweep(a: &PermGroup, h: &PermGroup) -> Result<PermGroup> {
    let mut gens: Vec<Permutation> = h.generators().to_vec();
    let mut n = PermGroup::new(a.degree(), gens.clone())?;
    a.for_each_element(|g| {
        if !n.contains(g).unwrap_or(true) && normalizes_elem(g, h) {
            gens.push(g.clone());
            n = PermGroup::new(a.degree(), gens.clone()).expect("same degree");
        }
        true
    });
    Ok(n)
}

/// Base-image backtracking over `A`, pruned by the requirement that each
/// generator of `H` is conjugated into `H`.
fn normalizer_backtrack(a: &PermGroup, h: &PermGroup) -> Result<PermGroup> {
    let d = a.degree();
    // Base prefix: points in the order they are reached from 0 by H's
    // generators, so that h-images of known points become known early.
    let mut prefix = Vec::new();
    let mut seen = vec![false; d];
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(p) = queue.pop_front() {
            prefix.push(p);
            for k in h.generators() {
                let q = k.image(p);
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    let ab = PermGroup::with_base(d, a.generators().to_vec(), prefix)?;
    let chain = ab.chain();
    let h_elems = h.elements(SWEEP_LIMIT)?;
    let hgens = h.generators().to_vec();
    let levels = chain.levels.len();

    let mut found_group = PermGroup::new(d, hgens.clone())?;
    let base: Vec<usize> = chain.levels.iter().map(|l| l.base).collect();
    let mut stack: Vec<(usize, Permutation, Vec<Vec<u32>>)> = Vec::new();
    let all: Vec<u32> = (0..h_elems.len() as u32).collect();
    stack.push((0, Permutation::identity(d), vec![all; hgens.len()]));
    // Elements are g = u_{k-1} ... u_0; base point b_i's image is fixed once
    // u_0..u_i are chosen, as b_i^g = b_i^{u_i ... u_0}. We therefore choose
    // u_0 first and prepend deeper factors: g_i = u_i * g_{i-1}.
    while let Some((lvl, g, cands)) = stack.pop() {
        if lvl == levels {
            if !found_group.contains(&g)? && normalizes_elem(&g, h) {
                let mut gens = found_group.generators().to_vec();
                gens.push(g.clone());
                found_group = PermGroup::new(d, gens)?;
            }
            continue;
        }
        for u in chain.levels[lvl].reps.iter().rev() {
            let ng = u.then(&g);
            // Known points: base[0..=lvl]. Constraint for generator k:
            // some h' with h'(g(x)) = g(k(x)) for known x with k(x) known.
            let known = &base[..=lvl];
            let mut ok = true;
            let mut ncands = Vec::with_capacity(hgens.len());
            for (ki, k) in hgens.iter().enumerate() {
                let c: Vec<u32> = cands[ki]
                    .iter()
                    .copied()
                    .filter(|&hi| {
                        let hp = &h_elems[hi as usize];
                        known.iter().all(|&x| {
                            let kx = k.image(x);
                            !known.contains(&kx) || hp.image(ng.image(x)) == ng.image(kx)
                        })
                    })
                    .collect();
                if c.is_empty() {
                    ok = false;
                    break;
                }
                ncands.push(c);
            }
            if ok {
                stack.push((lvl + 1, ng, ncands));
            }
        }
    }
    Ok(found_group)
}

/// The action of `G` on the right cosets of `H`, with a representative of
/// each coset (point `i` is the coset `H·reps[i]`; point 0 is `H`).
pub fn coset_action(g: &PermGroup, h: &PermGroup) -> Result<(PermGroup, Vec<Permutation>)> {
    if !h.is_subgroup_of(g)? {
        return Err(Error::NotSubgroup("H is not contained in G".into()));
    }
    let index = g.order() / h.order();
    if index > MAX_COSET_INDEX {
        return Err(Error::IndexTooLarge {
            index,
            bound: MAX_COSET_INDEX,
        });
    }
    let h_elems = h.elements(SWEEP_LIMIT)?;
    // Canonical key of Hx: lexicographically least image array among h*x.
    let key = |x: &Permutation| -> Vec<u32> {
        h_elems
            .iter()
            .map(|k| k.then(x).0)
            .min()
            .expect("H is nonempty")
    };
    let id = Permutation::identity(g.degree());
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut reps = vec![id.clone()];
    ids.insert(key(&id), 0);
    let mut images: Vec<Vec<u32>> = vec![Vec::new(); g.generators().len()];
    let mut k = 0;
    while k < reps.len() {
        for (gi, s) in g.generators().iter().enumerate() {
            let y = reps[k].then(s);
            let ky = key(&y);
            let target = match ids.get(&ky) {
                Some(&t) => t,
                None => {
                    let t = reps.len();
                    ids.insert(ky, t);
                    reps.push(y);
                    t
                }
            };
            images[gi].push(target as u32);
        }
        k += 1;
    }
    if reps.len() as u128 != index {
        return Err(Error::Internal("coset enumeration lost cosets".into()));
    }
    let gens = images.into_iter().map(Permutation).collect();
    Ok((PermGroup::new(reps.len(), gens)?, reps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, d: usize) -> Permutation {
        Permutation::parse_cycles(s, d).unwrap()
    }

    #[test]
    fn cycles_round_trip() {
        let g = p("(0 1 2)(3,4)", 6);
        assert_eq!(g.to_string(), "(0 1 2)(3 4)");
        assert_eq!(g.order(), 6);
        assert_eq!(p("()", 3), Permutation::identity(3));
        assert!(Permutation::parse_cycles("(0 0)", 3).is_err());
        assert!(Permutation::parse_cycles("(0 5)", 3).is_err());
    }

    #[test]
    fn right_action() {
        let a = p("(0 1)", 3);
        let b = p("(1 2)", 3);
        // apply a then b: 0 -> 1 -> 2
        assert_eq!((&a * &b).image(0), 2);
    }

    #[test]
    fn sym3_and_stabilizers() {
        let g = PermGroup::new(3, vec![p("(0 1)", 3), p("(0 1 2)", 3)]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.point_stabilizer(0).order(), 2);
        assert_eq!(g.elements(100).unwrap().len(), 6);
        let c5 = PermGroup::new(5, vec![p("(0 1 2 3 4)", 5)]).unwrap();
        assert_eq!(c5.point_stabilizer(0).order(), 1);
        assert!(c5.is_regular());
    }

    #[test]
    fn sym_n_orders() {
        for n in 2..=8usize {
            let g = PermGroup::new(
                n,
                vec![p("(0 1)", n), Permutation::from_fn(n, |i| (i + 1) % n).unwrap()],
            )
            .unwrap();
            let fact: u128 = (1..=n as u128).product();
            assert_eq!(g.order(), fact);
        }
    }

    #[test]
    fn membership() {
        let a4 = PermGroup::new(4, vec![p("(0 1 2)", 4), p("(1 2 3)", 4)]).unwrap();
        assert_eq!(a4.order(), 12);
        assert!(a4.contains(&p("(0 1)(2 3)", 4)).unwrap());
        assert!(!a4.contains(&p("(0 1)", 4)).unwrap());
        assert!(matches!(
            a4.contains(&p("(0 1)", 5)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn normalizer_in_sym4() {
        let s4 = PermGroup::new(4, vec![p("(0 1)", 4), p("(0 1 2 3)", 4)]).unwrap();
        let c4 = PermGroup::new(4, vec![p("(0 1 2 3)", 4)]).unwrap();
        assert_eq!(normalizer_in(&s4, &c4).unwrap().order(), 8);
        assert_eq!(normalizer_backtrack(&s4, &c4).unwrap().order(), 8);
        let a4 = PermGroup::new(4, vec![p("(0 1 2)", 4), p("(1 2 3)", 4)]).unwrap();
        assert_eq!(normalizer_in(&s4, &a4).unwrap().order(), 24);
    }

    #[test]
    fn coset_action_sym3() {
        let s3 = PermGroup::new(3, vec![p("(0 1)", 3), p("(0 1 2)", 3)]).unwrap();
        let h = PermGroup::new(3, vec![p("(0 1)", 3)]).unwrap();
        let (act, reps) = coset_action(&s3, &h).unwrap();
        assert_eq!(act.degree(), 3);
        assert_eq!(reps.len(), 3);
        assert!(act.is_transitive());
        assert_eq!(act.order(), 6);
    }

    #[test]
    fn regular_reps() {
        let d6: SquarefreeGroup = "D6".parse().unwrap();
        let g = regular_representation(&d6).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_regular());
    }
}
