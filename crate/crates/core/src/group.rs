//! Groups of squarefree order in the normal form `C_t × (C_n ⋊ C_m)`.
//!
//! Generators are `z` (order `t`, central), `y` (order `n`) and `x` (order `m`)
//! with `x·y·x⁻¹ = y^j`. Every element has a unique word `z^a y^b x^c`, and is
//! stored by its index `(a·n + b)·m + c`. Index 0 is the identity.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_squarefree, mult_order, pow_mod, prime_divisors};
use crate::error::{parse_err, Error, Result};

/// Default bound on `|R|` for exhaustive subgroup and automorphism work.
pub const ENGINE_BOUND: usize = 512;

/// An element `z^a y^b x^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 0, b: 0, c: 0 };

    pub fn new(a: u64, b: u64, c: u64) -> Self {
        GroupElement { a, b, c }
    }
}

#[derive(Debug)]
struct Tables {
    mul: Vec<u32>,
    inv: Vec<u32>,
    order: Vec<u32>,
}

/// A group of squarefree order in normal form. Cheap to clone.
#[derive(Clone)]
pub struct SquarefreeGroup {
    t: u64,
    n: u64,
    m: u64,
    j: u64,
    /// `j^c mod n` for `c` in `0..m`.
    jpow: Arc<Vec<u64>>,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for SquarefreeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SquarefreeGroup({})", self.literal())
    }
}

impl PartialEq for SquarefreeGroup {
    fn eq(&self, other: &Self) -> bool {
        self.params() == other.params()
    }
}
impl Eq for SquarefreeGroup {}

impl std::hash::Hash for SquarefreeGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.params().hash(state)
    }
}

/// Smallest member of `{ j^u mod n : gcd(u, m) = 1 }`.
pub fn canonical_exponent(j: u64, n: u64, m: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    (1..=m.max(1))
        .filter(|&u| gcd(u, m) == 1)
        .map(|u| pow_mod(j, u, n))
        .min()
        .unwrap_or(j % n)
}

/// Build a group from normal-form parameters. `j` is canonicalised.
///
/// When `n = 1` or `m = 1` the group is cyclic and is folded into `C_{t·n·m}`.
pub fn make_group(t: u64, n: u64, m: u64, j: u64) -> Result<SquarefreeGroup> {
    for v in [t, n, m] {
        if v == 0 || !is_squarefree(v) {
            return Err(Error::NonSquarefree(v));
        }
    }
    if gcd(t, n) != 1 || gcd(t, m) != 1 || gcd(n, m) != 1 {
        return Err(Error::NotCoprime { t, n, m });
    }
    let bad = |reason: &str| Error::BadAction {
        n,
        m,
        j,
        reason: reason.to_string(),
    };
    if n == 1 || m == 1 {
        if n > 1 && j % n != 1 {
            return Err(bad("a cyclic factor requires j = 1"));
        }
        return Ok(SquarefreeGroup::raw(t * n * m, 1, 1, 1));
    }
    let jr = j % n;
    if gcd(jr, n) != 1 {
        return Err(bad("j is not a unit mod n"));
    }
    if mult_order(jr, n) != Some(m) {
        return Err(bad("multiplicative order of j mod n differs from m"));
    }
    if gcd((jr + n - 1) % n, n) != 1 {
        return Err(bad("gcd(j - 1, n) != 1, so C_n ⋊ C_m has a centre"));
    }
    Ok(SquarefreeGroup::raw(t, n, m, canonical_exponent(jr, n, m)))
}

/// One canonical representative per isomorphism class of groups of the given order.
///
/// Abelian first, then by decreasing centre order, then by `n` and `j`.
pub fn enumerate_groups(order: u64) -> Result<Vec<SquarefreeGroup>> {
    if order == 0 || !is_squarefree(order) {
        return Err(Error::NonSquarefree(order));
    }
    let mut out = vec![SquarefreeGroup::raw(order, 1, 1, 1)];
    let primes = prime_divisors(order);
    let k = primes.len();
    // Assign every prime to one of t, n, m.
    let mut params = Vec::new();
    for code in 0..3usize.pow(k as u32) {
        let (mut t, mut n, mut m) = (1u64, 1u64, 1u64);
        let mut c = code;
        for &p in &primes {
            match c % 3 {
                0 => t *= p,
                1 => n *= p,
                _ => m *= p,
            }
            c /= 3;
        }
        if n == 1 || m == 1 {
            continue;
        }
        for j in 2..n {
            if gcd(j, n) == 1
                && mult_order(j, n) == Some(m)
                && gcd(j - 1, n) == 1
                && canonical_exponent(j, n, m) == j
            {
                params.push((t, n, m, j));
            }
        }
    }
    params.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.3.cmp(&y.3)));
    out.extend(params.into_iter().map(|(t, n, m, j)| SquarefreeGroup::raw(t, n, m, j)));
    Ok(out)
}

impl SquarefreeGroup {
    fn raw(t: u64, n: u64, m: u64, j: u64) -> Self {
        let jpow: Vec<u64> = (0..m).map(|c| pow_mod(j, c, n.max(1)) % n.max(1)).collect();
        let mut g = SquarefreeGroup {
            t,
            n,
            m,
            j,
            jpow: Arc::new(jpow),
            tables: None,
        };
        if (g.order() as usize) <= ENGINE_BOUND {
            g.tables = Some(Arc::new(g.build_tables()));
        }
        g
    }

    fn build_tables(&self) -> Tables {
        let ord = self.order() as usize;
        let mut mul = vec![0u32; ord * ord];
        for g in 0..ord {
            for h in 0..ord {
                mul[g * ord + h] = self.mul_formula(g, h) as u32;
            }
        }
        let mut inv = vec![0u32; ord];
        for g in 0..ord {
            let ge = self.elem(g);
            inv[g] = self.index(&self.inv(&ge)) as u32;
        }
        let mut order = vec![0u32; ord];
        for g in 0..ord {
            let mut k = 1;
            let mut p = g;
            while p != 0 {
                p = mul[p * ord + g] as usize;
                k += 1;
            }
            order[g] = k;
        }
        Tables { mul, inv, order }
    }

    pub fn t(&self) -> u64 {
        self.t
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn j(&self) -> u64 {
        self.j
    }
    pub fn params(&self) -> (u64, u64, u64, u64) {
        (self.t, self.n, self.m, self.j)
    }
    pub fn order(&self) -> u64 {
        self.t * self.n * self.m
    }
    pub fn len(&self) -> usize {
        self.order() as usize
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn is_abelian(&self) -> bool {
        self.n == 1
    }
    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn check_bound(&self, bound: usize) -> Result<()> {
        if self.len() > bound {
            Err(Error::TooLarge {
                size: self.order() as u128,
                bound: bound as u128,
            })
        } else {
            Ok(())
        }
    }

    // ---- element <-> index ----

    pub fn index(&self, g: &GroupElement) -> usize {
        ((g.a * self.n + g.b) * self.m + g.c) as usize
    }

    pub fn elem(&self, i: usize) -> GroupElement {
        let i = i as u64;
        GroupElement {
            a: i / (self.n * self.m),
            b: (i / self.m) % self.n,
            c: i % self.m,
        }
    }

    pub fn reduce(&self, a: i64, b: i64, c: i64) -> GroupElement {
        GroupElement {
            a: a.rem_euclid(self.t as i64) as u64,
            b: b.rem_euclid(self.n as i64) as u64,
            c: c.rem_euclid(self.m as i64) as u64,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::IDENTITY
    }
    pub fn z(&self) -> GroupElement {
        self.reduce(1, 0, 0)
    }
    pub fn y(&self) -> GroupElement {
        self.reduce(0, 1, 0)
    }
    pub fn x(&self) -> GroupElement {
        self.reduce(0, 0, 1)
    }

    /// Generators `z, y, x`, omitting trivial ones.
    pub fn generators(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for g in [self.z(), self.y(), self.x()] {
            let i = self.index(&g);
            if i != 0 {
                v.push(i);
            }
        }
        v
    }

    // ---- arithmetic on triples ----

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement {
            a: (g.a + h.a) % self.t,
            b: (g.b + h.b * self.jpow[g.c as usize]) % self.n,
            c: (g.c + h.c) % self.m,
        }
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        let c = (self.m - g.c) % self.m;
        GroupElement {
            a: (self.t - g.a) % self.t,
            b: (self.n - g.b * self.jpow[c as usize] % self.n) % self.n,
            c,
        }
    }

    pub fn pow(&self, g: &GroupElement, k: i64) -> GroupElement {
        let base = if k < 0 { self.inv(g) } else { *g };
        let mut e = k.unsigned_abs();
        let mut acc = GroupElement::IDENTITY;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, g: &GroupElement) -> u64 {
        let mut k = 1;
        let mut p = *g;
        while p != GroupElement::IDENTITY {
            p = self.mul(&p, g);
            k += 1;
        }
        k
    }

    // ---- arithmetic on indices ----

    fn mul_formula(&self, g: usize, h: usize) -> usize {
        self.index(&self.mul(&self.elem(g), &self.elem(h)))
    }

    #[inline]
    pub fn mul_idx(&self, g: usize, h: usize) -> usize {
        match &self.tables {
            Some(t) => t.mul[g * self.len() + h] as usize,
            None => self.mul_formula(g, h),
        }
    }

    #[inline]
    pub fn inv_idx(&self, g: usize) -> usize {
        match &self.tables {
            Some(t) => t.inv[g] as usize,
            None => self.index(&self.inv(&self.elem(g))),
        }
    }

    pub fn order_idx(&self, g: usize) -> u64 {
        match &self.tables {
            Some(t) => t.order[g] as u64,
            None => self.element_order(&self.elem(g)),
        }
    }

    pub fn pow_idx(&self, g: usize, k: i64) -> usize {
        self.index(&self.pow(&self.elem(g), k))
    }

    /// `g·h·g⁻¹`.
    pub fn conj_idx(&self, g: usize, h: usize) -> usize {
        self.mul_idx(self.mul_idx(g, h), self.inv_idx(g))
    }

    pub fn commutes(&self, g: usize, h: usize) -> bool {
        self.mul_idx(g, h) == self.mul_idx(h, g)
    }

    // ---- naming ----

    /// Literal form `sqfree:t=..,n=..,m=..,j=..`.
    pub fn literal(&self) -> String {
        format!("sqfree:t={},n={},m={},j={}", self.t, self.n, self.m, self.j)
    }

    /// Human name such as `C21`, `D6`, `C7xD6`, `C7:C3`.
    pub fn name(&self) -> String {
        if self.n == 1 {
            return format!("C{}", self.t);
        }
        let core = if self.m == 2 {
            format!("D{}", 2 * self.n)
        } else {
            format!("C{}:C{}", self.n, self.m)
        };
        if self.t == 1 {
            core
        } else if self.m == 2 {
            format!("C{}x{}", self.t, core)
        } else {
            format!("C{}x({})", self.t, core)
        }
    }

    /// Word form, e.g. `z^2y x`, with `1` for the identity.
    pub fn format_elem(&self, g: &GroupElement) -> String {
        let mut s = String::new();
        for (letter, e) in [('z', g.a), ('y', g.b), ('x', g.c)] {
            match e {
                0 => {}
                1 => s.push(letter),
                _ => s.push_str(&format!("{letter}^{e}")),
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    pub fn format_idx(&self, g: usize) -> String {
        self.format_elem(&self.elem(g))
    }

    /// Parse a word in `z`, `y`, `x` (with optional `^k`, `*` and spaces) or a
    /// triple `(a,b,c)`. `1` and `e` denote the identity.
    pub fn parse_elem(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| parse_err(s.len(), "missing ')'"))?;
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(parse_err(0, "a triple needs three components"));
            }
            let mut v = [0i64; 3];
            for (k, p) in parts.iter().enumerate() {
                v[k] = p
                    .parse()
                    .map_err(|_| parse_err(0, format!("bad integer {p:?}")))?;
            }
            return Ok(self.reduce(v[0], v[1], v[2]));
        }
        if s == "1" || s == "e" {
            return Ok(GroupElement::IDENTITY);
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut acc = GroupElement::IDENTITY;
        let mut seen = false;
        while pos < bytes.len() {
            let ch = bytes[pos];
            if ch == b' ' || ch == b'*' || ch == b'.' {
                pos += 1;
                continue;
            }
            let gen = match ch {
                b'z' => self.z(),
                b'y' => self.y(),
                b'x' => self.x(),
                _ => return Err(parse_err(pos, format!("unexpected {:?}", ch as char))),
            };
            pos += 1;
            let mut exp = 1i64;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let start = pos;
                if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
                    pos += 1;
                }
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exp = s[start..pos]
                    .parse()
                    .map_err(|_| parse_err(start, "bad exponent"))?;
            }
            acc = self.mul(&acc, &self.pow(&gen, exp));
            seen = true;
        }
        if !seen {
            return Err(parse_err(0, "empty element"));
        }
        Ok(acc)
    }

    // ---- subgroups ----

    /// The subgroup generated by the given element indices.
    pub fn subgroup(&self, gens: &[usize]) -> Subgroup {
        let set = self.closure(gens);
        Subgroup::from_set(self, gens.to_vec(), set)
    }

    /// Subgroup from an explicit element list, checking closure.
    pub fn subgroup_from_elements(&self, elems: &[usize]) -> Result<Subgroup> {
        let set = ElemSet::from_iter(self.len(), elems.iter().copied());
        let mut with_id = set.clone();
        with_id.insert(0);
        for g in with_id.iter() {
            for h in with_id.iter() {
                if !with_id.contains(self.mul_idx(g, h)) {
                    return Err(Error::NotSubgroup(
                        "element list is not closed under products".into(),
                    ));
                }
            }
        }
        let gens = small_generating_set(self, &with_id);
        Ok(Subgroup::from_set(self, gens, with_id))
    }

    fn closure(&self, gens: &[usize]) -> ElemSet {
        let mut set = ElemSet::new(self.len());
        set.insert(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul_idx(g, s);
                if set.insert(h) {
                    queue.push_back(h);
                }
            }
        }
        set
    }

    /// All subgroups, via closures of cyclic subgroups and pairs of them.
    ///
    /// Sorted by order, then by element list.
    pub fn subgroups(&self) -> Result<Vec<Subgroup>> {
        self.subgroups_bounded(ENGINE_BOUND)
    }

    pub fn subgroups_bounded(&self, bound: usize) -> Result<Vec<Subgroup>> {
        self.check_bound(bound)?;
        let mut seen: HashSet<ElemSet> = HashSet::new();
        let mut cyclic: Vec<(usize, ElemSet)> = Vec::new();
        for g in 0..self.len() {
            let s = self.closure(&[g]);
            if seen.insert(s.clone()) {
                cyclic.push((g, s));
            }
        }
        let mut all: Vec<(Vec<usize>, ElemSet)> =
            cyclic.iter().map(|(g, s)| (vec![*g], s.clone())).collect();
        for i in 0..cyclic.len() {
            for k in i + 1..cyclic.len() {
                let (gi, si) = &cyclic[i];
                let (gk, sk) = &cyclic[k];
                if si.is_subset(sk) || sk.is_subset(si) {
                    continue;
                }
                let s = self.closure(&[*gi, *gk]);
                if seen.insert(s.clone()) {
                    all.push((vec![*gi, *gk], s));
                }
            }
        }
        let mut subs: Vec<Subgroup> = all
            .into_iter()
            .map(|(gens, set)| {
                let gens = if gens.len() == 2 {
                    small_generating_set(self, &set)
                } else {
                    gens.into_iter().filter(|&g| g != 0).collect()
                };
                Subgroup::from_set(self, gens, set)
            })
            .collect();
        subs.sort_by(|a, b| a.order().cmp(&b.order()).then(a.elements.cmp(&b.elements)));
        Ok(subs)
    }

    /// Hall subgroup for the primes of `primes` that divide `|R|`.
    pub fn hall_subgroup(&self, primes: &[u64]) -> Subgroup {
        let part = |v: u64| -> u64 {
            prime_divisors(v)
                .into_iter()
                .filter(|p| primes.contains(p))
                .product()
        };
        let gens: Vec<usize> = [
            self.pow(&self.z(), (self.t / part(self.t)) as i64),
            self.pow(&self.y(), (self.n / part(self.n)) as i64),
            self.pow(&self.x(), (self.m / part(self.m)) as i64),
        ]
        .iter()
        .map(|g| self.index(g))
        .filter(|&g| g != 0)
        .collect();
        self.subgroup(&gens)
    }

    pub fn centre(&self) -> Subgroup {
        let gens = self.generators();
        let elems: Vec<usize> = (0..self.len())
            .filter(|&g| gens.iter().all(|&s| self.commutes(g, s)))
            .collect();
        self.subgroup_from_elements(&elems)
            .expect("the centre is a subgroup")
    }

    pub fn centralizer(&self, g: usize) -> Subgroup {
        let elems: Vec<usize> = (0..self.len()).filter(|&h| self.commutes(g, h)).collect();
        self.subgroup_from_elements(&elems)
            .expect("a centralizer is a subgroup")
    }

    /// Centralizer of a subgroup.
    pub fn centralizer_of(&self, h: &Subgroup) -> Subgroup {
        let elems: Vec<usize> = (0..self.len())
            .filter(|&g| h.generators.iter().all(|&k| self.commutes(g, k)))
            .collect();
        self.subgroup_from_elements(&elems)
            .expect("a centralizer is a subgroup")
    }

    /// Normalizer of `h` in this group.
    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        let elems: Vec<usize> = (0..self.len())
            .filter(|&g| h.generators.iter().all(|&k| h.contains(self.conj_idx(g, k))))
            .collect();
        self.subgroup_from_elements(&elems)
            .expect("a normalizer is a subgroup")
    }

    /// `g·H·g⁻¹`.
    pub fn conjugate(&self, h: &Subgroup, g: usize) -> Subgroup {
        let gens: Vec<usize> = h.generators.iter().map(|&k| self.conj_idx(g, k)).collect();
        self.subgroup(&gens)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.generators().iter().all(|&g| {
            h.generators
                .iter()
                .all(|&k| h.contains(self.conj_idx(g, k)))
        })
    }

    /// `R/K` in normal form, with the projection `R → R/K` on indices.
    pub fn quotient(&self, k: &Subgroup) -> Result<(SquarefreeGroup, Vec<usize>)> {
        if !self.is_normal(k) {
            return Err(Error::NotNormal);
        }
        let ord = self.len();
        // Label each coset gK by a dense id.
        let mut coset = vec![usize::MAX; ord];
        let mut reps = Vec::new();
        for g in 0..ord {
            if coset[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &kk in &k.elements {
                coset[self.mul_idx(g, kk)] = id;
            }
        }
        let q = reps.len();
        let mul = |a: usize, b: usize| coset[self.mul_idx(reps[a], reps[b])];
        let (qg, iso) = identify_table(q, &mul, coset[0])?;
        let mut back = vec![0usize; q];
        for (qi, &cid) in iso.iter().enumerate() {
            back[cid] = qi;
        }
        let proj = (0..ord).map(|g| back[coset[g]]).collect();
        Ok((qg, proj))
    }

    /// A subgroup as a group in its own right, with the embedding from the
    /// new group's indices into this group's indices.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Result<(SquarefreeGroup, Vec<usize>)> {
        let elems = &h.elements;
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &g) in elems.iter().enumerate() {
            pos[g] = i;
        }
        let mul = |a: usize, b: usize| pos[self.mul_idx(elems[a], elems[b])];
        let (hg, iso) = identify_table(elems.len(), &mul, pos[0])?;
        let emb = iso.into_iter().map(|i| elems[i]).collect();
        Ok((hg, emb))
    }
}

fn small_generating_set(r: &SquarefreeGroup, set: &ElemSet) -> Vec<usize> {
    let elems: Vec<usize> = set.iter().collect();
    let target = elems.len();
    if target == 1 {
        return Vec::new();
    }
    for &g in &elems {
        if r.order_idx(g) as usize == target {
            return vec![g];
        }
    }
    // Try elements of large order first; a generator of the largest cyclic
    // subgroup almost always extends to a generating pair.
    let mut by_order = elems.clone();
    by_order.sort_by_key(|&g| std::cmp::Reverse(r.order_idx(g)));
    for (i, &g) in by_order.iter().enumerate() {
        for &h in &by_order[i + 1..] {
            if r.closure(&[g, h]).len() == target {
                return vec![g.min(h), g.max(h)];
            }
        }
    }
    // Unreachable for squarefree groups, which are 2-generated.
    elems.into_iter().filter(|&g| g != 0).collect()
}

/// Identify a multiplication table of squarefree order with a normal-form group.
///
/// `mul` acts on `0..order`, `identity` is the neutral element. Returns the
/// group and an isomorphism given as the map from the group's indices to table
/// elements.
pub fn identify_table(
    order: usize,
    mul: &dyn Fn(usize, usize) -> usize,
    identity: usize,
) -> Result<(SquarefreeGroup, Vec<usize>)> {
    if !is_squarefree(order as u64) {
        return Err(Error::NonSquarefree(order as u64));
    }
    let elem_order = |g: usize| {
        let mut k = 1;
        let mut p = g;
        while p != identity {
            p = mul(p, g);
            k += 1;
        }
        k as u64
    };
    let centre: Vec<usize> = (0..order)
        .filter(|&g| (0..order).all(|h| mul(g, h) == mul(h, g)))
        .collect();
    // Inverse table.
    let mut inv = vec![0usize; order];
    for g in 0..order {
        for h in 0..order {
            if mul(g, h) == identity {
                inv[g] = h;
                break;
            }
        }
    }
    // Derived subgroup: closure of commutators.
    let mut derived = vec![false; order];
    derived[identity] = true;
    let mut comms = Vec::new();
    for g in 0..order {
        for h in 0..order {
            let c = mul(mul(g, h), mul(inv[g], inv[h]));
            if !derived[c] {
                derived[c] = true;
                comms.push(c);
            }
        }
    }
    let mut frontier: Vec<usize> = (0..order).filter(|&g| derived[g]).collect();
    while let Some(g) = frontier.pop() {
        for &c in &comms {
            let p = mul(g, c);
            if !derived[p] {
                derived[p] = true;
                frontier.push(p);
            }
        }
    }
    let t = centre.len() as u64;
    let n = derived.iter().filter(|&&d| d).count() as u64;
    let m = order as u64 / (t * n);
    if t * n * m != order as u64 {
        return Err(Error::Internal(
            "centre and derived subgroup do not split the order".into(),
        ));
    }
    let find = |pred: &dyn Fn(usize) -> bool, want: u64| {
        (0..order).find(|&g| pred(g) && elem_order(g) == want)
    };
    let zp = find(&|g| centre.contains(&g), t);
    let yp = find(&|g| derived[g], n);
    let xp = find(&|_| true, m);
    let (Some(zp), Some(yp), Some(mut xp)) = (zp, yp, xp) else {
        return Err(Error::Internal("missing generator of required order".into()));
    };
    let power = |g: usize, k: u64| {
        let mut acc = identity;
        for _ in 0..k {
            acc = mul(acc, g);
        }
        acc
    };
    let conj_y = mul(mul(xp, yp), inv[xp]);
    let jp = (0..n.max(1))
        .find(|&j| power(yp, j) == conj_y)
        .ok_or_else(|| Error::Internal("x does not normalise <y>".into()))?;
    let jcan = canonical_exponent(jp, n, m);
    if n > 1 {
        let u = (1..=m)
            .find(|&u| gcd(u, m) == 1 && pow_mod(jp, u, n) == jcan)
            .expect("canonical exponent is attained");
        xp = power(xp, u);
    }
    let g = make_group(t, n, m, if n > 1 { jcan } else { 1 })?;
    // Folding may turn (t, n, m) into a cyclic group; generators then come
    // from the single element of order `order`.
    let iso: Vec<usize> = if g.n() == n && g.m() == m {
        (0..g.len())
            .map(|i| {
                let e = g.elem(i);
                mul(mul(power(zp, e.a), power(yp, e.b)), power(xp, e.c))
            })
            .collect()
    } else {
        let gen = find(&|_| true, order as u64)
            .ok_or_else(|| Error::Internal("abelian table is not cyclic".into()))?;
        (0..g.len()).map(|i| power(gen, g.elem(i).a)).collect()
    };
    let mut seen = vec![false; order];
    for &v in &iso {
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Internal("identification is not bijective".into()));
        }
    }
    if order <= 128 {
        for a in 0..g.len() {
            for b in 0..g.len() {
                if iso[g.mul_idx(a, b)] != mul(iso[a], iso[b]) {
                    return Err(Error::Internal("identification is not a homomorphism".into()));
                }
            }
        }
    }
    Ok((g, iso))
}

impl FromStr for SquarefreeGroup {
    type Err = Error;

    /// Accepts `sqfree:t=..,n=..,m=..,j=..` (missing keys default to 1),
    /// `Ck`, `D2k` (k odd squarefree) and `F21`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("sqfree:") {
            let (mut t, mut n, mut m, mut j) = (1, 1, 1, 1);
            let mut offset = 7;
            for part in rest.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| parse_err(offset, "expected key=value"))?;
                let v: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(offset, format!("bad value {v:?}")))?;
                match k.trim() {
                    "t" => t = v,
                    "n" => n = v,
                    "m" => m = v,
                    "j" => j = v,
                    other => return Err(parse_err(offset, format!("unknown key {other:?}"))),
                }
                offset += part.len() + 1;
            }
            return make_group(t, n, m, j);
        }
        if s == "F21" {
            return make_group(1, 7, 3, 2);
        }
        let num = |p: &str| -> Result<u64> {
            p.parse()
                .map_err(|_| parse_err(1, format!("bad group name {s:?}")))
        };
        if let Some(k) = s.strip_prefix('C') {
            return make_group(num(k)?, 1, 1, 1);
        }
        if let Some(k) = s.strip_prefix('D') {
            let k = num(k)?;
            if k < 6 || k % 2 != 0 || (k / 2) % 2 == 0 {
                return Err(parse_err(1, "dihedral order must be 2k with k odd, k >= 3"));
            }
            let r = k / 2;
            return make_group(1, r, 2, r - 1);
        }
        Err(parse_err(0, format!("unknown group {s:?}")))
    }
}

impl fmt::Display for SquarefreeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for SquarefreeGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.literal())
    }
}

impl<'de> Deserialize<'de> for SquarefreeGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------

/// A set of element indices as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet {
    bits: Vec<u64>,
    universe: usize,
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl ElemSet {
    pub fn new(universe: usize) -> Self {
        ElemSet {
            bits: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn from_iter(universe: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = ElemSet::new(universe);
        for g in it {
            s.insert(g);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.bits[g >> 6] >> (g & 63) & 1 == 1
    }

    /// Returns `true` if `g` was newly inserted.
    #[inline]
    pub fn insert(&mut self, g: usize) -> bool {
        let w = &mut self.bits[g >> 6];
        let bit = 1u64 << (g & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn remove(&mut self, g: usize) {
        self.bits[g >> 6] &= !(1u64 << (g & 63));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersect(&self, other: &ElemSet) -> ElemSet {
        ElemSet {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
            universe: self.universe,
        }
    }

    pub fn difference(&self, other: &ElemSet) -> ElemSet {
        ElemSet {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect(),
            universe: self.universe,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// A subgroup of some [`SquarefreeGroup`], with its elements cached.
#[derive(Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub generators: Vec<usize>,
    /// Sorted element indices.
    pub elements: Vec<usize>,
    pub set: ElemSet,
    pub is_normal: bool,
    /// In a group of squarefree order every normal subgroup is characteristic,
    /// so this equals `is_normal`; `crate::aut::is_characteristic` checks it
    /// directly against `Aut(R)`.
    pub is_characteristic: bool,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, gens {:?})", self.order(), self.generators)
    }
}

impl Subgroup {
    fn from_set(r: &SquarefreeGroup, generators: Vec<usize>, set: ElemSet) -> Self {
        let elements = set.to_vec();
        let mut s = Subgroup {
            generators: generators.into_iter().filter(|&g| g != 0).collect(),
            elements,
            set,
            is_normal: false,
            is_characteristic: false,
        };
        s.is_normal = r.is_normal(&s);
        s.is_characteristic = s.is_normal;
        s
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.set.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.set.is_subset(&other.set)
    }

    pub fn intersect(&self, r: &SquarefreeGroup, other: &Subgroup) -> Subgroup {
        let set = self.set.intersect(&other.set);
        let gens = small_generating_set(r, &set);
        Subgroup::from_set(r, gens, set)
    }

    /// Generators in word form, e.g. `<y, x>`.
    pub fn describe(&self, r: &SquarefreeGroup) -> String {
        let words: Vec<String> = self.generators.iter().map(|&g| r.format_idx(g)).collect();
        format!("<{}>", words.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d6_arithmetic() {
        let d6 = make_group(1, 3, 2, 2).unwrap();
        assert_eq!(d6.order(), 6);
        let x = d6.x();
        let y = d6.y();
        assert_eq!(d6.mul(&x, &y), GroupElement::new(0, 2, 1));
        let xyx = d6.mul(&d6.mul(&x, &y), &d6.inv(&x));
        assert_eq!(xyx, d6.pow(&y, 2));
    }

    #[test]
    fn make_group_errors() {
        assert_eq!(make_group(1, 4, 1, 1), Err(Error::NonSquarefree(4)));
        assert!(matches!(make_group(3, 3, 1, 1), Err(Error::NotCoprime { .. })));
        assert!(matches!(make_group(1, 7, 3, 3), Err(Error::BadAction { .. })));
        assert!(matches!(make_group(1, 15, 2, 4), Err(Error::BadAction { .. })));
        assert_eq!(make_group(7, 1, 1, 1).unwrap().name(), "C7");
        assert_eq!(make_group(1, 7, 3, 4).unwrap().j(), 2);
    }

    #[test]
    fn folding_cyclic_factors() {
        assert_eq!(make_group(2, 3, 1, 1).unwrap().params(), (6, 1, 1, 1));
        assert_eq!(make_group(1, 1, 5, 1).unwrap().params(), (5, 1, 1, 1));
    }

    #[test]
    fn f21_orders() {
        let f = make_group(1, 7, 3, 2).unwrap();
        assert_eq!(f.element_order(&GroupElement::new(0, 0, 1)), 3);
        assert_eq!(f.element_order(&GroupElement::new(0, 1, 1)), 3);
        assert_eq!(f.element_order(&f.y()), 7);
    }

    #[test]
    fn enumeration_counts() {
        let names = |o| -> Vec<String> {
            enumerate_groups(o).unwrap().iter().map(|g| g.name()).collect()
        };
        assert_eq!(names(15), vec!["C15"]);
        assert_eq!(names(21), vec!["C21", "C7:C3"]);
        assert_eq!(enumerate_groups(30).unwrap().len(), 4);
        assert!(enumerate_groups(12).is_err());
    }

    #[test]
    fn literal_round_trip() {
        for s in ["D6", "D10", "D30", "C21", "F21", "sqfree:t=5,n=7,m=3,j=2"] {
            let g: SquarefreeGroup = s.parse().unwrap();
            let back: SquarefreeGroup = g.literal().parse().unwrap();
            assert_eq!(g, back);
        }
        assert_eq!("D30".parse::<SquarefreeGroup>().unwrap().params(), (1, 15, 2, 14));
        assert!("D12".parse::<SquarefreeGroup>().is_err());
    }

    #[test]
    fn element_parsing() {
        let r: SquarefreeGroup = "sqfree:t=7,n=3,m=2,j=2".parse().unwrap();
        assert_eq!(r.parse_elem("y^2x").unwrap(), GroupElement::new(0, 2, 1));
        assert_eq!(r.parse_elem("x y").unwrap(), GroupElement::new(0, 2, 1));
        assert_eq!(r.parse_elem("z^-1").unwrap(), GroupElement::new(6, 0, 0));
        assert_eq!(r.parse_elem("(1, 2, 3)").unwrap(), GroupElement::new(1, 2, 1));
        assert_eq!(r.format_elem(&GroupElement::new(2, 1, 1)), "z^2yx");
        assert!(r.parse_elem("w").is_err());
    }

    #[test]
    fn f21_subgroups() {
        let f: SquarefreeGroup = "F21".parse().unwrap();
        let subs = f.subgroups().unwrap();
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 3, 3, 3, 3, 3, 3, 3, 7, 21]);
        assert!(subs[8].is_normal);
        assert!(!subs[1].is_normal);
    }

    #[test]
    fn hall_and_centre() {
        let r = make_group(5, 7, 3, 2).unwrap();
        let h = r.hall_subgroup(&[5, 7]);
        assert_eq!(h.order(), 35);
        assert!(h.elements.iter().any(|&g| r.order_idx(g) == 35));
        let d6: SquarefreeGroup = "D6".parse().unwrap();
        let s3 = d6.hall_subgroup(&[3]);
        assert_eq!(s3.elements, d6.subgroup(&[d6.index(&d6.y())]).elements);
        assert!(s3.is_normal && s3.is_characteristic);
        let c7d6 = make_group(7, 3, 2, 2).unwrap();
        assert_eq!(c7d6.centre().order(), 7);
    }

    #[test]
    fn quotient_by_centre() {
        let r = make_group(7, 3, 2, 2).unwrap();
        let z = r.subgroup(&[r.index(&r.z())]);
        let (q, proj) = r.quotient(&z).unwrap();
        assert_eq!(q.name(), "D6");
        for g in 0..r.len() {
            for h in 0..r.len() {
                assert_eq!(proj[r.mul_idx(g, h)], q.mul_idx(proj[g], proj[h]));
            }
        }
        let x = r.subgroup(&[r.index(&r.x())]);
        assert_eq!(r.quotient(&x).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn subgroup_identification() {
        let r = make_group(5, 7, 3, 2).unwrap();
        let h = r.hall_subgroup(&[7, 3]);
        let (g, emb) = r.subgroup_as_group(&h).unwrap();
        assert_eq!(g.name(), "C7:C3");
        for a in 0..g.len() {
            for b in 0..g.len() {
                assert_eq!(emb[g.mul_idx(a, b)], r.mul_idx(emb[a], emb[b]));
            }
        }
    }
}
