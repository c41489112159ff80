//! Cayley digraphs `Cay(R, S)`, their automorphism groups, and DRR/GRR tests.
//!
//! Vertices are the element indices of `R`; there is an arc `r → s·r` for
//! each `s ∈ S`. The right-regular copy `R̂` (right multiplications) acts by
//! automorphisms.

pub mod engine;
pub mod fast;
pub mod search;

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;

use crate::aut::{automorphism_group, set_stabilizer};
use crate::error::{parse_err, Error, Result};
use crate::group::{ElemSet, SquarefreeGroup};
use crate::perm::{normalizer_in, regular_representation, right_mult, PermGroup, Permutation};

pub use engine::{AutResult, Digraph, SearchOptions};

/// Digraph or (undirected) graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Digraph,
    Graph,
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "digraph" | "drr" => Ok(Kind::Digraph),
            "graph" | "grr" => Ok(Kind::Graph),
            _ => Err(parse_err(0, format!("unknown kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Digraph => "digraph",
            Kind::Graph => "graph",
        })
    }
}

/// A connection set `S ⊆ R ∖ {1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConnectionSet {
    set: ElemSet,
    inverse_closed: bool,
}

impl std::fmt::Debug for ConnectionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ConnectionSet{:?}", self.set)
    }
}

impl ConnectionSet {
    pub fn new(r: &SquarefreeGroup, elems: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::from_set(r, ElemSet::from_iter(r.len(), elems))
    }

    pub fn from_set(r: &SquarefreeGroup, set: ElemSet) -> Result<Self> {
        if set.universe() != r.len() {
            return Err(Error::DegreeMismatch {
                expected: r.len(),
                found: set.universe(),
            });
        }
        if set.contains(0) {
            return Err(Error::IdentityInS);
        }
        let inverse_closed = set.iter().all(|g| set.contains(r.inv_idx(g)));
        Ok(ConnectionSet {
            set,
            inverse_closed,
        })
    }

    pub fn empty(r: &SquarefreeGroup) -> Self {
        ConnectionSet {
            set: ElemSet::new(r.len()),
            inverse_closed: true,
        }
    }

    pub fn as_set(&self) -> &ElemSet {
        &self.set
    }

    pub fn contains(&self, g: usize) -> bool {
        self.set.contains(g)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.set.iter()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.set.to_vec()
    }

    pub fn is_inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    pub fn inverse(&self, r: &SquarefreeGroup) -> ConnectionSet {
        let set = ElemSet::from_iter(r.len(), self.set.iter().map(|g| r.inv_idx(g)));
        ConnectionSet {
            set,
            inverse_closed: self.inverse_closed,
        }
    }

    /// `{a, b, ...}` in word form.
    pub fn format(&self, r: &SquarefreeGroup) -> String {
        let words: Vec<String> = self.iter().map(|g| r.format_idx(g)).collect();
        format!("{{{}}}", words.join(", "))
    }

    /// Parses a comma-separated list of items:
    ///
    /// - an element, as a word (`y^2x`) or a triple (`(0,2,1)`);
    /// - `<g1, g2>` — the non-identity elements of the generated subgroup;
    /// - `<g1, g2>*w` or `w*<g1, g2>` — the left or right coset `K·w`, `w·K`;
    /// - `refl:all` — every involution; `all` — every non-identity element.
    ///
    /// The list may be wrapped in braces, so [`format`](Self::format) output
    /// parses back. Identity elements produced by cosets are dropped; a bare
    /// identity is an error.
    pub fn parse(r: &SquarefreeGroup, s: &str) -> Result<Self> {
        let t = s.trim();
        let unbraced;
        let s = if t.len() >= 2 && t.starts_with('{') && t.ends_with('}') {
            // Blank the braces out so error positions still index the input.
            let mut b = s.to_string();
            let (open, close) = (s.find('{').unwrap(), s.rfind('}').unwrap());
            b.replace_range(open..=open, " ");
            b.replace_range(close..=close, " ");
            unbraced = b;
            unbraced.as_str()
        } else {
            s
        };
        let mut set = ElemSet::new(r.len());
        for (offset, item) in split_top_level(s) {
            let item_t = item.trim();
            if item_t.is_empty() {
                continue;
            }
            let lead = offset + (item.len() - item.trim_start().len());
            let at = |e: Error| match e {
                Error::Parse { pos, msg } => Error::Parse {
                    pos: pos + lead,
                    msg,
                },
                other => other,
            };
            match item_t {
                "all" => (1..r.len()).for_each(|g| {
                    set.insert(g);
                }),
                "refl:all" => (1..r.len()).filter(|&g| r.order_idx(g) == 2).for_each(|g| {
                    set.insert(g);
                }),
                _ if item_t.contains('<') => {
                    let (k, w, left) = parse_coset(r, item_t).map_err(at)?;
                    for &kk in &k.elements {
                        let g = match (w, left) {
                            (None, _) => kk,
                            (Some(w), true) => r.mul_idx(kk, w),
                            (Some(w), false) => r.mul_idx(w, kk),
                        };
                        if g != 0 {
                            set.insert(g);
                        }
                    }
                }
                _ => {
                    let g = r.index(&r.parse_elem(item_t).map_err(at)?);
                    if g == 0 {
                        return Err(Error::IdentityInS);
                    }
                    set.insert(g);
                }
            }
        }
        ConnectionSet::from_set(r, set)
    }
}

fn split_top_level(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '<' => depth += 1,
            ')' | '>' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

/// Parses `<gens>`, `<gens>*w` or `w*<gens>`.
fn parse_coset(
    r: &SquarefreeGroup,
    item: &str,
) -> Result<(crate::group::Subgroup, Option<usize>, bool)> {
    let open = item.find('<').expect("caller checked");
    let close = item
        .find('>')
        .ok_or_else(|| parse_err(open, "missing '>'"))?;
    let mut gens = Vec::new();
    for (off, g) in split_top_level(&item[open + 1..close]) {
        if g.trim().is_empty() {
            continue;
        }
        let e = r.parse_elem(g).map_err(|e| match e {
            Error::Parse { pos, msg } => parse_err(pos + open + 1 + off, msg),
            o => o,
        })?;
        gens.push(r.index(&e));
    }
    let k = r.subgroup(&gens);
    let before = item[..open].trim();
    let after = item[close + 1..].trim();
    match (before.is_empty(), after.is_empty()) {
        (true, true) => Ok((k, None, true)),
        (true, false) => {
            let w = after
                .strip_prefix('*')
                .ok_or_else(|| parse_err(close + 1, "expected '*' after '>'"))?;
            Ok((k, Some(r.index(&r.parse_elem(w)?)), true))
        }
        (false, true) => {
            let w = before
                .strip_suffix('*')
                .ok_or_else(|| parse_err(open, "expected '*' before '<'"))?;
            Ok((k, Some(r.index(&r.parse_elem(w)?)), false))
        }
        _ => Err(parse_err(0, "a coset has one side only")),
    }
}

/// `Cay(R, S)` with out-neighbour lists.
#[derive(Clone, Debug)]
pub struct CayleyDigraph {
    pub group: SquarefreeGroup,
    pub s: ConnectionSet,
    digraph: Digraph,
}

/// Builds `Cay(R, S)`: an arc `r → s·r` for every `s ∈ S`.
pub fn build_cayley(r: &SquarefreeGroup, s: &ConnectionSet) -> Result<CayleyDigraph> {
    if s.contains(0) {
        return Err(Error::IdentityInS);
    }
    let elems = s.to_vec();
    let out = (0..r.len())
        .map(|v| elems.iter().map(|&x| r.mul_idx(x, v) as u32).collect())
        .collect();
    let g = CayleyDigraph {
        group: r.clone(),
        s: s.clone(),
        digraph: Digraph::new(r.len(), out),
    };
    for gen in r.generators() {
        if !g.is_automorphism(&right_mult(r, gen)) {
            return Err(Error::Internal("right multiplication is not an automorphism".into()));
        }
    }
    Ok(g)
}

impl CayleyDigraph {
    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn out_neighbours(&self, v: usize) -> &[u32] {
        self.digraph.out_neighbours(v)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.digraph.has_arc(u, v)
    }

    pub fn is_automorphism(&self, g: &Permutation) -> bool {
        self.digraph.is_automorphism(g.images())
    }

    /// Generators of `R̂`.
    pub fn regular_seeds(&self) -> Vec<Permutation> {
        self.group
            .generators()
            .into_iter()
            .map(|s| right_mult(&self.group, s))
            .collect()
    }

    /// Whether `g` is a right multiplication, i.e. lies in `R̂`.
    pub fn in_regular(&self, g: &Permutation) -> bool {
        *g == right_mult(&self.group, g.image(0))
    }

    /// Graphviz output; inverse-closed sets give an undirected graph.
    pub fn to_dot(&self) -> String {
        let r = &self.group;
        let undirected = self.s.is_inverse_closed();
        let mut out = String::new();
        let (kw, edge) = if undirected { ("graph", "--") } else { ("digraph", "->") };
        let _ = writeln!(out, "{kw} \"Cay({}, S)\" {{", r.name());
        for v in 0..r.len() {
            let _ = writeln!(out, "  {v} [label=\"{}\"];", r.format_idx(v));
        }
        for v in 0..r.len() {
            for &u in self.out_neighbours(v) {
                if undirected && (u as usize) < v {
                    continue;
                }
                let _ = writeln!(out, "  {v} {edge} {u};");
            }
        }
        out.push_str("}\n");
        out
    }

    /// Adjacency lists as JSON.
    pub fn adjacency_json(&self) -> serde_json::Value {
        let lists: Vec<&[u32]> = (0..self.order()).map(|v| self.out_neighbours(v)).collect();
        serde_json::json!({
            "group": self.group.literal(),
            "vertices": self.order(),
            "out": lists,
        })
    }
}

/// `Aut(Cay(R, S))` with its order.
pub fn graph_automorphisms(g: &CayleyDigraph) -> Result<AutResult> {
    engine::automorphisms(
        g.digraph(),
        &SearchOptions {
            seeds: g.regular_seeds(),
            ..Default::default()
        },
    )
}

/// A non-identity automorphism of `Cay(R, S)` fixing the identity vertex, if any.
pub fn stabilizer_witness(g: &CayleyDigraph) -> Result<Option<Permutation>> {
    let n = g.order();
    if n <= fast::MAX_FAST && fast::refines_to_discrete(&g.group, &g.s) {
        return Ok(None);
    }
    let mut colours = vec![0u32; n];
    colours[0] = 1;
    let res = engine::automorphisms(
        g.digraph(),
        &SearchOptions {
            colours: Some(colours),
            seeds: Vec::new(),
            stop_at_first: true,
        },
    )?;
    Ok(res.found.into_iter().next())
}

/// Whether `Aut(Cay(R, S)) = R̂`.
pub fn is_drr(r: &SquarefreeGroup, s: &ConnectionSet) -> Result<bool> {
    let g = build_cayley(r, s)?;
    Ok(stabilizer_witness(&g)?.is_none())
}

/// Whether `S = S⁻¹` and `Aut(Cay(R, S)) = R̂`.
pub fn is_grr(r: &SquarefreeGroup, s: &ConnectionSet) -> Result<bool> {
    if !s.is_inverse_closed() {
        return Err(Error::NotInverseClosed);
    }
    is_drr(r, s)
}

/// Both sides of `N_A(R̂) = R̂ ⋊ Aut(R)_S` for `A = Aut(Cay(R, S))`.
#[derive(Debug, Clone, Serialize)]
pub struct NormaliserReport {
    pub aut_order: String,
    pub normaliser_order: u128,
    pub product_order: u128,
    pub stabilizer_order: usize,
    pub equal: bool,
}

/// Computes `N_A(R̂)` with the permutation engine and `R̂·Aut(R)_S` directly,
/// and compares them as element sets.
pub fn normaliser_identity_check(r: &SquarefreeGroup, s: &ConnectionSet) -> Result<NormaliserReport> {
    r.check_bound(64)?;
    let g = build_cayley(r, s)?;
    let aut = graph_automorphisms(&g)?;
    let rhat = regular_representation(r)?;
    let n = normalizer_in(&aut.group, &rhat)?;
    let stab = set_stabilizer(r, s.as_set())?;
    let _ = automorphism_group(r)?;
    let limit = 1u128 << 24;
    let mut lhs: Vec<Permutation> = n.elements(limit)?;
    let mut rhs: Vec<Permutation> = Vec::new();
    for a in &stab.elements {
        let ap = a.to_permutation();
        for x in 0..r.len() {
            rhs.push(ap.then(&right_mult(r, x)));
        }
    }
    lhs.sort();
    rhs.sort();
    rhs.dedup();
    Ok(NormaliserReport {
        aut_order: aut.order.to_string(),
        normaliser_order: lhs.len() as u128,
        product_order: rhs.len() as u128,
        stabilizer_order: stab.elements.len(),
        equal: lhs == rhs,
    })
}

/// `|Aut(Cay(R, S))|` as a big integer.
pub fn aut_order(g: &CayleyDigraph) -> Result<BigUint> {
    Ok(graph_automorphisms(g)?.order)
}

/// Convenience: `Aut(Cay(R, S))` as a permutation group.
pub fn aut_group(g: &CayleyDigraph) -> Result<PermGroup> {
    Ok(graph_automorphisms(g)?.group)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> SquarefreeGroup {
        s.parse().unwrap()
    }

    #[test]
    fn parse_sets() {
        let r = grp("F21");
        let s = ConnectionSet::parse(&r, "x, y").unwrap();
        assert_eq!(s.len(), 2);
        let coset = ConnectionSet::parse(&r, "<y>*x").unwrap();
        assert_eq!(coset.len(), 7);
        assert!(coset.iter().all(|g| r.elem(g).c == 1));
        let sub = ConnectionSet::parse(&r, "<y>").unwrap();
        assert_eq!(sub.len(), 6);
        assert!(sub.is_inverse_closed());
        let d6 = grp("D6");
        assert_eq!(ConnectionSet::parse(&d6, "refl:all").unwrap().len(), 3);
        assert_eq!(ConnectionSet::parse(&d6, "all").unwrap().len(), 5);
        assert_eq!(ConnectionSet::parse(&d6, "1").unwrap_err(), Error::IdentityInS);
        match ConnectionSet::parse(&d6, "x, q") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn arcs_follow_left_multiplication() {
        let r = grp("D6");
        let x = r.index(&r.x());
        let s = ConnectionSet::new(&r, [x]).unwrap();
        let g = build_cayley(&r, &s).unwrap();
        for v in 0..6 {
            assert_eq!(g.out_neighbours(v), &[r.mul_idx(x, v) as u32]);
        }
    }

    #[test]
    fn small_aut_orders() {
        let c5 = grp("C5");
        let ord = |r: &SquarefreeGroup, s: &[usize]| {
            let cs = ConnectionSet::new(r, s.iter().copied()).unwrap();
            aut_order(&build_cayley(r, &cs).unwrap()).unwrap()
        };
        assert_eq!(ord(&c5, &[1]), BigUint::from(5u32));
        assert_eq!(ord(&c5, &[1, 4]), BigUint::from(10u32));
        let d6 = grp("D6");
        let refl = ConnectionSet::parse(&d6, "refl:all").unwrap();
        assert_eq!(aut_order(&build_cayley(&d6, &refl).unwrap()).unwrap(), BigUint::from(72u32));
        assert!(is_drr(&c5, &ConnectionSet::new(&c5, [1]).unwrap()).unwrap());
        assert!(!is_drr(&c5, &ConnectionSet::new(&c5, [1, 4]).unwrap()).unwrap());
        assert_eq!(
            is_grr(&c5, &ConnectionSet::new(&c5, [1]).unwrap()).unwrap_err(),
            Error::NotInverseClosed
        );
    }

    #[test]
    fn normaliser_examples() {
        let c5 = grp("C5");
        let rep = normaliser_identity_check(&c5, &ConnectionSet::new(&c5, [1]).unwrap()).unwrap();
        assert!(rep.equal && rep.normaliser_order == 5);
        let rep = normaliser_identity_check(&c5, &ConnectionSet::new(&c5, [1, 4]).unwrap()).unwrap();
        assert!(rep.equal && rep.normaliser_order == 10);
        let d6 = grp("D6");
        let refl = ConnectionSet::parse(&d6, "refl:all").unwrap();
        let rep = normaliser_identity_check(&d6, &refl).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.normaliser_order, 36);
        assert_eq!(rep.aut_order, "72");
    }
}
