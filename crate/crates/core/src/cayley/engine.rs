//! Automorphism groups of vertex-coloured digraphs.
//!
//! Individualization–refinement search in the style of nauty, without
//! canonical labelling. Partitions are refined to equitable ones with respect
//! to both out- and in-neighbourhoods. The first path of the search tree
//! yields a base; each level is then searched for automorphisms mapping the
//! base point to the other vertices of its target cell, pruned by the orbits
//! of automorphisms already found. The base and the generators found form a
//! base and strong generating set, so the order is the product of the basic
//! orbit lengths.

use std::collections::VecDeque;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};

/// Largest digraph accepted by [`automorphisms`].
pub const MAX_VERTICES: usize = 1024;

/// A digraph on `0..n` with out- and in-adjacency lists and an adjacency bitset.
#[derive(Clone, Debug)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    words: usize,
    adj: Vec<u64>,
}

impl Digraph {
    pub fn new(n: usize, out: Vec<Vec<u32>>) -> Self {
        let words = n.div_ceil(64);
        let mut adj = vec![0u64; n * words];
        let mut inn = vec![Vec::new(); n];
        for (u, outs) in out.iter().enumerate() {
            for &v in outs {
                adj[u * words + (v as usize >> 6)] |= 1 << (v & 63);
                inn[v as usize].push(u as u32);
            }
        }
        Digraph {
            n,
            out,
            inn,
            words,
            adj,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn out_neighbours(&self, v: usize) -> &[u32] {
        &self.out[v]
    }

    pub fn in_neighbours(&self, v: usize) -> &[u32] {
        &self.inn[v]
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + (v >> 6)] >> (v & 63) & 1 == 1
    }

    /// Whether the image array `g` maps arcs to arcs (hence is an automorphism).
    pub fn is_automorphism(&self, g: &[u32]) -> bool {
        if g.len() != self.n {
            return false;
        }
        (0..self.n).all(|v| {
            let gv = g[v] as usize;
            self.out[v].len() == self.out[gv].len()
                && self.out[v].iter().all(|&u| self.has_arc(gv, g[u as usize] as usize))
        })
    }
}

/// Options for [`automorphisms`].
#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Vertex colours; automorphisms must preserve them.
    pub colours: Option<Vec<u32>>,
    /// Automorphisms known in advance; they seed the orbit pruning.
    pub seeds: Vec<Permutation>,
    /// Return as soon as one non-identity automorphism has been found.
    pub stop_at_first: bool,
}

/// The result of an automorphism search.
#[derive(Clone, Debug)]
pub struct AutResult {
    pub group: PermGroup,
    pub order: BigUint,
    pub base: Vec<usize>,
    /// Generators found by the search (seeds excluded).
    pub found: Vec<Permutation>,
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// In `stop_at_first` mode, whether the search stopped early.
    pub stopped_early: bool,
}

#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// Start of the cell containing each position.
    start: Vec<u32>,
    /// Length of the cell starting at each position (valid at cell starts).
    len: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn from_colours(n: usize, colours: Option<&[u32]>) -> (Partition, Vec<u32>) {
        let mut lab: Vec<u32> = (0..n as u32).collect();
        let col = |v: u32| colours.map_or(0, |c| c[v as usize]);
        lab.sort_by_key(|&v| (col(v), v));
        let mut pos = vec![0u32; n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let mut start = vec![0u32; n];
        let mut len = vec![0u32; n];
        let mut cells = Vec::new();
        let mut i = 0;
        while i < n {
            let mut k = i + 1;
            while k < n && col(lab[k]) == col(lab[i]) {
                k += 1;
            }
            for s in start.iter_mut().take(k).skip(i) {
                *s = i as u32;
            }
            len[i] = (k - i) as u32;
            cells.push(i as u32);
            i = k;
        }
        let ncells = cells.len();
        (
            Partition {
                lab,
                pos,
                start,
                len,
                cells: ncells,
            },
            cells,
        )
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let n = self.lab.len();
        let mut best: Option<(u32, usize)> = None;
        let mut i = 0;
        while i < n {
            let l = self.len[i];
            if l > 1 && best.is_none_or(|(bl, _)| l < bl) {
                best = Some((l, i));
            }
            i += l as usize;
        }
        best.map(|(_, i)| i)
    }

    /// Splits `v` off the front of its cell; returns the singleton's start.
    fn individualize(&mut self, v: usize) -> usize {
        let p = self.pos[v] as usize;
        let c = self.start[p] as usize;
        let l = self.len[c] as usize;
        if l == 1 {
            return c;
        }
        let other = self.lab[c];
        self.lab.swap(c, p);
        self.pos[v] = c as u32;
        self.pos[other as usize] = p as u32;
        self.len[c] = 1;
        self.len[c + 1] = (l - 1) as u32;
        for s in self.start.iter_mut().take(c + l).skip(c + 1) {
            *s = (c + 1) as u32;
        }
        self.cells += 1;
        c
    }
}

#[inline]
fn mix(h: u64, v: u64) -> u64 {
    let x = (h ^ v).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x ^ (x >> 29)
}

struct Refiner<'a> {
    g: &'a Digraph,
    cnt_out: Vec<u32>,
    cnt_in: Vec<u32>,
    touched: Vec<u32>,
    is_touched: Vec<bool>,
    in_queue: Vec<bool>,
    splitter: Vec<u32>,
    keys: Vec<(u64, u32)>,
    nodes: u64,
}

impl<'a> Refiner<'a> {
    fn new(g: &'a Digraph) -> Self {
        let n = g.n;
        Refiner {
            g,
            cnt_out: vec![0; n],
            cnt_in: vec![0; n],
            touched: Vec::new(),
            is_touched: vec![false; n],
            in_queue: vec![false; n],
            splitter: Vec::new(),
            keys: Vec::new(),
            nodes: 0,
        }
    }

    /// Refines `p` to the coarsest equitable partition finer than it, given
    /// the initial splitter cells. Returns an isomorphism-invariant trace.
    fn refine(&mut self, p: &mut Partition, init: &[u32], mut trace: u64) -> u64 {
        self.nodes += 1;
        let n = self.g.n;
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &c in init {
            if !self.in_queue[c as usize] {
                self.in_queue[c as usize] = true;
                queue.push_back(c);
            }
        }
        while let Some(w) = queue.pop_front() {
            self.in_queue[w as usize] = false;
            if p.is_discrete() {
                continue;
            }
            let wl = p.len[w as usize] as usize;
            self.splitter.clear();
            self.splitter
                .extend_from_slice(&p.lab[w as usize..w as usize + wl]);
            for &x in &self.splitter {
                for &u in &self.g.inn[x as usize] {
                    self.cnt_out[u as usize] += 1;
                    if !self.is_touched[u as usize] {
                        self.is_touched[u as usize] = true;
                        self.touched.push(u);
                    }
                }
                for &u in &self.g.out[x as usize] {
                    self.cnt_in[u as usize] += 1;
                    if !self.is_touched[u as usize] {
                        self.is_touched[u as usize] = true;
                        self.touched.push(u);
                    }
                }
            }
            // Cells holding touched vertices, in position order.
            let mut cells: Vec<u32> = self
                .touched
                .iter()
                .map(|&v| p.start[p.pos[v as usize] as usize])
                .collect();
            cells.sort_unstable();
            cells.dedup();
            trace = mix(trace, w as u64);
            for &c in &cells {
                let c = c as usize;
                let l = p.len[c] as usize;
                if l == 1 {
                    continue;
                }
                self.keys.clear();
                for &v in &p.lab[c..c + l] {
                    let k = (self.cnt_out[v as usize] as u64) << 32 | self.cnt_in[v as usize] as u64;
                    self.keys.push((k, v));
                }
                let k0 = self.keys[0].0;
                if self.keys.iter().all(|&(k, _)| k == k0) {
                    continue;
                }
                self.keys.sort_unstable();
                let was_queued = self.in_queue[c];
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut i = 0;
                while i < l {
                    let mut e = i + 1;
                    while e < l && self.keys[e].0 == self.keys[i].0 {
                        e += 1;
                    }
                    frags.push((c + i, e - i));
                    trace = mix(trace, self.keys[i].0 ^ ((c + i) as u64) << 40 ^ ((e - i) as u64) << 52);
                    i = e;
                }
                for (k, &(_, v)) in self.keys.iter().enumerate() {
                    p.lab[c + k] = v;
                    p.pos[v as usize] = (c + k) as u32;
                }
                for &(fs, fl) in &frags {
                    p.len[fs] = fl as u32;
                    for s in p.start.iter_mut().take(fs + fl).skip(fs) {
                        *s = fs as u32;
                    }
                }
                p.cells += frags.len() - 1;
                let largest = frags
                    .iter()
                    .enumerate()
                    .max_by_key(|&(i, &(_, fl))| (fl, std::cmp::Reverse(i)))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                for (i, &(fs, _)) in frags.iter().enumerate() {
                    let add = if was_queued { fs != c } else { i != largest };
                    if add && !self.in_queue[fs] {
                        self.in_queue[fs] = true;
                        queue.push_back(fs as u32);
                    }
                }
            }
            for &v in &self.touched {
                self.cnt_out[v as usize] = 0;
                self.cnt_in[v as usize] = 0;
                self.is_touched[v as usize] = false;
            }
            self.touched.clear();
            if p.cells == n {
                for c in queue.drain(..) {
                    self.in_queue[c as usize] = false;
                }
            }
        }
        mix(trace, p.cells as u64)
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
    }

    fn add_perm(&mut self, g: &Permutation) {
        for x in 0..self.parent.len() {
            self.union(x, g.image(x));
        }
    }
}

struct FirstPath {
    parts: Vec<Partition>,
    traces: Vec<u64>,
    targets: Vec<usize>,
    base: Vec<usize>,
    leaf: Vec<u32>,
}

struct Search<'a> {
    g: &'a Digraph,
    refiner: Refiner<'a>,
    first: FirstPath,
}

impl<'a> Search<'a> {
    /// Depth-first search below `p` (at depth `d`, trace-equivalent to the
    /// first path) for a leaf whose map from the first leaf is an automorphism.
    fn find_leaf(&mut self, p: &Partition, d: usize) -> Option<Permutation> {
        if p.is_discrete() {
            let mut img = vec![0u32; self.g.n];
            for (i, &v) in self.first.leaf.iter().enumerate() {
                img[v as usize] = p.lab[i];
            }
            return self
                .g
                .is_automorphism(&img)
                .then(|| Permutation::from_images(img).expect("leaf map is a bijection"));
        }
        let c = *self.first.targets.get(d)?;
        let l = p.len[c] as usize;
        if p.start[c] as usize != c || l != self.first.parts[d].len[c] as usize {
            return None;
        }
        let cell: Vec<u32> = p.lab[c..c + l].to_vec();
        for w in cell {
            let mut q = p.clone();
            let s = q.individualize(w as usize);
            let t = self.refiner.refine(&mut q, &[s as u32], mix(self.first.traces[d], s as u64));
            if t != self.first.traces[d + 1] {
                continue;
            }
            if let Some(g) = self.find_leaf(&q, d + 1) {
                return Some(g);
            }
        }
        None
    }
}

/// Computes the automorphism group of a coloured digraph.
pub fn automorphisms(g: &Digraph, opts: &SearchOptions) -> Result<AutResult> {
    let n = g.n;
    if n > MAX_VERTICES {
        return Err(Error::TooLarge {
            size: n as u128,
            bound: MAX_VERTICES as u128,
        });
    }
    if let Some(c) = &opts.colours {
        if c.len() != n {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: c.len(),
            });
        }
    }
    for s in &opts.seeds {
        if s.degree() != n || !g.is_automorphism(s.images()) {
            return Err(Error::Internal("seed is not an automorphism".into()));
        }
    }
    let (mut p0, init) = Partition::from_colours(n, opts.colours.as_deref());
    let mut refiner = Refiner::new(g);
    let c0 = p0.cells as u64;
    let t0 = refiner.refine(&mut p0, &init, mix(0, c0));

    // First path.
    let mut parts = vec![p0.clone()];
    let mut traces = vec![t0];
    let mut targets = Vec::new();
    let mut base = Vec::new();
    let mut cur = p0;
    while let Some(c) = cur.target_cell() {
        let v = cur.lab[c] as usize;
        let mut q = cur.clone();
        let s = q.individualize(v);
        let t = refiner.refine(&mut q, &[s as u32], mix(*traces.last().expect("nonempty"), s as u64));
        targets.push(c);
        base.push(v);
        traces.push(t);
        parts.push(q.clone());
        cur = q;
    }
    let leaf = cur.lab.clone();
    let mut search = Search {
        g,
        refiner,
        first: FirstPath {
            parts,
            traces,
            targets,
            base: base.clone(),
            leaf,
        },
    };

    let mut found: Vec<Permutation> = Vec::new();
    let k = base.len();
    let mut orbit_sizes = vec![1usize; k];
    let mut stopped_early = false;
    'levels: for i in (0..k).rev() {
        let prefix = &search.first.base[..i];
        let fixes_prefix = |p: &Permutation| prefix.iter().all(|&b| p.fixes(b));
        let mut uf = UnionFind::new(n);
        for p in opts.seeds.iter().chain(found.iter()) {
            if fixes_prefix(p) {
                uf.add_perm(p);
            }
        }
        let v = search.first.base[i];
        let c = search.first.targets[i];
        let part = search.first.parts[i].clone();
        let cell: Vec<u32> = part.lab[c..c + part.len[c] as usize].to_vec();
        let mut failed: Vec<usize> = Vec::new();
        for &w in &cell {
            let w = w as usize;
            let rw = uf.find(w);
            if rw == uf.find(v) || failed.iter().any(|&f| uf.find(f) == rw) {
                continue;
            }
            let mut q = part.clone();
            let s = q.individualize(w);
            let t = search
                .refiner
                .refine(&mut q, &[s as u32], mix(search.first.traces[i], s as u64));
            let hit = if t == search.first.traces[i + 1] {
                search.find_leaf(&q, i + 1)
            } else {
                None
            };
            match hit {
                Some(gen) => {
                    uf.add_perm(&gen);
                    found.push(gen);
                    if opts.stop_at_first {
                        stopped_early = true;
                        break 'levels;
                    }
                }
                None => failed.push(w),
            }
        }
        let rv = uf.find(v);
        orbit_sizes[i] = cell.iter().filter(|&&w| uf.find(w as usize) == rv).count();
    }

    let mut strong: Vec<Permutation> = opts.seeds.clone();
    strong.extend(found.iter().cloned());
    strong.retain(|p| !p.is_identity());
    let (group, order) = if stopped_early {
        let grp = PermGroup::new(n, strong)?;
        let ord = grp.order_big();
        (grp, ord)
    } else {
        let ord = orbit_sizes
            .iter()
            .fold(BigUint::from(1u32), |acc, &s| acc * BigUint::from(s));
        (PermGroup::from_bsgs(n, &base, &strong), ord)
    };
    Ok(AutResult {
        group,
        order,
        base,
        found,
        nodes: search.refiner.nodes,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, directed: bool) -> Digraph {
        let out = (0..n)
            .map(|v| {
                let mut o = vec![((v + 1) % n) as u32];
                if !directed {
                    o.push(((v + n - 1) % n) as u32);
                }
                o
            })
            .collect();
        Digraph::new(n, out)
    }

    fn order(g: &Digraph) -> BigUint {
        automorphisms(g, &SearchOptions::default()).unwrap().order
    }

    #[test]
    fn cycles() {
        assert_eq!(order(&cycle(5, true)), BigUint::from(5u32));
        assert_eq!(order(&cycle(5, false)), BigUint::from(10u32));
        assert_eq!(order(&cycle(12, false)), BigUint::from(24u32));
    }

    #[test]
    fn complete_bipartite_k33() {
        let out = (0..6u32)
            .map(|v| (0..6u32).filter(|&u| (u < 3) != (v < 3)).collect())
            .collect();
        let g = Digraph::new(6, out);
        let r = automorphisms(&g, &SearchOptions::default()).unwrap();
        assert_eq!(r.order, BigUint::from(72u32));
        assert_eq!(r.group.order(), 72);
    }

    #[test]
    fn petersen() {
        // Outer 5-cycle 0..5, spokes, inner pentagram 5..10.
        let mut out = vec![Vec::new(); 10];
        let mut add = |a: u32, b: u32| {
            out[a as usize].push(b);
            out[b as usize].push(a);
        };
        for i in 0..5u32 {
            add(i, (i + 1) % 5);
            add(i, i + 5);
            add(5 + i, 5 + (i + 2) % 5);
        }
        let g = Digraph::new(10, out);
        assert_eq!(order(&g), BigUint::from(120u32));
    }

    #[test]
    fn colours_and_stop_at_first() {
        let g = cycle(6, false);
        let mut col = vec![0u32; 6];
        col[0] = 1;
        let r = automorphisms(
            &g,
            &SearchOptions {
                colours: Some(col),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.order, BigUint::from(2u32));
        let r = automorphisms(
            &g,
            &SearchOptions {
                stop_at_first: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.stopped_early && r.found.len() == 1);
    }

    #[test]
    fn seeds_are_used() {
        let g = cycle(7, false);
        let rot = Permutation::from_fn(7, |i| (i + 1) % 7).unwrap();
        let r = automorphisms(
            &g,
            &SearchOptions {
                seeds: vec![rot],
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.order, BigUint::from(14u32));
        assert_eq!(r.group.order(), 14);
    }
}
