//! Bitset refinement for Cayley digraphs on at most 64 vertices.
//!
//! Individualizing the identity vertex and refining to the coarsest
//! equitable partition is a sufficient DRR test: if the result is discrete,
//! every automorphism fixing the identity fixes everything. A non-discrete
//! result is inconclusive and callers fall back to the full search.

use crate::cayley::ConnectionSet;
use crate::group::SquarefreeGroup;

pub const MAX_FAST: usize = 64;

/// Precomputed byte tables for `S ↦ S·v` and `S ↦ S⁻¹`.
pub struct FastCayley {
    n: usize,
    // right[v][byte][value]: image of the 8 bits at position `byte` under right multiplication by v.
    right: Vec<[[u64; 256]; 8]>,
    inverse: Box<[[u64; 256]; 8]>,
}

fn byte_table(n: usize, f: impl Fn(usize) -> usize) -> [[u64; 256]; 8] {
    let mut t = [[0u64; 256]; 8];
    for (b, row) in t.iter_mut().enumerate() {
        for x in 1..256usize {
            let low = x.trailing_zeros() as usize;
            let pos = b * 8 + low;
            let bit = if pos < n { 1u64 << f(pos) } else { 0 };
            row[x] = row[x & (x - 1)] | bit;
        }
    }
    t
}

#[inline]
fn apply(t: &[[u64; 256]; 8], mut m: u64) -> u64 {
    let mut out = 0;
    let mut b = 0;
    while m != 0 {
        out |= t[b][(m & 0xff) as usize];
        m >>= 8;
        b += 1;
    }
    out
}

impl FastCayley {
    /// `None` when `|R| > 64`.
    pub fn new(r: &SquarefreeGroup) -> Option<Self> {
        let n = r.len();
        if n > MAX_FAST {
            return None;
        }
        let right = (0..n).map(|v| byte_table(n, |s| r.mul_idx(s, v))).collect();
        let inverse = Box::new(byte_table(n, |s| r.inv_idx(s)));
        Some(FastCayley { n, right, inverse })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Whether refinement with the identity individualized is discrete, for
    /// the connection set with element mask `s` (bit `i` = element `i`).
    pub fn discrete(&self, s: u64) -> bool {
        let n = self.n;
        if n <= 2 {
            return true;
        }
        let sinv = apply(&self.inverse, s);
        let mut out = [0u64; MAX_FAST];
        let mut inn = [0u64; MAX_FAST];
        for v in 0..n {
            out[v] = apply(&self.right[v], s);
            inn[v] = apply(&self.right[v], sinv);
        }
        refine_discrete(n, &out[..n], &inn[..n])
    }
}

/// Coarsest equitable refinement of `{0}, V∖{0}`; true iff it is discrete.
fn refine_discrete(n: usize, out: &[u64], inn: &[u64]) -> bool {
    let full = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut cells: Vec<u64> = vec![1, full & !1];
    let mut queue: Vec<u64> = vec![1, full & !1];
    let mut keyed: Vec<(u32, u8)> = Vec::with_capacity(n);
    while let Some(w) = queue.pop() {
        let mut i = 0;
        while i < cells.len() {
            let c = cells[i];
            if c.count_ones() == 1 {
                i += 1;
                continue;
            }
            keyed.clear();
            let mut m = c;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let key = ((out[v] & w).count_ones() << 8) | (inn[v] & w).count_ones();
                keyed.push((key, v as u8));
            }
            let k0 = keyed[0].0;
            if keyed.iter().all(|&(k, _)| k == k0) {
                i += 1;
                continue;
            }
            keyed.sort_unstable();
            let mut parts: Vec<u64> = Vec::new();
            let mut cur = 0u64;
            let mut prev = keyed[0].0;
            for &(k, v) in &keyed {
                if k != prev {
                    parts.push(cur);
                    cur = 0;
                    prev = k;
                }
                cur |= 1u64 << v;
            }
            parts.push(cur);
            cells[i] = parts[0];
            for &p in &parts[1..] {
                cells.push(p);
            }
            // All fragments become splitters; the coarsest equitable
            // partition does not depend on the order of splitting.
            queue.extend(parts);
            if cells.len() == n {
                return true;
            }
            i += 1;
        }
    }
    cells.len() == n
}

/// One-shot version of [`FastCayley::discrete`] that builds masks directly.
pub fn refines_to_discrete(r: &SquarefreeGroup, s: &ConnectionSet) -> bool {
    let n = r.len();
    if n > MAX_FAST {
        return false;
    }
    if n <= 2 {
        return true;
    }
    let elems = s.to_vec();
    let mut out = vec![0u64; n];
    let mut inn = vec![0u64; n];
    for v in 0..n {
        for &x in &elems {
            out[v] |= 1 << r.mul_idx(x, v);
            inn[v] |= 1 << r.mul_idx(r.inv_idx(x), v);
        }
    }
    refine_discrete(n, &out, &inn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_one_shot() {
        let r: SquarefreeGroup = "F21".parse().unwrap();
        let f = FastCayley::new(&r).unwrap();
        for mask in [0b110u64, 0b1010_0110, (1 << 21) - 2, 1 << 3 | 1 << 7] {
            let s = ConnectionSet::new(&r, (1..21).filter(|&i| mask >> i & 1 == 1)).unwrap();
            assert_eq!(f.discrete(mask), refines_to_discrete(&r, &s));
        }
        // The complete digraph is never discrete.
        assert!(!f.discrete((1 << 21) - 2));
    }

    #[test]
    fn directed_cycle_is_discrete() {
        let r: SquarefreeGroup = "C7".parse().unwrap();
        let f = FastCayley::new(&r).unwrap();
        assert!(f.discrete(1 << 1));
        assert!(!f.discrete(1 << 1 | 1 << 6));
    }
}
