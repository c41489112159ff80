//! Cross-checks against brute-force and closed-form oracles that share no
//! code with the library's own algorithms.

use num_bigint::BigUint;
use proptest::prelude::*;
use regrep::arith::{is_prime, is_squarefree, prime_divisors};
use regrep::aut::{automorphism_group, is_characteristic};
use regrep::cayley::search::exhaustive_sweep;
use regrep::cayley::{aut_order, build_cayley, graph_automorphisms, is_drr, ConnectionSet, Kind};
use regrep::perm::{normalizer_in, regular_representation, right_mult};
use regrep::{enumerate_groups, ElemSet, PermGroup, Permutation, SquarefreeGroup};

fn groups_up_to(max: u64) -> Vec<SquarefreeGroup> {
    (1..=max)
        .filter(|&n| is_squarefree(n))
        .flat_map(|n| enumerate_groups(n).unwrap())
        .collect()
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Number of groups of squarefree order `n`: the sum over `d | n` of
/// `prod_{p | n/d} (p^c(p) - 1)/(p - 1)`, with `c(p)` the number of primes
/// `q | d` with `q ≡ 1 (mod p)`.
fn group_count(n: u64) -> u64 {
    divisors(n)
        .into_iter()
        .map(|d| {
            prime_divisors(n / d)
                .into_iter()
                .map(|p| {
                    let c = prime_divisors(d).into_iter().filter(|q| q % p == 1).count() as u32;
                    (p.pow(c) - 1) / (p - 1)
                })
                .product::<u64>()
        })
        .sum()
}

#[test]
fn group_counts_match_closed_form() {
    for n in (1..=400).filter(|&n| is_squarefree(n)) {
        let groups = enumerate_groups(n).unwrap();
        assert_eq!(groups.len() as u64, group_count(n), "order {n}");
        let mut lits: Vec<_> = groups.iter().map(|g| g.literal()).collect();
        lits.dedup();
        assert_eq!(lits.len(), groups.len());
    }
    assert_eq!(group_count(30), 4);
    assert_eq!(group_count(42), 6);
}

#[test]
fn non_squarefree_orders_are_rejected() {
    for n in [4, 12, 18, 50] {
        assert!(enumerate_groups(n).is_err());
    }
}

/// `|Aut(R)|` by trying every image triple for the generators.
fn brute_aut_order(r: &SquarefreeGroup) -> usize {
    let n = r.len();
    let gens: Vec<usize> = [r.z(), r.y(), r.x()].iter().map(|g| r.index(g)).collect();
    let orders: Vec<u64> = gens.iter().map(|&g| r.order_idx(g)).collect();
    let cand = |k: usize| -> Vec<usize> { (0..n).filter(|&g| r.order_idx(g) == orders[k]).collect() };
    let (cz, cy, cx) = (cand(0), cand(1), cand(2));
    let mut count = 0;
    for &z in &cz {
        for &y in &cy {
            for &x in &cx {
                let map: Vec<usize> = (0..n)
                    .map(|i| {
                        let e = r.elem(i);
                        let a = r.pow_idx(z, e.a as i64);
                        let b = r.pow_idx(y, e.b as i64);
                        let c = r.pow_idx(x, e.c as i64);
                        r.mul_idx(r.mul_idx(a, b), c)
                    })
                    .collect();
                let mut seen = vec![false; n];
                if !map.iter().all(|&v| !std::mem::replace(&mut seen[v], true)) {
                    continue;
                }
                let hom = (0..n).all(|a| (0..n).all(|b| map[r.mul_idx(a, b)] == r.mul_idx(map[a], map[b])));
                count += hom as usize;
            }
        }
    }
    count
}

fn euler_phi(n: u64) -> u64 {
    prime_divisors(n).into_iter().fold(n, |acc, p| acc / p * (p - 1))
}

#[test]
fn automorphism_group_orders() {
    for r in groups_up_to(42) {
        let aut = automorphism_group(&r).unwrap();
        assert_eq!(aut.order(), brute_aut_order(&r), "{}", r.name());
        if r.is_abelian() {
            assert_eq!(aut.order() as u64, euler_phi(r.order()));
        }
        if r.t() == 1 && r.m() == 2 {
            assert_eq!(aut.order() as u64, r.n() * euler_phi(r.n()));
        }
    }
}

#[test]
fn normal_subgroups_are_characteristic() {
    for r in groups_up_to(42) {
        for h in r.subgroups().unwrap() {
            assert_eq!(is_characteristic(&r, &h).unwrap(), h.is_normal, "{}", r.name());
            assert_eq!(h.is_characteristic, h.is_normal);
        }
    }
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

fn cycle(n: usize) -> Permutation {
    Permutation::from_fn(n, |i| (i + 1) % n).unwrap()
}

#[test]
fn symmetric_and_alternating_orders() {
    for n in 2..=12usize {
        let swap = Permutation::from_fn(n, |i| match i {
            0 => 1,
            1 => 0,
            _ => i,
        })
        .unwrap();
        let s = PermGroup::new(n, vec![cycle(n), swap]).unwrap();
        assert_eq!(s.order(), factorial(n as u64));
        if n >= 3 {
            let threes = (0..n - 2)
                .map(|k| Permutation::from_fn(n, |i| if i >= k && i < k + 3 { k + (i - k + 1) % 3 } else { i }).unwrap())
                .collect();
            assert_eq!(PermGroup::new(n, threes).unwrap().order(), factorial(n as u64) / 2);
        }
    }
}

#[test]
fn normaliser_of_a_regular_cyclic_group() {
    // In Sym(p) the normaliser of a p-cycle is the affine group of order p(p-1).
    for p in [5usize, 7, 11] {
        let swap = Permutation::from_fn(p, |i| match i {
            0 => 1,
            1 => 0,
            _ => i,
        })
        .unwrap();
        let sym = PermGroup::new(p, vec![cycle(p), swap]).unwrap();
        let c = PermGroup::new(p, vec![cycle(p)]).unwrap();
        let n = normalizer_in(&sym, &c).unwrap();
        assert_eq!(n.order(), (p * (p - 1)) as u128, "p = {p}");
    }
}

/// Every permutation of `0..n`, in lexicographic order.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
        out.push(p.clone());
    }
}

fn brute_graph_aut(r: &SquarefreeGroup, s: &ConnectionSet, perms: &[Vec<usize>]) -> u64 {
    let n = r.len();
    let arc = |u: usize, v: usize| s.contains(r.mul_idx(v, r.inv_idx(u)));
    perms
        .iter()
        .filter(|p| (0..n).all(|u| (0..n).all(|v| arc(u, v) == arc(p[u], p[v]))))
        .count() as u64
}

#[test]
fn engine_matches_brute_force_on_small_digraphs() {
    for order in [5u64, 6, 7] {
        let perms = all_permutations(order as usize);
        for r in enumerate_groups(order).unwrap() {
            for mask in 0u64..1 << (r.len() - 1) {
                let set = ElemSet::from_iter(r.len(), (1..r.len()).filter(|&i| mask >> (i - 1) & 1 == 1));
                let s = ConnectionSet::from_set(&r, set).unwrap();
                let g = build_cayley(&r, &s).unwrap();
                let engine = aut_order(&g).unwrap();
                assert_eq!(engine, BigUint::from(brute_graph_aut(&r, &s, &perms)), "{} {}", r.name(), s.format(&r));
                assert_eq!(is_drr(&r, &s).unwrap(), engine == BigUint::from(r.order()));
            }
        }
    }
}

#[test]
fn reversal_preserves_automorphisms() {
    for r in groups_up_to(21) {
        for mask in (0u64..1 << (r.len() - 1).min(12)).step_by(7) {
            let s = ConnectionSet::from_set(&r, ElemSet::from_iter(r.len(), (1..r.len()).filter(|&i| mask >> (i - 1) & 1 == 1))).unwrap();
            let t = s.inverse(&r);
            let a = graph_automorphisms(&build_cayley(&r, &s).unwrap()).unwrap();
            let b = graph_automorphisms(&build_cayley(&r, &t).unwrap()).unwrap();
            assert_eq!(a.order, b.order);
            // Cay(R, S^-1) is Cay(R, S) with every arc reversed, so the
            // same vertex permutations are automorphisms.
            let reversed = build_cayley(&r, &t).unwrap();
            for g in a.group.generators() {
                assert!(reversed.is_automorphism(g));
            }
        }
    }
}

#[test]
fn regular_representation_is_regular() {
    for r in groups_up_to(60) {
        let rh = regular_representation(&r).unwrap();
        assert!(rh.is_regular());
        assert_eq!(rh.order(), r.order() as u128);
        // Right multiplications commute with left ones.
        for a in r.generators() {
            for b in r.generators() {
                let (ra, lb) = (right_mult(&r, a), regrep::perm::left_mult(&r, b));
                assert_eq!(ra.then(&lb), lb.then(&ra));
            }
        }
    }
}

/// Orbit classes of all connection sets under `Aut(R)`, by canonicalising
/// each mask naively.
fn naive_orbit_classes(r: &SquarefreeGroup, kind: Kind) -> usize {
    let aut = automorphism_group(r).unwrap();
    let n = r.len();
    let mut reps = std::collections::HashSet::new();
    for mask in 0u64..1 << (n - 1) {
        let elems: Vec<usize> = (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        if kind == Kind::Graph && elems.iter().any(|&g| mask >> (r.inv_idx(g) - 1) & 1 == 0) {
            continue;
        }
        let canon = aut
            .elements()
            .iter()
            .map(|a| elems.iter().fold(0u64, |m, &g| m | 1 << (a.apply(g) - 1)))
            .min()
            .unwrap();
        reps.insert(canon);
    }
    reps.len()
}

#[test]
fn sweep_orbit_counts_match_naive_enumeration() {
    for lit in ["D10", "C11", "C13", "D14", "C15"] {
        let r: SquarefreeGroup = lit.parse().unwrap();
        for kind in [Kind::Digraph, Kind::Graph] {
            let rep = exhaustive_sweep(&r, kind, false).unwrap();
            assert_eq!(rep.orbit_classes as usize, naive_orbit_classes(&r, kind), "{lit} {kind}");
            assert_eq!(rep.orbit_classes, rep.burnside_classes);
        }
    }
}

#[test]
fn primes_and_squarefree() {
    let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
    assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    assert!(is_squarefree(1) && is_squarefree(30) && !is_squarefree(12));
}

fn any_group() -> impl Strategy<Value = SquarefreeGroup> {
    prop::sample::select(groups_up_to(120))
}

proptest! {
    #[test]
    fn group_laws(r in any_group(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let n = r.len();
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(r.mul_idx(r.mul_idx(a, b), c), r.mul_idx(a, r.mul_idx(b, c)));
        prop_assert_eq!(r.mul_idx(a, 0), a);
        prop_assert_eq!(r.mul_idx(0, a), a);
        prop_assert_eq!(r.mul_idx(a, r.inv_idx(a)), 0);
        let (ea, eb) = (r.elem(a), r.elem(b));
        prop_assert_eq!(r.index(&r.mul(&ea, &eb)), r.mul_idx(a, b));
        prop_assert_eq!(r.pow_idx(a, r.order_idx(a) as i64), 0);
        prop_assert_eq!(r.order() % r.order_idx(a), 0);
    }

    #[test]
    fn literals_round_trip(r in any_group()) {
        let back: SquarefreeGroup = r.literal().parse().unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn connection_sets_round_trip(r in prop::sample::select(groups_up_to(60)), mask in any::<u64>()) {
        let set = ElemSet::from_iter(r.len(), (1..r.len()).filter(|&i| mask >> ((i - 1) % 64) & 1 == 1));
        let s = ConnectionSet::from_set(&r, set).unwrap();
        let back = ConnectionSet::parse(&r, &s.format(&r)).unwrap();
        prop_assert_eq!(back, s);
    }
}
