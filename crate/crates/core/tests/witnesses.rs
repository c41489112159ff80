use num_bigint::BigUint;
use regrep::aut::{dihedral_beta, set_stabilizer};
use regrep::cayley::search::exhaustive_sweep;
use regrep::cayley::{aut_group, build_cayley, is_drr, ConnectionSet, Kind};
use regrep::certificate::{sweep_document, witness_document, wreath_document, Body, Document};
use regrep::classify::{classify, pointwise_rigidity_check, Clause};
use regrep::perm::regular_representation;
use regrep::witness::{
    construct_case1_witness, psl2_witness, search_witness, Strategy, WitnessOutcome,
};
use regrep::wreath::{
    admissible_pairs, alpha_k, char_h_blocks, check_wreath_condition, find_gen_wreath,
    gen_wreath_from_stabilizer,
};
use regrep::{Error, SquarefreeGroup};

fn grp(s: &str) -> SquarefreeGroup {
    s.parse().unwrap()
}

fn set(r: &SquarefreeGroup, s: &str) -> ConnectionSet {
    ConnectionSet::parse(r, s).unwrap()
}

#[test]
fn f21_pair_scan() {
    let r = grp("F21");
    assert_eq!(admissible_pairs(&r).unwrap().len(), 8);
    assert!(find_gen_wreath(&r, set(&r, "x, y").as_set()).unwrap().is_none());
    let w = find_gen_wreath(&r, set(&r, "x").as_set()).unwrap().unwrap();
    assert!(w.degenerate && w.is_plain() && w.k.contains(r.index(&r.x())));
    let all = set(&r, "all");
    assert!(find_gen_wreath(&r, all.as_set()).unwrap().is_some());
}

#[test]
fn coset_set_and_its_vertex_map() {
    let r = grp("F21");
    let s = set(&r, "<y>*x");
    assert_eq!(s.len(), 7);
    let k = r.subgroup(&[r.index(&r.y())]);
    let cert = check_wreath_condition(&r, s.as_set(), &k, &k).unwrap().unwrap();
    let g = build_cayley(&r, &s).unwrap();
    let y = r.index(&r.y());
    let alpha = alpha_k(&g, &cert, y).unwrap();
    assert_eq!((0..r.len()).filter(|&v| !alpha.fixes(v)).count(), 7);
    assert!(aut_group(&g).unwrap().order() > 21);
    assert_eq!(alpha_k(&g, &cert, 0), Err(Error::NotInK));
    // The maps for k and k' compose to the map for kk'.
    let y2 = r.mul_idx(y, y);
    assert_eq!(alpha.then(&alpha), alpha_k(&g, &cert, y2).unwrap());
}

#[test]
fn bad_chains_are_rejected() {
    let r = grp("F21");
    let full = r.subgroup(&r.generators());
    let k = r.subgroup(&[r.index(&r.y())]);
    let s = set(&r, "x");
    assert!(matches!(check_wreath_condition(&r, s.as_set(), &k, &full), Err(Error::BadChain(_))));
    let trivial = r.subgroup(&[]);
    assert!(matches!(check_wreath_condition(&r, s.as_set(), &trivial, &k), Err(Error::BadChain(_))));
}

#[test]
fn wreath_from_stabilizer() {
    // With G = R-hat the stabilizer is trivial, so the inclusions fail.
    let r = grp("F21");
    let s = set(&r, "<y>*x");
    let k = r.subgroup(&[r.index(&r.y())]);
    let rhat = regular_representation(&r).unwrap();
    assert!(matches!(
        gen_wreath_from_stabilizer(&r, &s, &rhat, &k, &k),
        Err(Error::HypothesisNotMet(_))
    ));
    // Over subgroups R-hat <= G <= Aut generated by one extra automorphism,
    // every success agrees with the direct check, and some G succeeds.
    let g = build_cayley(&r, &s).unwrap();
    let aut = aut_group(&g).unwrap();
    let mut extras: Vec<_> = aut.generators().to_vec();
    extras.push(alpha_k(&g, &check_wreath_condition(&r, s.as_set(), &k, &k).unwrap().unwrap(), r.index(&r.y())).unwrap());
    let mut successes = 0;
    for e in extras {
        let mut gens = rhat.generators().to_vec();
        gens.push(e);
        let sub = regrep::PermGroup::new(r.len(), gens).unwrap();
        if let Ok(cert) = gen_wreath_from_stabilizer(&r, &s, &sub, &k, &k) {
            assert_eq!(check_wreath_condition(&r, s.as_set(), &k, &k).unwrap(), Some(cert));
            successes += 1;
        }
    }
    assert!(successes > 0);
    // Complete digraph on D6: no nontrivial r normalises a vertex stabilizer.
    let d6 = grp("D6");
    let all = set(&d6, "all");
    let kk = d6.subgroup(&[d6.index(&d6.y())]);
    let full = aut_group(&build_cayley(&d6, &all).unwrap()).unwrap();
    assert!(matches!(
        gen_wreath_from_stabilizer(&d6, &all, &full, &kk, &kk),
        Err(Error::HypothesisNotMet(_))
    ));
}

#[test]
fn stabilizer_normalises_h_for_case_one() {
    let r = grp("sqfree:t=1,n=21,m=2,j=20");
    let c = construct_case1_witness(&r).unwrap();
    let w = c.wreath.clone().unwrap();
    assert_eq!((w.k.order(), w.h.order()), (7, 14));
    assert!(char_h_blocks(&r, c.s.as_set(), &w.k, &w.h).unwrap());
    // S inside K, and S = R minus the identity, both violate the last hypothesis.
    let inside = set(&r, "<y^3>");
    assert!(!char_h_blocks(&r, inside.as_set(), &w.k, &w.h).unwrap());
    assert!(!char_h_blocks(&r, set(&r, "all").as_set(), &w.k, &w.h).unwrap());
}

#[test]
fn strategies() {
    let f21 = grp("F21");
    match search_witness(&f21, Kind::Digraph, Strategy::Randomized, 100_000, 7).unwrap() {
        WitnessOutcome::Found(c) => c.verify().unwrap(),
        other => panic!("{other:?}"),
    }
    match search_witness(&f21, Kind::Digraph, Strategy::ExhaustiveOrbitReduced, 0, 0).unwrap() {
        WitnessOutcome::Found(c) => assert_eq!(c.s.format(&f21), "{x^2, yx, y^2, y^3}"),
        other => panic!("{other:?}"),
    }
    for strategy in [Strategy::Ladder, Strategy::StructuredFirst] {
        match search_witness(&f21, Kind::Graph, strategy, 10_000, 1).unwrap() {
            WitnessOutcome::NonExistence(rep) => assert!(rep.certifies_detecting()),
            other => panic!("{other:?}"),
        }
    }
    let c13 = grp("C13");
    assert_eq!(
        search_witness(&c13, Kind::Digraph, Strategy::Randomized, 1000, 3).unwrap_err(),
        Error::BudgetExhausted(1000)
    );
    assert!("sideways".parse::<Strategy>().is_err());
}

#[test]
fn certificates_round_trip() {
    let f21 = grp("F21");
    let WitnessOutcome::Found(c) =
        search_witness(&f21, Kind::Digraph, Strategy::Ladder, 10_000, 1).unwrap()
    else {
        panic!("F21 has a digraph witness")
    };
    let doc = witness_document(&c);
    let json = doc.to_json();
    let back = Document::from_json(&json).unwrap();
    assert_eq!(back, doc);
    assert!(back.validate().unwrap().starts_with("valid digraph witness"));
    assert_eq!(witness_document(&c).to_json(), json);

    // Dropping an element of S invalidates the certificate.
    let mut bad = back.clone();
    if let Body::Witness(w) = &mut bad.body {
        w.s.pop();
    }
    assert!(bad.validate().is_err());

    let wrong_schema = json.replace("regrep/1", "regrep/0");
    assert!(matches!(Document::from_json(&wrong_schema), Err(Error::Rejected(_))));
    assert!(matches!(Document::from_json("{"), Err(Error::Parse { .. })));

    let s = set(&f21, "<y>*x");
    let w = find_gen_wreath(&f21, s.as_set()).unwrap().unwrap();
    let wd = Document::from_json(&wreath_document(&f21, &s, &w).to_json()).unwrap();
    assert!(wd.validate().is_ok());

    let rep = exhaustive_sweep(&grp("C7"), Kind::Digraph, false).unwrap();
    let sd = Document::from_json(&sweep_document(&rep).to_json()).unwrap();
    assert!(sd.validate().is_ok());
}

#[test]
fn stabilizers_and_regularity() {
    // A DRR always has trivial Aut(R)_S.
    for lit in ["C5", "D6", "C7", "D10", "F21"] {
        let r = grp(lit);
        for mask in (0u64..1 << (r.len() - 1)).step_by(97) {
            let s = ConnectionSet::new(&r, (1..r.len()).filter(|&i| mask >> (i - 1) & 1 == 1)).unwrap();
            if is_drr(&r, &s).unwrap() {
                assert!(set_stabilizer(&r, s.as_set()).unwrap().trivial);
            }
        }
    }
}

#[test]
fn dihedral_beta_errors() {
    let d14 = grp("D14");
    assert!(matches!(dihedral_beta(&d14, set(&d14, "x").as_set()), Err(Error::WrongShape(_))));
    let d6 = grp("D6");
    assert_eq!(dihedral_beta(&d6, set(&d6, "y").as_set()).unwrap_err(), Error::NotInverseClosed);
}

#[test]
fn classification_examples() {
    let v = classify(&grp("C1"));
    assert_eq!(v.clause, Clause::Trivial);
    assert!(classify(&grp("C2")).drr_detecting);
    let d30 = classify(&grp("D30"));
    assert_eq!((d30.drr_detecting, d30.grr_detecting), (false, true));
    assert_eq!(classify(&grp("sqfree:t=1,n=31,m=5,j=2")).clause, Clause::ThirtyOneFive);
    assert_eq!(classify(&grp("sqfree:t=1,n=23,m=11,j=2")).clause, Clause::SafePrimePair);
    // q = 7 is a safe prime but q < 11.
    assert_eq!(classify(&grp("sqfree:t=1,n=7,m=3,j=2")).clause, Clause::TwentyOne);
}

#[test]
fn rigidity_hypotheses() {
    let r = grp("sqfree:t=1,n=7,m=6,j=3");
    let h = r.subgroup(&[r.index(&r.y()), r.pow_idx(r.index(&r.x()), 2)]);
    assert!(pointwise_rigidity_check(&r, &h).unwrap());
    let d6 = grp("D6");
    let rot = d6.subgroup(&[d6.index(&d6.y())]);
    assert!(matches!(pointwise_rigidity_check(&d6, &rot), Err(Error::HypothesisFailed(_))));
}

#[test]
fn psl_is_only_configured_for_eleven() {
    assert!(matches!(psl2_witness(13), Err(Error::NotConfigured(_))));
    let w = psl2_witness(11).unwrap();
    assert_eq!(w.certificate.aut_order, BigUint::from(660u32));
    assert_eq!(w.degree, 55);
    assert!(w.self_normalising());
}
