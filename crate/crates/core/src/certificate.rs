//! JSON certificates (`"schema": "regrep/1"`) and their re-validation.
//!
//! Elements are written as `[a, b, c]` triples for `z^a y^b x^c`;
//! permutations as image arrays over the group's element indices.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cayley::search::{exhaustive_sweep, SweepReport};
use crate::cayley::{is_drr, ConnectionSet, Kind};
use crate::error::{Error, Result};
use crate::group::{GroupElement, SquarefreeGroup, Subgroup};
use crate::perm::Permutation;
use crate::witness::WitnessCertificate;
use crate::wreath::{check_wreath_condition, WreathCertificate};

pub const SCHEMA: &str = "regrep/1";

/// A serialized `(K, H)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WreathJson {
    pub k: Vec<[u64; 3]>,
    pub h: Vec<[u64; 3]>,
    pub k_order: usize,
    pub h_order: usize,
    pub left_checked: bool,
    pub right_checked: bool,
    pub right_by_equivalence: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub group: String,
    pub kind: Kind,
    pub s: Vec<[u64; 3]>,
    pub aut_order: String,
    pub stabilizer_sweep: usize,
    pub extra_automorphism: Vec<u32>,
    pub wreath: Option<WreathJson>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WreathOnlyJson {
    pub group: String,
    pub s: Vec<[u64; 3]>,
    pub wreath: WreathJson,
}

/// Certificate bodies, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Body {
    Witness(WitnessJson),
    Wreath(WreathOnlyJson),
    Sweep(SweepReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    #[serde(flatten)]
    pub body: Body,
}

fn triple(g: GroupElement) -> [u64; 3] {
    [g.a, g.b, g.c]
}

fn triples(r: &SquarefreeGroup, elems: impl IntoIterator<Item = usize>) -> Vec<[u64; 3]> {
    elems.into_iter().map(|g| triple(r.elem(g))).collect()
}

fn untriple(r: &SquarefreeGroup, t: &[u64; 3]) -> Result<usize> {
    if t[0] >= r.t() || t[1] >= r.n() || t[2] >= r.m() {
        return Err(Error::Rejected(format!("element {t:?} is not reduced for {}", r.name())));
    }
    Ok(r.index(&GroupElement::new(t[0], t[1], t[2])))
}

fn unsubgroup(r: &SquarefreeGroup, gens: &[[u64; 3]], order: usize) -> Result<Subgroup> {
    let gens = gens.iter().map(|t| untriple(r, t)).collect::<Result<Vec<_>>>()?;
    let sub = r.subgroup(&gens);
    if sub.order() != order {
        return Err(Error::Rejected(format!(
            "subgroup generated by {gens:?} has order {}, not {order}",
            sub.order()
        )));
    }
    Ok(sub)
}

pub fn wreath_json(r: &SquarefreeGroup, w: &WreathCertificate) -> WreathJson {
    WreathJson {
        k: triples(r, w.k.generators.iter().copied()),
        h: triples(r, w.h.generators.iter().copied()),
        k_order: w.k.order(),
        h_order: w.h.order(),
        left_checked: w.left_checked,
        right_checked: w.right_checked,
        right_by_equivalence: w.right_by_equivalence,
        degenerate: w.degenerate,
    }
}

pub fn witness_document(c: &WitnessCertificate) -> Document {
    let r = &c.group;
    Document {
        schema: SCHEMA.into(),
        body: Body::Witness(WitnessJson {
            group: r.literal(),
            kind: c.kind,
            s: triples(r, c.s.iter()),
            aut_order: c.aut_order.to_string(),
            stabilizer_sweep: c.stabilizer_sweep,
            extra_automorphism: c.extra.images().to_vec(),
            wreath: c.wreath.as_ref().map(|w| wreath_json(r, w)),
            source: c.source.clone(),
        }),
    }
}

pub fn wreath_document(r: &SquarefreeGroup, s: &ConnectionSet, w: &WreathCertificate) -> Document {
    Document {
        schema: SCHEMA.into(),
        body: Body::Wreath(WreathOnlyJson {
            group: r.literal(),
            s: triples(r, s.iter()),
            wreath: wreath_json(r, w),
        }),
    }
}

pub fn sweep_document(rep: &SweepReport) -> Document {
    Document {
        schema: SCHEMA.into(),
        body: Body::Sweep(rep.clone()),
    }
}

impl Document {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        if doc.schema != SCHEMA {
            return Err(Error::Rejected(format!("unknown schema {:?}", doc.schema)));
        }
        Ok(doc)
    }

    /// Recomputes every claim; returns a one-line summary.
    pub fn validate(&self) -> Result<String> {
        match &self.body {
            Body::Witness(w) => {
                let r: SquarefreeGroup = w.group.parse()?;
                let s = ConnectionSet::new(&r, w.s.iter().map(|t| untriple(&r, t)).collect::<Result<Vec<_>>>()?)?;
                let wreath = match &w.wreath {
                    Some(wj) => Some(revalidate_wreath(&r, &s, wj)?),
                    None => None,
                };
                let cert = WitnessCertificate {
                    group: r.clone(),
                    s,
                    kind: w.kind,
                    stabilizer_sweep: w.stabilizer_sweep,
                    aut_order: w
                        .aut_order
                        .parse::<BigUint>()
                        .map_err(|e| Error::Rejected(format!("aut_order: {e}")))?,
                    extra: Permutation::from_images(w.extra_automorphism.clone())?,
                    wreath,
                    source: w.source.clone(),
                };
                cert.verify()?;
                Ok(format!(
                    "valid {} witness on {}: |S| = {}, |Aut| = {}",
                    w.kind,
                    r.name(),
                    cert.s.len(),
                    cert.aut_order
                ))
            }
            Body::Wreath(w) => {
                let r: SquarefreeGroup = w.group.parse()?;
                let s = ConnectionSet::new(&r, w.s.iter().map(|t| untriple(&r, t)).collect::<Result<Vec<_>>>()?)?;
                revalidate_wreath(&r, &s, &w.wreath)?;
                if r.len() <= 128 && is_drr(&r, &s)? {
                    return Err(Error::Rejected("wreath pair holds but Cay(R, S) is a DRR".into()));
                }
                Ok(format!("valid wreath pair on {}", r.name()))
            }
            Body::Sweep(rep) => {
                let r: SquarefreeGroup = rep.group.parse()?;
                let again = exhaustive_sweep(&r, rep.kind, !rep.complete)?;
                if &again != rep {
                    return Err(Error::Rejected("sweep does not reproduce".into()));
                }
                Ok(format!(
                    "sweep on {} reproduced: {} orbit classes, witness {}",
                    r.name(),
                    rep.orbit_classes,
                    if rep.witness.is_some() { "found" } else { "absent" }
                ))
            }
        }
    }
}

fn revalidate_wreath(r: &SquarefreeGroup, s: &ConnectionSet, wj: &WreathJson) -> Result<WreathCertificate> {
    let k = unsubgroup(r, &wj.k, wj.k_order)?;
    let h = unsubgroup(r, &wj.h, wj.h_order)?;
    let w = check_wreath_condition(r, s.as_set(), &k, &h)?
        .ok_or_else(|| Error::Rejected("wreath condition fails".into()))?;
    if w.degenerate != wj.degenerate {
        return Err(Error::Rejected("degenerate flag mismatch".into()));
    }
    Ok(w)
}
