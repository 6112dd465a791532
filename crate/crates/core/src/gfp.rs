//! Greatest fixed point of the refinement pair formula over a single edge relation `E`,
//! evaluated with the Härtig equicardinality quantifier.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kripke::{disjoint_union, KripkeModel, ModelError, NodeId, PointedModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfpError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("the fixpoint oracle needs exactly one channel, the model has {0}")]
    ChannelCount(u32),
    #[error("the fixpoint oracle needs a vocabulary without propositions, the model declares {0}")]
    Propositions(usize),
    #[error("relation over {relation} nodes, model has {domain}")]
    DomainMismatch { relation: usize, domain: usize },
}

/// A binary relation over a model's domain, stored by node position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRelation {
    size: usize,
    bits: Vec<bool>,
    pub stage: usize,
}

impl PairRelation {
    /// `W^0`, the full square.
    pub fn full(size: usize) -> Self {
        PairRelation { size, bits: vec![true; size * size], stage: 0 }
    }

    pub fn domain_size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.size + y]
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs of positions, lexicographically ordered.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |x| (0..self.size).filter(move |&y| self.contains(x, y)).map(move |y| (x, y)))
    }

    pub fn pairs(&self, model: &KripkeModel) -> BTreeSet<(NodeId, NodeId)> {
        self.positions().map(|(x, y)| (model.node_at(x), model.node_at(y))).collect()
    }

    pub fn same_pairs(&self, other: &PairRelation) -> bool {
        self.bits == other.bits
    }

    pub fn is_subset(&self, other: &PairRelation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    pub fn is_equivalence(&self) -> bool {
        let n = self.size;
        (0..n).all(|x| self.contains(x, x))
            && self.positions().all(|(x, y)| self.contains(y, x))
            && self.positions().all(|(x, y)| (0..n).all(|z| !self.contains(y, z) || self.contains(x, z)))
    }

    /// Class labels by first occurrence, read off an equivalence relation.
    pub fn kernel(&self) -> Vec<usize> {
        let mut labels: Vec<Option<usize>> = vec![None; self.size];
        let mut next = 0;
        for x in 0..self.size {
            if labels[x].is_none() {
                for (y, label) in labels.iter_mut().enumerate().skip(x) {
                    if label.is_none() && self.contains(x, y) {
                        *label = Some(next);
                    }
                }
                next += 1;
            }
        }
        labels.into_iter().map(|l| l.unwrap()).collect()
    }
}

/// Härtig's quantifier: `A` and `B` have the same number of elements.
pub fn hartig_holds(domain: &BTreeSet<NodeId>, a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> Result<bool, GfpError> {
    if let Some(w) = a.iter().chain(b).find(|w| !domain.contains(w)) {
        return Err(ModelError::UnknownNode(*w).into());
    }
    Ok(a.len() == b.len())
}

fn check_structure(model: &KripkeModel) -> Result<(), GfpError> {
    let v = model.vocabulary();
    if v.channels() != 1 {
        return Err(GfpError::ChannelCount(v.channels()));
    }
    if !v.props().is_empty() {
        return Err(GfpError::Propositions(v.props().len()));
    }
    Ok(())
}

/// One application of the body: `(x,y)` stays in `W` iff for every `z`
/// `H y′ x′ [E x y′ ∧ W y′ z, E y x′ ∧ W x′ z]`.
pub fn phi_wl_step(model: &KripkeModel, w: &PairRelation) -> Result<PairRelation, GfpError> {
    check_structure(model)?;
    let n = model.size();
    if w.size != n {
        return Err(GfpError::DomainMismatch { relation: w.size, domain: n });
    }
    // witnesses[x * n + z] = |{y′ : E x y′ ∧ W y′ z}|
    let mut witnesses = vec![0usize; n * n];
    for x in 0..n {
        for &y in model.successors_at(x, 1) {
            for z in 0..n {
                if w.contains(y, z) {
                    witnesses[x * n + z] += 1;
                }
            }
        }
    }
    let row = |x: usize| &witnesses[x * n..(x + 1) * n];
    let mut bits = vec![false; n * n];
    for x in 0..n {
        for y in 0..n {
            bits[x * n + y] = w.contains(x, y) && row(x) == row(y);
        }
    }
    Ok(PairRelation { size: n, bits, stage: w.stage + 1 })
}

#[derive(Debug, Clone)]
pub struct Fixpoint {
    /// `W^0 ..= W^stages`.
    pub history: Vec<PairRelation>,
    /// The least `n` with `W^{n+1} = W^n`.
    pub stages: usize,
}

impl Fixpoint {
    pub fn relation(&self) -> &PairRelation {
        &self.history[self.stages]
    }

    /// `W^t`; stages past the fixed point repeat it.
    pub fn at(&self, t: usize) -> &PairRelation {
        &self.history[t.min(self.stages)]
    }
}

pub fn phi_wl_fixpoint(model: &KripkeModel) -> Result<Fixpoint, GfpError> {
    check_structure(model)?;
    let mut history = vec![PairRelation::full(model.size())];
    loop {
        let last = history.last().unwrap();
        let next = phi_wl_step(model, last)?;
        if next.same_pairs(last) {
            break;
        }
        history.push(next);
    }
    let stages = history.len() - 1;
    Ok(Fixpoint { history, stages })
}

/// The union's fixed point and the positions of the two renamed points.
pub fn union_fixpoint(pm1: &PointedModel, pm2: &PointedModel) -> Result<(Fixpoint, usize, usize), GfpError> {
    check_structure(pm1.model())?;
    check_structure(pm2.model())?;
    let u = disjoint_union(pm1.model(), pm2.model())?;
    let x = u.model.position(u.left[&pm1.point()])?;
    let y = u.model.position(u.right[&pm2.point()])?;
    Ok((phi_wl_fixpoint(&u.model)?, x, y))
}

pub fn wl_equivalent_via_gfp(pm1: &PointedModel, pm2: &PointedModel) -> Result<bool, GfpError> {
    let (fix, x, y) = union_fixpoint(pm1, pm2)?;
    Ok(fix.relation().contains(x, y))
}

/// Whether the renamed pair lies in `W^t` on the disjoint union.
pub fn stagewise_agreement(pm1: &PointedModel, pm2: &PointedModel, t: usize) -> Result<bool, GfpError> {
    let (fix, x, y) = union_fixpoint(pm1, pm2)?;
    Ok(fix.at(t).contains(x, y))
}
