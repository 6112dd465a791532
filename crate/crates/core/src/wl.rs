//! Weisfeiler-Leman color refinement. Colors are the type automaton's states,
//! so the color of a node in round `t` is its full type of depth `t`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{initial_configuration, step, AcceptingSet, AutomatonError, Configuration, TypeAutomaton};
use crate::gmml::Formula;
use crate::kripke::{disjoint_union, KripkeModel, ModelError, NodeId, PointedModel};
use crate::types::{render_type, TypeError, TypeId, TypeTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WlError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("not a classical graph: {0}")]
    NotClassic(String),
}

/// Colors of round `t`, by node position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub round: usize,
    pub colors: Vec<TypeId>,
}

impl Coloring {
    /// Class labels numbered by first occurrence; equal kernels give equal labels.
    pub fn kernel(&self) -> Vec<usize> {
        let mut first = HashMap::new();
        self.colors
            .iter()
            .map(|c| {
                let next = first.len();
                *first.entry(*c).or_insert(next)
            })
            .collect()
    }

    pub fn classes(&self) -> usize {
        self.kernel().into_iter().max().map_or(0, |m| m + 1)
    }

    /// Classes as node lists, ordered by first member.
    pub fn partition(&self, model: &KripkeModel) -> Vec<Vec<NodeId>> {
        let mut out: Vec<Vec<NodeId>> = vec![Vec::new(); self.classes()];
        for (pos, label) in self.kernel().into_iter().enumerate() {
            out[label].push(model.node_at(pos));
        }
        out
    }

    pub fn same_partition(&self, other: &Coloring) -> bool {
        self.kernel() == other.kernel()
    }

    /// Every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Coloring) -> bool {
        let mut map = HashMap::new();
        self.colors.iter().zip(&coarser.colors).all(|(fine, coarse)| *map.entry(*fine).or_insert(*coarse) == *coarse)
    }

    fn from_config(c: Configuration<TypeId>) -> Self {
        Coloring { round: c.round, colors: c.states }
    }
}

fn automaton(table: &Arc<TypeTable>) -> TypeAutomaton {
    TypeAutomaton::new(table.clone(), AcceptingSet::none())
}

/// Round 0: every node colored by its atom profile.
pub fn initial_coloring(table: &Arc<TypeTable>, model: &KripkeModel) -> Result<Coloring, WlError> {
    Ok(Coloring::from_config(initial_configuration(&automaton(table), model)?))
}

/// One refinement round: the type automaton's transition on successor colors.
pub fn refine_round(table: &Arc<TypeTable>, model: &KripkeModel, c: &Coloring) -> Result<Coloring, WlError> {
    let config = Configuration { round: c.round, states: c.colors.clone() };
    Ok(Coloring::from_config(step(&automaton(table), model, &config)?))
}

/// All rounds up to stabilization.
#[derive(Debug, Clone)]
pub struct Refinement {
    /// Rounds `0..=stable_at`.
    pub history: Vec<Coloring>,
    /// The first round `t` whose partition is final: it equals the partition of
    /// round `t − 1`, or it is already discrete.
    pub stable_at: usize,
}

impl Refinement {
    pub fn stable(&self) -> &Coloring {
        &self.history[self.stable_at]
    }
}

/// Refines until the partition stops changing. Stabilizes by round `|W|`.
pub fn refine_to_stable(table: &Arc<TypeTable>, model: &KripkeModel) -> Result<Refinement, WlError> {
    let mut history = vec![initial_coloring(table, model)?];
    loop {
        let last = history.last().unwrap();
        if last.classes() == model.size() {
            break;
        }
        let next = refine_round(table, model, last)?;
        let done = next.same_partition(last);
        history.push(next);
        if done {
            break;
        }
    }
    let stable_at = history.len() - 1;
    Ok(Refinement { history, stable_at })
}

/// Fixed number of rounds, without the stability check.
pub fn refine_rounds(table: &Arc<TypeTable>, model: &KripkeModel, rounds: usize) -> Result<Vec<Coloring>, WlError> {
    let mut history = vec![initial_coloring(table, model)?];
    for _ in 0..rounds {
        let next = refine_round(table, model, history.last().unwrap())?;
        history.push(next);
    }
    Ok(history)
}

/// Refinement on a single irreflexive symmetric relation without propositions.
pub fn classic_wl(table: &Arc<TypeTable>, model: &KripkeModel) -> Result<Refinement, WlError> {
    validate_classic(model)?;
    refine_to_stable(table, model)
}

pub fn validate_classic(model: &KripkeModel) -> Result<(), WlError> {
    let vocab = model.vocabulary();
    if vocab.channels() != 1 {
        return Err(WlError::NotClassic(format!("{} relations, expected 1", vocab.channels())));
    }
    if let Some(p) = vocab.props().first() {
        return Err(WlError::NotClassic(format!("proposition p{p} declared, expected none")));
    }
    for (_, u, v) in model.edges() {
        if u == v {
            return Err(WlError::NotClassic(format!("self-loop at {u}")));
        }
        if !model.successors(v, 1)?.contains(&u) {
            return Err(WlError::NotClassic(format!("edge ({u},{v}) without ({v},{u})")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Distinction {
    Equivalent { stable_at: usize },
    SeparatedAt { round: usize },
}

impl Distinction {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Distinction::Equivalent { .. })
    }
}

/// Refines the disjoint union and compares the two points' colors round by round.
pub fn distinguish(pm1: &PointedModel, pm2: &PointedModel) -> Result<Distinction, WlError> {
    let table = TypeTable::shared(pm1.vocabulary().clone());
    Ok(distinguish_in(&table, pm1, pm2)?.0)
}

fn distinguish_in(
    table: &Arc<TypeTable>,
    pm1: &PointedModel,
    pm2: &PointedModel,
) -> Result<(Distinction, Vec<Coloring>, usize), WlError> {
    let union = disjoint_union(pm1.model(), pm2.model())?;
    let x = union.model.position(union.left[&pm1.point()])?;
    let y = union.model.position(union.right[&pm2.point()])?;
    let refinement = refine_to_stable(table, &union.model)?;
    let verdict = match refinement.history.iter().position(|c| c.colors[x] != c.colors[y]) {
        Some(round) => Distinction::SeparatedAt { round },
        None => Distinction::Equivalent { stable_at: refinement.stable_at },
    };
    Ok((verdict, refinement.history, x))
}

/// A formula true at `pm1` and false at `pm2`: the rendered full type of
/// `pm1` at the separating round. `None` when the points are equivalent.
pub fn distinguishing_formula(pm1: &PointedModel, pm2: &PointedModel) -> Result<(Distinction, Option<Formula>), WlError> {
    let table = TypeTable::shared(pm1.vocabulary().clone());
    let (verdict, history, x) = distinguish_in(&table, pm1, pm2)?;
    let formula = match verdict {
        Distinction::SeparatedAt { round } => Some(render_type(&table, history[round].colors[x])?),
        Distinction::Equivalent { .. } => None,
    };
    Ok((verdict, formula))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gmml::check;
    use crate::kripke::Vocabulary;
    use crate::types::full_type;
    use proptest::prelude::*;

    fn v(props: &[u32], a: u32) -> Vocabulary {
        Vocabulary::new(props.iter().copied(), a).unwrap()
    }

    fn undirected(n: u32, edges: &[(u32, u32)]) -> KripkeModel {
        let mut b = KripkeModel::builder(v(&[], 1)).nodes(0..n);
        for &(x, y) in edges {
            b = b.edge(1, x, y).edge(1, y, x);
        }
        b.build().unwrap()
    }

    fn path3() -> KripkeModel {
        undirected(3, &[(0, 1), (1, 2)])
    }

    fn cycle(n: u32) -> KripkeModel {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        undirected(n, &edges)
    }

    fn pm(m: &KripkeModel, w: u32) -> PointedModel {
        PointedModel::new(m.clone(), NodeId(w)).unwrap()
    }

    #[test]
    fn three_path_rounds() {
        let t = TypeTable::shared(v(&[], 1));
        let m = path3();
        let c0 = initial_coloring(&t, &m).unwrap();
        assert_eq!(c0.classes(), 1);
        let c1 = refine_round(&t, &m, &c0).unwrap();
        assert_eq!(c1.partition(&m), vec![vec![NodeId(0), NodeId(2)], vec![NodeId(1)]]);
        let r = refine_to_stable(&t, &m).unwrap();
        assert_eq!(r.stable_at, 2);
        assert_eq!(r.stable().classes(), 2);
    }

    #[test]
    fn single_node_is_stable_at_zero() {
        let t = TypeTable::shared(v(&[], 1));
        let m = KripkeModel::builder(v(&[], 1)).node(0).build().unwrap();
        assert_eq!(refine_to_stable(&t, &m).unwrap().stable_at, 0);
    }

    #[test]
    fn regular_graphs_stay_monochrome() {
        let t = TypeTable::shared(v(&[], 1));
        for m in [cycle(3), cycle(4)] {
            for c in refine_rounds(&t, &m, 5).unwrap() {
                assert_eq!(c.classes(), 1);
            }
            assert_eq!(refine_to_stable(&t, &m).unwrap().stable_at, 1);
        }
    }

    #[test]
    fn distinguish_examples() {
        let p = path3();
        let copy = p.relabel(|n| NodeId(n.0 + 10)).unwrap();
        assert!(distinguish(&pm(&p, 0), &pm(&copy, 10)).unwrap().is_equivalent());
        assert!(distinguish(&pm(&p, 1), &pm(&copy, 11)).unwrap().is_equivalent());
        assert_eq!(distinguish(&pm(&p, 0), &pm(&p, 1)).unwrap(), Distinction::SeparatedAt { round: 1 });
        assert!(distinguish(&pm(&cycle(3), 0), &pm(&cycle(4), 0)).unwrap().is_equivalent());

        let other = KripkeModel::builder(v(&[0], 1)).node(0).build().unwrap();
        assert!(matches!(distinguish(&pm(&p, 0), &pm(&other, 0)), Err(WlError::Model(_))));
    }

    #[test]
    fn distinguishing_formula_for_path_end() {
        let p = path3();
        let (verdict, f) = distinguishing_formula(&pm(&p, 0), &pm(&p, 1)).unwrap();
        assert_eq!(verdict, Distinction::SeparatedAt { round: 1 });
        let f = f.unwrap();
        assert_eq!(f.modal_depth(), 1);
        assert!(check(&pm(&p, 0), &f).unwrap());
        assert!(!check(&pm(&p, 1), &f).unwrap());
        // agrees with ⟨1⟩=1 ⊤ on every node of the path
        let one = Formula::exactly(1, 1, Formula::Top);
        for w in 0..3 {
            assert_eq!(check(&pm(&p, w), &f).unwrap(), check(&pm(&p, w), &one).unwrap());
        }
        assert_eq!(distinguishing_formula(&pm(&cycle(3), 0), &pm(&cycle(4), 1)).unwrap().1, None);
    }

    #[test]
    fn classic_validation() {
        let t = TypeTable::shared(v(&[], 1));
        let loop_ = KripkeModel::builder(v(&[], 1)).nodes([0, 1]).edge(1, 0, 0).build().unwrap();
        assert!(matches!(classic_wl(&t, &loop_), Err(WlError::NotClassic(m)) if m.contains("self-loop")));
        let one_way = KripkeModel::builder(v(&[], 1)).nodes([0, 1]).edge(1, 0, 1).build().unwrap();
        assert!(matches!(classic_wl(&t, &one_way), Err(WlError::NotClassic(m)) if m.contains("without")));
        let props = KripkeModel::builder(v(&[0], 1)).node(0).build().unwrap();
        assert!(classic_wl(&TypeTable::shared(v(&[0], 1)), &props).is_err());
        let m = path3();
        assert_eq!(classic_wl(&t, &m).unwrap().history, refine_to_stable(&t, &m).unwrap().history);
    }

    fn arb_model(max: u32) -> impl Strategy<Value = KripkeModel> {
        (1..=max).prop_flat_map(|n| {
            let edges = proptest::collection::vec((1u32..=2, 0..n, 0..n), 0..(2 * n as usize + 2));
            let truths = proptest::collection::vec(0..n, 0..(n as usize));
            (edges, truths).prop_map(move |(edges, truths)| {
                let mut b = KripkeModel::builder(v(&[0], 2)).nodes(0..n);
                for (c, x, y) in edges {
                    b = b.edge(c, x, y);
                }
                for w in truths {
                    b = b.truth(0, w);
                }
                b.build().unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn colors_are_full_types(m in arb_model(6)) {
            let t = TypeTable::shared(m.vocabulary().clone());
            let history = refine_rounds(&t, &m, 3).unwrap();
            let m = Arc::new(m);
            for p in PointedModel::all_points(m.clone()) {
                for c in &history {
                    prop_assert_eq!(c.colors[p.position()], full_type(&t, &p, c.round).unwrap());
                }
            }
        }

        #[test]
        fn refinement_chain_and_bound(m in arb_model(8)) {
            let t = TypeTable::shared(m.vocabulary().clone());
            let r = refine_to_stable(&t, &m).unwrap();
            prop_assert!(r.stable_at <= m.size());
            for pair in r.history.windows(2) {
                prop_assert!(pair[1].refines(&pair[0]));
            }
            // stable means stable forever after
            let more = refine_rounds(&t, &m, r.stable_at + 3).unwrap();
            for c in &more[r.stable_at..] {
                prop_assert!(c.same_partition(r.stable()));
            }
        }

        #[test]
        fn permuting_nodes_permutes_partitions(m in arb_model(6), shift in 1u32..50) {
            let t = TypeTable::shared(m.vocabulary().clone());
            let n = m.size() as u32;
            let rename = |x: NodeId| NodeId(100 + (x.0 + shift) % n);
            let permuted = m.relabel(rename).unwrap();
            let a = refine_rounds(&t, &m, 4).unwrap();
            let b = refine_rounds(&t, &permuted, 4).unwrap();
            for (ca, cb) in a.iter().zip(&b) {
                for x in 0..m.size() {
                    let px = permuted.position(rename(m.node_at(x))).unwrap();
                    prop_assert_eq!(ca.colors[x], cb.colors[px]);
                }
            }
        }

        #[test]
        fn distinguishing_formulas_verify(m1 in arb_model(4), m2 in arb_model(4), a in 0u32..4, b in 0u32..4) {
            let x = NodeId(a % m1.size() as u32);
            let y = NodeId(b % m2.size() as u32);
            let (p1, p2) = (PointedModel::new(m1, x).unwrap(), PointedModel::new(m2, y).unwrap());
            let (verdict, f) = distinguishing_formula(&p1, &p2).unwrap();
            prop_assert_eq!(verdict.is_equivalent(), f.is_none());
            if let Some(f) = f {
                prop_assert!(check(&p1, &f).unwrap());
                prop_assert!(!check(&p2, &f).unwrap());
            }
        }
    }
}
