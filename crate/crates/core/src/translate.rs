//! Effective translations between countable disjunctions of formulas and type
//! automata, finitized by explicit budgets.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{accepting_rounds, run_all, AcceptingSet, Automaton, AutomatonError, RunBudget, TypeAutomaton};
use crate::gmml::{check, satisfying_positions, Disjunction, Formula};
use crate::kripke::{KripkeModel, ModelError, NodeId};
use crate::stream::{diagonal, BudgetHit, BudgetedEnumerator, Emit};
use crate::types::{enumerate_full_types, render_type, tree_model_of_type, TypeError, TypeId, TypeTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Deepest types enumerated when reading an automaton back.
    pub max_depth: usize,
    /// Largest out-degree per channel of the realizing models.
    pub max_degree: usize,
    pub max_rounds: usize,
    pub max_items: Option<usize>,
    /// Items of an enumerated accepting set examined per run.
    pub max_steps: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_depth: 2, max_degree: 2, max_rounds: 2, max_items: None, max_steps: 100_000 }
    }
}

impl Budgets {
    fn run_budget(&self) -> RunBudget {
        RunBudget { max_rounds: self.max_rounds, max_steps: self.max_steps }
    }
}

/// The full types of depth `md(φ)` and degree at most `d` whose tree models satisfy `φ`.
pub fn formula_to_type_disjunction(
    table: &Arc<TypeTable>,
    phi: &Formula,
    d: usize,
) -> Result<BudgetedEnumerator<TypeId>, TranslateError> {
    phi.check_vocabulary(table.vocabulary())?;
    let t = table.clone();
    let phi = phi.clone();
    let source = enumerate_full_types(table, phi.modal_depth(), d).filter_map(move |e| match e {
        Emit::Item(id) => match tree_model_of_type(&t, id) {
            Ok(pm) => check(&pm, &phi).expect("vocabulary checked").then_some(Emit::Item(id)),
            // a realizer above the size cap: the type is out of reach, not rejected
            Err(_) => Some(Emit::BudgetReached(BudgetHit::DEGREE)),
        },
        marker => Some(marker),
    });
    Ok(BudgetedEnumerator::new(source))
}

/// The type automaton whose accepting set is the diagonal interleaving of the
/// disjuncts' type streams.
///
/// Disjuncts of the enumerated tail that do not fit the vocabulary contribute nothing.
pub fn disjunction_to_automaton(table: &Arc<TypeTable>, d: &Disjunction, degree: usize) -> Result<TypeAutomaton, TranslateError> {
    for f in d.finite_part() {
        f.check_vocabulary(table.vocabulary())?;
    }
    let t = table.clone();
    let streams =
        d.stream().map(move |f| formula_to_type_disjunction(&t, &f, degree).unwrap_or_else(|_| BudgetedEnumerator::empty()));
    Ok(TypeAutomaton::new(table.clone(), AcceptingSet::enumerated(diagonal(streams))))
}

/// A disjunction of full types, checked by comparing the point's full types.
#[derive(Debug, Clone)]
pub struct TypeDisjunction {
    table: Arc<TypeTable>,
    types: Vec<TypeId>,
    by_depth: BTreeMap<usize, HashSet<TypeId>>,
    marker: Option<BudgetHit>,
}

impl TypeDisjunction {
    pub fn new(table: Arc<TypeTable>, types: Vec<TypeId>, marker: Option<BudgetHit>) -> Result<Self, TypeError> {
        let mut by_depth: BTreeMap<usize, HashSet<TypeId>> = BTreeMap::new();
        for &id in &types {
            if !table.is_full(id)? {
                return Err(TypeError::NotFull);
            }
            by_depth.entry(table.depth(id)? as usize).or_default().insert(id);
        }
        Ok(TypeDisjunction { table, types, by_depth, marker })
    }

    pub fn from_stream(table: Arc<TypeTable>, stream: BudgetedEnumerator<TypeId>) -> Result<Self, TypeError> {
        let (types, marker) = stream.into_parts();
        Self::new(table, types, marker)
    }

    pub fn types(&self) -> &[TypeId] {
        &self.types
    }

    pub fn marker(&self) -> Option<BudgetHit> {
        self.marker
    }

    pub fn table(&self) -> &Arc<TypeTable> {
        &self.table
    }

    /// Truth at every node of `model`.
    pub fn holds_everywhere(&self, model: &KripkeModel) -> Result<Vec<bool>, TranslateError> {
        let mut out = vec![false; model.size()];
        let Some(&deepest) = self.by_depth.keys().next_back() else {
            return Ok(out);
        };
        let a = TypeAutomaton::new(self.table.clone(), AcceptingSet::none());
        for c in run_all(&a, model, deepest)? {
            if let Some(set) = self.by_depth.get(&c.round) {
                for (w, s) in c.states.iter().enumerate() {
                    out[w] |= set.contains(s);
                }
            }
        }
        Ok(out)
    }

    /// The rendered disjuncts, in emission order.
    pub fn to_disjunction(&self) -> Result<Disjunction, TypeError> {
        let formulas = self.types.iter().map(|&id| render_type(&self.table, id)).collect::<Result<Vec<_>, _>>()?;
        Ok(Disjunction::finite(formulas))
    }
}

/// The full types of depth at most `max_depth` and degree at most
/// `max_degree` whose tree models `a` accepts by the round equal to their
/// depth (and within `max_rounds`).
pub fn automaton_to_disjunction<A: Automaton>(
    a: &A,
    table: &Arc<TypeTable>,
    budgets: &Budgets,
) -> Result<TypeDisjunction, TranslateError> {
    a.vocabulary().ensure_same(table.vocabulary())?;
    let mut types = Vec::new();
    let mut marker = BudgetHit::DEPTH;
    'depths: for n in 0..=budgets.max_depth {
        let run = RunBudget { max_rounds: n.min(budgets.max_rounds), max_steps: budgets.max_steps };
        if n > budgets.max_rounds {
            marker = marker.union(BudgetHit::ROUNDS);
        }
        for e in enumerate_full_types(table, n, budgets.max_degree) {
            match e {
                Emit::Item(id) => {
                    let pm = tree_model_of_type(table, id)?;
                    if accepting_rounds(a, pm.model(), run)?[pm.position()].is_some() {
                        if budgets.max_items.is_some_and(|m| types.len() >= m) {
                            marker = marker.union(BudgetHit::ITEMS);
                            break 'depths;
                        }
                        types.push(id);
                    }
                }
                Emit::BudgetReached(b) => marker = marker.union(b),
            }
        }
    }
    Ok(TypeDisjunction::new(table.clone(), types, Some(marker))?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub model: usize,
    pub node: NodeId,
    pub formula: bool,
    pub automaton: bool,
    pub disjunction: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub formula: String,
    pub models: usize,
    pub points: usize,
    pub agreements: usize,
    /// The first disagreements found, at most [`RoundtripReport::MAX_WITNESSES`].
    pub disagreements: Vec<Disagreement>,
    pub disagreement_count: usize,
    pub disjuncts: usize,
    pub disjunction_marker: Option<BudgetHit>,
}

impl RoundtripReport {
    pub const MAX_WITNESSES: usize = 20;

    pub fn all_agree(&self) -> bool {
        self.disagreement_count == 0
    }
}

/// Compares `φ`, the automaton translated from `{φ}`, and the type
/// disjunction read back from that automaton on every point of `models`.
pub fn roundtrip_check(
    table: &Arc<TypeTable>,
    phi: &Formula,
    models: impl IntoIterator<Item = KripkeModel>,
    budgets: &Budgets,
) -> Result<RoundtripReport, TranslateError> {
    let automaton = disjunction_to_automaton(table, &Disjunction::finite([phi.clone()]), budgets.max_degree)?;
    let back = automaton_to_disjunction(&automaton, table, budgets)?;
    let mut report = RoundtripReport {
        formula: phi.to_string(),
        models: 0,
        points: 0,
        agreements: 0,
        disagreements: Vec::new(),
        disagreement_count: 0,
        disjuncts: back.types().len(),
        disjunction_marker: back.marker(),
    };
    for (i, m) in models.into_iter().enumerate() {
        let truth = satisfying_positions(&m, phi)?;
        let accepted = accepting_rounds(&automaton, &m, budgets.run_budget())?;
        let disj = back.holds_everywhere(&m)?;
        report.models += 1;
        for w in 0..m.size() {
            report.points += 1;
            let row = (truth[w], accepted[w].is_some(), disj[w]);
            if row.0 == row.1 && row.1 == row.2 {
                report.agreements += 1;
            } else {
                report.disagreement_count += 1;
                if report.disagreements.len() < RoundtripReport::MAX_WITNESSES {
                    report.disagreements.push(Disagreement {
                        model: i,
                        node: m.node_at(w),
                        formula: row.0,
                        automaton: row.1,
                        disjunction: row.2,
                    });
                }
            }
        }
    }
    Ok(report)
}
