//! Counting multichannel message-passing automata.
//!
//! Every node starts in `π(Π′)` for its true propositions `Π′` and then, in
//! lockstep, moves to `δ(N_1, …, N_a, q)` where `N_α` is the multiset of the
//! current states of its `α`-successors. Acceptance at a point means visiting
//! an accepting state in some round.

mod accepting;
mod random;
mod table;
mod type_automaton;

use std::fmt;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

use crate::kripke::{KripkeModel, ModelError, Multiset, NodeId, PointedModel, Vocabulary};
use crate::stream::BudgetHit;
use crate::types::TypeError;

pub use accepting::{AcceptingSet, EnumeratedSet, Membership};
pub use random::RandomAutomaton;
pub use table::{parse_table_automaton, ChannelPattern, Else, Rule, TableAutomaton, TableError};
pub use type_automaton::TypeAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("transition failed at node {node}: {source}")]
    Transition { node: NodeId, source: TypeError },
    #[error("initial state undefined at node {node}: {message}")]
    Initial { node: NodeId, message: String },
}

/// `A = (Q, π, δ, F)`. States are plain values; equality is state identity.
pub trait Automaton: Send + Sync {
    type State: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static;

    fn vocabulary(&self) -> &Vocabulary;

    /// `π(Π′)` for the sorted set of true propositions.
    fn initial(&self, atoms: &[u32]) -> Result<Self::State, String>;

    /// `δ(N_1, …, N_a, q)`; `incoming[α−1]` is `N_α`.
    fn transition(&self, incoming: &[Multiset<Self::State>], previous: &Self::State) -> Result<Self::State, TypeError>;

    fn accepting(&self) -> &AcceptingSet<Self::State>;
}

/// `f_t`: the state of every node (by position) in round `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration<S> {
    pub round: usize,
    pub states: Vec<S>,
}

impl<S> Configuration<S> {
    pub fn state_at(&self, position: usize) -> &S {
        &self.states[position]
    }
}

/// `f_0`.
pub fn initial_configuration<A: Automaton>(a: &A, model: &KripkeModel) -> Result<Configuration<A::State>, AutomatonError> {
    a.vocabulary().ensure_same(model.vocabulary())?;
    let states = (0..model.size())
        .map(|w| a.initial(model.atoms_at(w)).map_err(|message| AutomatonError::Initial { node: model.node_at(w), message }))
        .collect::<Result<_, _>>()?;
    Ok(Configuration { round: 0, states })
}

/// `f_{t+1}` from `f_t`. Every node reads the round-`t` states of its successors only.
pub fn step<A: Automaton>(
    a: &A,
    model: &KripkeModel,
    c: &Configuration<A::State>,
) -> Result<Configuration<A::State>, AutomatonError> {
    a.vocabulary().ensure_same(model.vocabulary())?;
    let channels = model.vocabulary().channels();
    let states = (0..model.size())
        .map(|w| {
            let incoming: Vec<Multiset<A::State>> =
                (1..=channels).map(|ch| model.successors_at(w, ch).iter().map(|&v| c.states[v].clone()).collect()).collect();
            a.transition(&incoming, &c.states[w]).map_err(|source| AutomatonError::Transition { node: model.node_at(w), source })
        })
        .collect::<Result<_, _>>()?;
    Ok(Configuration { round: c.round + 1, states })
}

/// `f_0, …, f_rounds`.
pub fn run_all<A: Automaton>(a: &A, model: &KripkeModel, rounds: usize) -> Result<Vec<Configuration<A::State>>, AutomatonError> {
    let mut out = vec![initial_configuration(a, model)?];
    for _ in 0..rounds {
        let next = step(a, model, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// States at the point in rounds `0..=rounds`.
pub fn trace<A: Automaton>(a: &A, pm: &PointedModel, rounds: usize) -> Result<Vec<A::State>, AutomatonError> {
    Ok(run_all(a, pm.model(), rounds)?.into_iter().map(|c| c.states[pm.position()].clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunBudget {
    pub max_rounds: usize,
    /// Accepting-set items examined when `F` is enumerated.
    pub max_steps: usize,
}

impl RunBudget {
    pub fn rounds(max_rounds: usize) -> Self {
        RunBudget { max_rounds, max_steps: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Accepted { round: usize },
    NotAcceptedWithinBudget { budget: BudgetHit },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport<S> {
    pub verdict: Verdict,
    /// States at the point, from round 0 to the last round computed.
    pub trace: Vec<S>,
}

/// Runs `a` on `pm` until it accepts or the budget runs out.
///
/// With a predicate `F` every round is tested as it is computed. With an
/// enumerated `F` rounds and enumeration are dovetailed: stage `s` computes
/// round `s` (while rounds remain) and examines item `s` of `F` (while steps
/// remain), and the run accepts at the first stage where some computed state
/// occurs among the examined items.
pub fn run<A: Automaton>(a: &A, pm: &PointedModel, budget: RunBudget) -> Result<RunReport<A::State>, AutomatonError> {
    let model = pm.model();
    let w = pm.position();
    let mut config = initial_configuration(a, model)?;
    let mut trace = vec![config.states[w].clone()];
    match a.accepting() {
        AcceptingSet::Predicate(f) => {
            for t in 0..=budget.max_rounds {
                if t > 0 {
                    config = step(a, model, &config)?;
                    trace.push(config.states[w].clone());
                }
                if f(&trace[t]) {
                    return Ok(RunReport { verdict: Verdict::Accepted { round: t }, trace });
                }
            }
            Ok(RunReport { verdict: Verdict::NotAcceptedWithinBudget { budget: BudgetHit::ROUNDS }, trace })
        }
        AcceptingSet::Enumerated(set) => {
            let mut examined = 0;
            let mut stage = 0;
            loop {
                if stage > 0 && stage <= budget.max_rounds {
                    config = step(a, model, &config)?;
                    trace.push(config.states[w].clone());
                }
                if stage <= budget.max_rounds {
                    if let Some(pos) = set.position(&trace[stage]) {
                        if pos < examined {
                            return Ok(RunReport { verdict: Verdict::Accepted { round: stage }, trace });
                        }
                    }
                }
                if examined < budget.max_steps {
                    if let Some(item) = set.item(examined) {
                        examined += 1;
                        if let Some(round) = trace.iter().position(|s| *s == item) {
                            return Ok(RunReport { verdict: Verdict::Accepted { round }, trace });
                        }
                    }
                }
                stage += 1;
                let exhausted = set.is_complete_within(examined) || examined >= budget.max_steps;
                if stage > budget.max_rounds && exhausted {
                    break;
                }
            }
            let mut hit = BudgetHit::ROUNDS;
            if !set.is_complete_within(examined) {
                hit.steps = true;
            } else if let Some(marker) = set.marker() {
                hit = hit.union(marker);
            }
            Ok(RunReport { verdict: Verdict::NotAcceptedWithinBudget { budget: hit }, trace })
        }
    }
}

/// For every node at once, the earliest round `≤ max_rounds` whose state is
/// in `F`, judged against the first `max_steps` items of an enumerated `F`.
///
/// Acceptance agrees with [`run`] at each point; the reported round is the
/// earliest one, where `run` reports the round its dovetailing finds first.
pub fn accepting_rounds<A: Automaton>(
    a: &A,
    model: &KripkeModel,
    budget: RunBudget,
) -> Result<Vec<Option<usize>>, AutomatonError> {
    let mut out = vec![None; model.size()];
    let mut config = initial_configuration(a, model)?;
    for t in 0..=budget.max_rounds {
        if t > 0 {
            config = step(a, model, &config)?;
        }
        for (w, s) in config.states.iter().enumerate() {
            if out[w].is_none() && matches!(a.accepting().membership(s, budget.max_steps), Membership::Member { .. }) {
                out[w] = Some(t);
            }
        }
        if out.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(out)
}
