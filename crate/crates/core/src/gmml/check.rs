use std::collections::HashMap;
use std::rc::Rc;

use super::Formula;
use crate::kripke::{KripkeModel, ModelError, PointedModel};

/// `(M, w) ⊨ φ`.
pub fn check(pm: &PointedModel, formula: &Formula) -> Result<bool, ModelError> {
    Ok(satisfying_positions(pm.model(), formula)?[pm.position()])
}

/// Truth of `formula` at every node, indexed by position.
///
/// Evaluation is bottom-up over the whole domain and memoised per structurally
/// distinct subformula, so repeated subterms (as produced by rendered types)
/// are evaluated once.
pub fn satisfying_positions(model: &KripkeModel, formula: &Formula) -> Result<Vec<bool>, ModelError> {
    formula.check_vocabulary(model.vocabulary())?;
    let mut memo = HashMap::new();
    Ok(eval(model, formula, &mut memo).as_ref().clone())
}

fn eval<'f>(model: &KripkeModel, f: &'f Formula, memo: &mut HashMap<&'f Formula, Rc<Vec<bool>>>) -> Rc<Vec<bool>> {
    if let Some(hit) = memo.get(f) {
        return hit.clone();
    }
    let n = model.size();
    let out: Vec<bool> = match f {
        Formula::Top => vec![true; n],
        Formula::Prop(p) => (0..n).map(|w| model.atoms_at(w).binary_search(p).is_ok()).collect(),
        Formula::Not(g) => eval(model, g, memo).iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let (a, b) = (eval(model, a, memo), eval(model, b, memo));
            a.iter().zip(b.iter()).map(|(x, y)| *x && *y).collect()
        }
        Formula::Diamond { channel, count, body } => {
            let inner = eval(model, body, memo);
            (0..n).map(|w| model.successors_at(w, *channel).iter().filter(|&&v| inner[v]).count() >= *count).collect()
        }
    };
    let out = Rc::new(out);
    memo.insert(f, out.clone());
    out
}

/// Outcome of [`equivalent_on`].
#[derive(Debug, Clone)]
pub enum Equivalence {
    /// No model in the stream told the formulae apart.
    Equivalent {
        checked: usize,
    },
    Counterexample(PointedModel),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

/// Compares two formulae on a stream of pointed models and stops at the first witness.
pub fn equivalent_on(
    phi: &Formula,
    psi: &Formula,
    models: impl IntoIterator<Item = PointedModel>,
) -> Result<Equivalence, ModelError> {
    let mut checked = 0;
    for pm in models {
        if check(&pm, phi)? != check(&pm, psi)? {
            return Ok(Equivalence::Counterexample(pm));
        }
        checked += 1;
    }
    Ok(Equivalence::Equivalent { checked })
}
