use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{satisfying_positions, Formula};
use crate::kripke::{ModelError, PointedModel};

/// Replayable source of disjuncts: every call starts the same stream afresh.
pub type FormulaStream = Arc<dyn Fn() -> Box<dyn Iterator<Item = Formula> + Send> + Send + Sync>;

/// `⋁_{φ ∈ S} φ` with a finite, duplicate-free part and an optional enumerated tail.
#[derive(Clone, Default)]
pub struct Disjunction {
    disjuncts: Vec<Formula>,
    enumerator: Option<FormulaStream>,
}

impl fmt::Debug for Disjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Disjunction").field("disjuncts", &self.disjuncts).field("enumerated", &self.enumerator.is_some()).finish()
    }
}

impl Disjunction {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Finite disjunction; structural duplicates are dropped, first occurrence wins.
    pub fn finite(formulas: impl IntoIterator<Item = Formula>) -> Self {
        let mut seen = HashSet::new();
        let disjuncts = formulas.into_iter().filter(|f| seen.insert(f.clone())).collect();
        Disjunction { disjuncts, enumerator: None }
    }

    /// Finite part followed by the (possibly infinite) stream.
    pub fn enumerated(finite: impl IntoIterator<Item = Formula>, stream: FormulaStream) -> Self {
        Disjunction { enumerator: Some(stream), ..Self::finite(finite) }
    }

    /// `{p, ⟨α⟩≥1 p, ⟨α⟩≥1⟨α⟩≥1 p, …}`: `p` is reachable along `R_α`.
    pub fn reachability(p: u32, channel: u32) -> Self {
        let stream: FormulaStream = Arc::new(move || {
            Box::new(std::iter::successors(Some(Formula::prop(p)), move |f| Some(Formula::diamond(channel, 1, f.clone()))))
        });
        Self::enumerated([], stream)
    }

    pub fn finite_part(&self) -> &[Formula] {
        &self.disjuncts
    }

    pub fn is_finite(&self) -> bool {
        self.enumerator.is_none()
    }

    /// All disjuncts in emission order, without duplicates. Infinite when enumerated.
    pub fn iter(&self) -> impl Iterator<Item = Formula> + '_ {
        let mut seen: HashSet<Formula> = self.disjuncts.iter().cloned().collect();
        let tail = self.enumerator.as_ref().map(|e| e()).into_iter().flatten().filter(move |f| seen.insert(f.clone()));
        self.disjuncts.iter().cloned().chain(tail)
    }

    /// Owned variant of [`Disjunction::iter`].
    pub fn stream(&self) -> Box<dyn Iterator<Item = Formula> + Send> {
        let mut seen: HashSet<Formula> = self.disjuncts.iter().cloned().collect();
        let tail = self.enumerator.as_ref().map(|e| e()).into_iter().flatten().filter(move |f| seen.insert(f.clone()));
        Box::new(self.disjuncts.clone().into_iter().chain(tail))
    }
}

/// Verdict of [`check_disjunction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjunctionVerdict {
    pub holds: bool,
    /// Emission index of the first true disjunct.
    pub witness: Option<usize>,
    pub examined: usize,
    /// A `false` that only means "no witness within the budget".
    pub budget_relative: bool,
}

/// `(M, w) ⊨ ⋁ D`, examining at most `budget` disjuncts.
pub fn check_disjunction(pm: &PointedModel, d: &Disjunction, budget: usize) -> Result<DisjunctionVerdict, ModelError> {
    let mut examined = 0;
    for f in d.iter().take(budget) {
        examined += 1;
        if satisfying_positions(pm.model(), &f)?[pm.position()] {
            return Ok(DisjunctionVerdict { holds: true, witness: Some(examined - 1), examined, budget_relative: false });
        }
    }
    let budget_relative = !d.is_finite() || d.disjuncts.len() > budget;
    Ok(DisjunctionVerdict { holds: false, witness: None, examined, budget_relative })
}

/// `⋁S ∧ ⋁S′ ≡ ⋁_{φ∈S, ψ∈S′} (φ ∧ ψ)` for finite operands.
///
/// Returns `None` when either side carries an enumerator; the enumerated
/// product lives with the other enumerator combinators in `translate`.
pub fn conjoin_disjunctions(left: &Disjunction, right: &Disjunction) -> Option<Disjunction> {
    if !left.is_finite() || !right.is_finite() {
        return None;
    }
    let product = left.disjuncts.iter().flat_map(|a| right.disjuncts.iter().map(move |b| Formula::and(a.clone(), b.clone())));
    Some(Disjunction::finite(product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmml::check;
    use crate::kripke::{KripkeModel, NodeId, Vocabulary};

    fn v(props: &[u32], a: u32) -> Vocabulary {
        Vocabulary::new(props.iter().copied(), a).unwrap()
    }

    fn single(vocab: &Vocabulary, bits: u32) -> PointedModel {
        let mut b = KripkeModel::builder(vocab.clone()).node(0);
        for &p in vocab.props() {
            if bits & (1 << p) != 0 {
                b = b.truth(p, 0);
            }
        }
        PointedModel::new(b.build().unwrap(), NodeId(0)).unwrap()
    }

    #[test]
    fn finite_examples() {
        let vocab = v(&[0], 1);
        let both = Disjunction::finite([Formula::prop(0), Formula::not(Formula::prop(0))]);
        let none = Disjunction::empty();
        for bits in 0..2 {
            let pm = single(&vocab, bits);
            assert!(check_disjunction(&pm, &both, 10).unwrap().holds);
            let v = check_disjunction(&pm, &none, 10).unwrap();
            assert!(!v.holds && !v.budget_relative);
        }
    }

    #[test]
    fn duplicates_are_dropped() {
        let d = Disjunction::finite([Formula::prop(0), Formula::prop(0), Formula::Top]);
        assert_eq!(d.finite_part(), &[Formula::prop(0), Formula::Top]);
    }

    #[test]
    fn reachability_enumerator_unfolds() {
        let d = Disjunction::reachability(0, 1);
        let first: Vec<String> = d.iter().take(3).map(|f| f.to_string()).collect();
        assert_eq!(first, ["p0", "<1:1>p0", "<1:1><1:1>p0"]);

        let path = KripkeModel::builder(v(&[0], 1)).nodes([0, 1, 2]).edge(1, 0, 1).edge(1, 1, 2).truth(0, 2).build().unwrap();
        let pm = PointedModel::new(path, NodeId(0)).unwrap();
        let verdict = check_disjunction(&pm, &d, 3).unwrap();
        assert_eq!(verdict, DisjunctionVerdict { holds: true, witness: Some(2), examined: 3, budget_relative: false });
        let short = check_disjunction(&pm, &d, 2).unwrap();
        assert!(!short.holds && short.budget_relative);
    }

    // the reachability disjunction and its pointwise negation on the two witnesses
    #[test]
    fn negation_is_not_a_disjunction_witnesses() {
        let vocab = v(&[0], 1);
        let d = Disjunction::reachability(0, 1);
        let chain = KripkeModel::builder(vocab.clone()).nodes([0, 1, 2]).edge(1, 0, 1).edge(1, 1, 2).truth(0, 2).build().unwrap();
        let cycle = KripkeModel::builder(vocab).nodes([0, 1, 2]).edge(1, 0, 1).edge(1, 1, 2).edge(1, 2, 0).build().unwrap();
        let chain = PointedModel::new(chain, NodeId(0)).unwrap();
        let cycle = PointedModel::new(cycle, NodeId(0)).unwrap();
        assert!(check_disjunction(&chain, &d, 8).unwrap().holds);
        // ⋀ ¬φ over the same prefix holds on the p-free cycle
        assert!(d.iter().take(32).all(|f| !check(&cycle, &f).unwrap()));
        assert!(!check_disjunction(&cycle, &d, 32).unwrap().holds);
    }

    #[test]
    fn conjunction_products() {
        let (p0, p1, p2) = (Formula::prop(0), Formula::prop(1), Formula::prop(2));
        let prod = conjoin_disjunctions(&Disjunction::finite([p0.clone()]), &Disjunction::finite([p1.clone()])).unwrap();
        assert_eq!(prod.finite_part(), &[Formula::and(p0.clone(), p1.clone())]);

        let d1 = Disjunction::finite([p0.clone(), p1.clone()]);
        let d2 = Disjunction::finite([p2.clone()]);
        let prod = conjoin_disjunctions(&d1, &d2).unwrap();
        assert_eq!(prod.finite_part(), &[Formula::and(p0, p2.clone()), Formula::and(p1, p2)]);

        let vocab = v(&[0, 1, 2, 3], 1);
        for bits in 0..16 {
            let pm = single(&vocab, bits);
            let lhs = check_disjunction(&pm, &prod, 100).unwrap().holds;
            let rhs = check_disjunction(&pm, &d1, 100).unwrap().holds && check_disjunction(&pm, &d2, 100).unwrap().holds;
            assert_eq!(lhs, rhs, "bits {bits:04b}");
        }

        assert!(conjoin_disjunctions(&Disjunction::reachability(0, 1), &d1).is_none());
    }
}
