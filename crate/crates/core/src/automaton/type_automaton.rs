use std::sync::Arc;

use super::{AcceptingSet, Automaton};
use crate::kripke::{Multiset, Vocabulary};
use crate::types::{ChannelProfile, ChildEntry, Count, TypeError, TypeId, TypeNode, TypeTable};

/// The counting type automaton: states are full types, `π(Π′)` is the atom
/// profile, and `δ` records the exact multiset of successor types per channel.
///
/// In round `n` the state at `(M, w)` is the full type of depth `n`.
#[derive(Debug, Clone)]
pub struct TypeAutomaton {
    table: Arc<TypeTable>,
    accepting: AcceptingSet<TypeId>,
}

impl TypeAutomaton {
    pub fn new(table: Arc<TypeTable>, accepting: AcceptingSet<TypeId>) -> Self {
        TypeAutomaton { table, accepting }
    }

    pub fn table(&self) -> &Arc<TypeTable> {
        &self.table
    }
}

impl Automaton for TypeAutomaton {
    type State = TypeId;

    fn vocabulary(&self) -> &Vocabulary {
        self.table.vocabulary()
    }

    fn initial(&self, atoms: &[u32]) -> Result<TypeId, String> {
        self.table.atomic(atoms).map_err(|e| e.to_string())
    }

    /// Inputs whose children are not one level below `previous` are errors.
    fn transition(&self, incoming: &[Multiset<TypeId>], previous: &TypeId) -> Result<TypeId, TypeError> {
        let prev = self.table.node(*previous)?;
        let mut channels = Vec::with_capacity(incoming.len());
        for n_alpha in incoming {
            let mut entries = Vec::new();
            for (&child, count) in n_alpha.iter() {
                let depth = self.table.depth(child)?;
                if depth != prev.depth {
                    return Err(TypeError::DepthMismatch { expected: prev.depth, found: depth });
                }
                entries.push(ChildEntry { child, count: Count::Exactly(count) });
            }
            channels.push(ChannelProfile { total: Some(n_alpha.len()), entries });
        }
        self.table.intern(TypeNode { depth: prev.depth + 1, atoms: prev.atoms.clone(), channels })
    }

    fn accepting(&self) -> &AcceptingSet<TypeId> {
        &self.accepting
    }
}
