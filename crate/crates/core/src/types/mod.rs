//! Graded multimodal types as hash-consed descriptors.
//!
//! A type of width `(𝐤_0, 𝐤_1, …)` is a conjunction: the atom profile of the
//! point, plus per channel `α` the clauses `⟨α⟩_{=ℓ} τ` (ℓ < k_α),
//! `⟨α⟩_{≥k_α} τ`, and `⟨α⟩_{=|𝒩^α(w)|} ⊤` when `k_α` exceeds the degree.
//! [`TypeNode`] stores exactly those clauses, with child types referenced by
//! [`TypeId`]. Interning gives each structurally distinct node one id, so
//! type equality is id equality. Grade-0 clauses are tautologies and are not
//! stored. The `⟨α⟩_{=0} τ` clauses for child types that do not occur are
//! implicit whenever a channel has entries but no successor count; rendering
//! spells them out as one clause `¬⟨α⟩_{≥1}(¬τ_1 ∧ … ∧ ¬τ_m)` over the
//! children that do occur.
//!
//! A *full* type records every channel exactly (a successor count plus exact
//! multiplicities for every child) all the way down; it does not depend on the
//! width it was built at.

mod build;
mod enumerate;
mod render;
mod tree;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{ModelError, Vocabulary};

pub use build::{full_type, full_type_width, type_epsilon, type_of_width};
pub use enumerate::enumerate_full_types;
pub use render::{parse_type, render_type, serialize_type};
pub use tree::tree_model_of_type;

/// Default cap on the AST size of rendered types.
pub const DEFAULT_RENDER_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("child type has depth {found}, expected {expected}")]
    DepthMismatch { expected: u32, found: u32 },
    #[error("a depth-{depth} type needs {expected} channel profiles, got {found}")]
    ChannelCount { depth: u32, expected: usize, found: usize },
    #[error("inconsistent channel profile: {0}")]
    Inconsistent(String),
    #[error("width level {level} has {found} entries, expected {expected}")]
    WidthShape { level: usize, expected: usize, found: usize },
    #[error("type is not full")]
    NotFull,
    #[error("rendered formula would have {size} nodes, above the cap of {cap}")]
    SizeCap { size: u64, cap: u64 },
    #[error("unknown type id {0}")]
    UnknownId(TypeId),
    #[error("bad type text at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// Intern id. Unique per [`TypeTable`]; never serialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeId(pub u32);

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How many successors carry a child type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    /// `⟨α⟩_{=ℓ} τ`
    Exactly(usize),
    /// `⟨α⟩_{≥k} τ`
    AtLeast(usize),
}

impl Count {
    fn value(self) -> usize {
        match self {
            Count::Exactly(n) | Count::AtLeast(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChildEntry {
    pub child: TypeId,
    pub count: Count,
}

/// Clauses of one channel. `total` is the `⟨α⟩_{=n} ⊤` clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ChannelProfile {
    pub total: Option<usize>,
    pub entries: Vec<ChildEntry>,
}

/// One interned type. `channels` is empty at depth 0 and has one profile per
/// channel otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeNode {
    pub depth: u32,
    /// True propositions; everything else in the vocabulary is false.
    pub atoms: Vec<u32>,
    pub channels: Vec<ChannelProfile>,
}

impl TypeNode {
    pub fn atomic(atoms: Vec<u32>) -> Self {
        TypeNode { depth: 0, atoms, channels: Vec::new() }
    }
}

struct Meta {
    node: Arc<TypeNode>,
    full: bool,
    max_degree: usize,
    render_size: u64,
    tree_size: u64,
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Arc<TypeNode>, TypeId>,
    entries: Vec<Meta>,
}

/// The intern table for one vocabulary. Safe to share between threads:
/// insert-or-get is atomic and descriptors never change once interned.
pub struct TypeTable {
    vocab: Vocabulary,
    inner: RwLock<Interner>,
    texts: RwLock<HashMap<TypeId, Arc<str>>>,
    render_cap: u64,
}

impl fmt::Debug for TypeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypeTable").field("vocab", &self.vocab).field("len", &self.len()).finish()
    }
}

impl TypeTable {
    pub fn new(vocab: Vocabulary) -> Self {
        TypeTable {
            vocab,
            inner: RwLock::new(Interner::default()),
            texts: RwLock::new(HashMap::new()),
            render_cap: DEFAULT_RENDER_CAP,
        }
    }

    pub fn with_render_cap(mut self, cap: u64) -> Self {
        self.render_cap = cap;
        self
    }

    pub fn shared(vocab: Vocabulary) -> Arc<Self> {
        Arc::new(Self::new(vocab))
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn render_cap(&self) -> u64 {
        self.render_cap
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Canonicalizes, validates and interns `node`.
    pub fn intern(&self, mut node: TypeNode) -> Result<TypeId, TypeError> {
        node.atoms.sort_unstable();
        node.atoms.dedup();
        for profile in &mut node.channels {
            profile.entries.retain(|e| e.count.value() > 0);
            profile.entries.sort_unstable();
        }
        {
            let inner = self.inner.read().unwrap();
            if let Some(&id) = inner.ids.get(&node) {
                return Ok(id);
            }
        }
        self.validate(&node)?;
        let mut inner = self.inner.write().unwrap();
        if let Some(&id) = inner.ids.get(&node) {
            return Ok(id);
        }
        let meta = Self::meta_for(&inner, node, self.vocab.props().len());
        let id = TypeId(u32::try_from(inner.entries.len()).expect("intern table overflow"));
        inner.ids.insert(meta.node.clone(), id);
        inner.entries.push(meta);
        Ok(id)
    }

    /// The depth-0 type with exactly `atoms` true.
    pub fn atomic(&self, atoms: &[u32]) -> Result<TypeId, TypeError> {
        self.intern(TypeNode::atomic(atoms.to_vec()))
    }

    fn validate(&self, node: &TypeNode) -> Result<(), TypeError> {
        for &p in &node.atoms {
            if !self.vocab.has_prop(p) {
                return Err(ModelError::UnknownProp(p).into());
            }
        }
        let expected = if node.depth == 0 { 0 } else { self.vocab.channels() as usize };
        if node.channels.len() != expected {
            return Err(TypeError::ChannelCount { depth: node.depth, expected, found: node.channels.len() });
        }
        let inner = self.inner.read().unwrap();
        for profile in &node.channels {
            for pair in profile.entries.windows(2) {
                if pair[0].child == pair[1].child {
                    return Err(TypeError::Inconsistent(format!("child {} listed twice", pair[0].child)));
                }
            }
            for e in &profile.entries {
                let meta = inner.entries.get(e.child.0 as usize).ok_or(TypeError::UnknownId(e.child))?;
                if meta.node.depth + 1 != node.depth {
                    return Err(TypeError::DepthMismatch { expected: node.depth - 1, found: meta.node.depth });
                }
            }
            if let Some(total) = profile.total {
                if profile.entries.iter().any(|e| matches!(e.count, Count::AtLeast(_))) {
                    return Err(TypeError::Inconsistent("threshold entry next to an exact successor count".into()));
                }
                let sum: usize = profile.entries.iter().map(|e| e.count.value()).sum();
                if sum != total {
                    return Err(TypeError::Inconsistent(format!("child counts sum to {sum}, successor count is {total}")));
                }
            }
        }
        Ok(())
    }

    fn meta_for(inner: &Interner, node: TypeNode, props: usize) -> Meta {
        let child = |id: TypeId| &inner.entries[id.0 as usize];
        let mut full = true;
        let mut max_degree = 0;
        // atom block: one literal per proposition, ⊤ when there are none
        let atom_size = if props == 0 { 1 } else { (props as u64 - 1) + props as u64 + (props - node.atoms.len()) as u64 };
        let mut conjuncts = 1u64;
        let mut size = atom_size;
        let mut tree = 1u64;
        for profile in &node.channels {
            full &= profile.total.is_some();
            let mut degree = 0;
            if profile.total.is_some() {
                conjuncts += 1;
                // ⟨α⟩≥n⊤ ∧ ¬⟨α⟩≥n+1⊤
                size = size.saturating_add(6);
            }
            for e in &profile.entries {
                let c = child(e.child);
                full &= c.full;
                max_degree = max_degree.max(c.max_degree);
                degree += e.count.value();
                conjuncts += 1;
                size = size.saturating_add(match e.count {
                    Count::Exactly(_) => 4u64.saturating_add(c.render_size.saturating_mul(2)),
                    Count::AtLeast(_) => 1u64.saturating_add(c.render_size),
                });
                tree = tree.saturating_add(c.tree_size.saturating_mul(e.count.value() as u64));
            }
            if profile.total.is_none() && !profile.entries.is_empty() {
                // ¬⟨α⟩≥1(¬τ_1 ∧ … ∧ ¬τ_m): every other child type occurs zero times
                conjuncts += 1;
                let m = profile.entries.len() as u64;
                let children = profile.entries.iter().fold(0u64, |s, e| s.saturating_add(child(e.child).render_size));
                size = size.saturating_add(children.saturating_add(2 * m + 1));
            }
            max_degree = max_degree.max(profile.total.unwrap_or(degree));
        }
        let render_size = size.saturating_add(conjuncts - 1);
        Meta { node: Arc::new(node), full, max_degree, render_size, tree_size: tree }
    }

    fn with_meta<R>(&self, id: TypeId, f: impl FnOnce(&Meta) -> R) -> Result<R, TypeError> {
        let inner = self.inner.read().unwrap();
        inner.entries.get(id.0 as usize).map(f).ok_or(TypeError::UnknownId(id))
    }

    pub fn node(&self, id: TypeId) -> Result<Arc<TypeNode>, TypeError> {
        self.with_meta(id, |m| m.node.clone())
    }

    pub fn depth(&self, id: TypeId) -> Result<u32, TypeError> {
        self.with_meta(id, |m| m.node.depth)
    }

    pub fn is_full(&self, id: TypeId) -> Result<bool, TypeError> {
        self.with_meta(id, |m| m.full)
    }

    /// Largest successor count recorded anywhere in the type.
    pub fn max_degree(&self, id: TypeId) -> Result<usize, TypeError> {
        self.with_meta(id, |m| m.max_degree)
    }

    /// AST size of [`render_type`]'s output, saturating.
    pub fn render_size(&self, id: TypeId) -> Result<u64, TypeError> {
        self.with_meta(id, |m| m.render_size)
    }

    /// Node count of [`tree_model_of_type`]'s output for a full type.
    pub fn tree_size(&self, id: TypeId) -> Result<u64, TypeError> {
        self.with_meta(id, |m| m.tree_size)
    }

    pub(crate) fn cached_text(&self, id: TypeId) -> Option<Arc<str>> {
        self.texts.read().unwrap().get(&id).cloned()
    }

    pub(crate) fn cache_text(&self, id: TypeId, text: Arc<str>) {
        self.texts.write().unwrap().insert(id, text);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(props: &[u32], a: u32) -> TypeTable {
        TypeTable::new(Vocabulary::new(props.iter().copied(), a).unwrap())
    }

    #[test]
    fn interning_is_structural() {
        let t = table(&[0, 1], 1);
        let a = t.atomic(&[1, 0]).unwrap();
        let b = t.atomic(&[0, 1, 1]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, t.atomic(&[0]).unwrap());

        let c1 = t.atomic(&[]).unwrap();
        let mk = |entries: Vec<ChildEntry>| TypeNode {
            depth: 1,
            atoms: vec![],
            channels: vec![ChannelProfile { total: Some(3), entries }],
        };
        let x = t
            .intern(mk(vec![
                ChildEntry { child: a, count: Count::Exactly(1) },
                ChildEntry { child: c1, count: Count::Exactly(2) },
            ]))
            .unwrap();
        let y = t
            .intern(mk(vec![
                ChildEntry { child: c1, count: Count::Exactly(2) },
                ChildEntry { child: a, count: Count::Exactly(1) },
            ]))
            .unwrap();
        assert_eq!(x, y);
        assert!(t.is_full(x).unwrap());
        assert_eq!(t.max_degree(x).unwrap(), 3);
        assert_eq!(t.tree_size(x).unwrap(), 4);
    }

    #[test]
    fn validation_rejects_malformed_nodes() {
        let t = table(&[0], 1);
        let top = t.atomic(&[]).unwrap();
        assert!(matches!(t.atomic(&[3]), Err(TypeError::Model(ModelError::UnknownProp(3)))));
        let bad_depth = TypeNode {
            depth: 2,
            atoms: vec![],
            channels: vec![ChannelProfile { total: Some(1), entries: vec![ChildEntry { child: top, count: Count::Exactly(1) }] }],
        };
        assert!(matches!(t.intern(bad_depth), Err(TypeError::DepthMismatch { .. })));
        let bad_sum = TypeNode {
            depth: 1,
            atoms: vec![],
            channels: vec![ChannelProfile { total: Some(2), entries: vec![ChildEntry { child: top, count: Count::Exactly(1) }] }],
        };
        assert!(matches!(t.intern(bad_sum), Err(TypeError::Inconsistent(_))));
        let no_channels = TypeNode { depth: 1, atoms: vec![], channels: vec![] };
        assert!(matches!(t.intern(no_channels), Err(TypeError::ChannelCount { .. })));
        assert!(matches!(t.node(TypeId(99)), Err(TypeError::UnknownId(_))));
    }

    #[test]
    fn concurrent_interning_assigns_one_id() {
        let t = Arc::new(table(&[0, 1, 2], 1));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let t = t.clone();
                std::thread::spawn(move || (0..8u32).map(|m| t.atomic(&[m & 1, (m >> 1) & 1, 2]).unwrap()).collect::<Vec<_>>())
            })
            .collect();
        let results: Vec<Vec<TypeId>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(t.len(), 3);
    }
}
