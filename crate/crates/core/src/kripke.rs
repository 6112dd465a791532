//! Finite multi-relational Kripke models, pointed models and multisets.
//!
//! A model carries its own [`Vocabulary`] (the proposition set and the number
//! of channels). Nodes keep their external identifiers, but every algorithm
//! in the crate works on dense positions `0..size()`, which is what the
//! `*_at` accessors expose.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("the domain of a model must be non-empty")]
    EmptyDomain,
    #[error("a vocabulary needs at least one channel")]
    NoChannels,
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("channel {channel} is outside 1..={channels}")]
    UnknownChannel { channel: u32, channels: u32 },
    #[error("proposition p{0} is not in the vocabulary")]
    UnknownProp(u32),
    #[error("vocabulary mismatch: {left} vs {right}")]
    VocabularyMismatch { left: Vocabulary, right: Vocabulary },
}

/// Node identifier as it appears in model files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The pair `(Π, I)`: a finite set of proposition indices and `I = 1..=channels`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    props: Vec<u32>,
    channels: u32,
}

impl Vocabulary {
    pub fn new(props: impl IntoIterator<Item = u32>, channels: u32) -> Result<Self, ModelError> {
        if channels == 0 {
            return Err(ModelError::NoChannels);
        }
        let props: BTreeSet<u32> = props.into_iter().collect();
        Ok(Vocabulary { props: props.into_iter().collect(), channels })
    }

    /// Sorted proposition indices.
    pub fn props(&self) -> &[u32] {
        &self.props
    }

    pub fn channels(&self) -> u32 {
        self.channels
    }

    pub fn has_prop(&self, p: u32) -> bool {
        self.props.binary_search(&p).is_ok()
    }

    pub fn check_channel(&self, channel: u32) -> Result<(), ModelError> {
        if channel == 0 || channel > self.channels {
            Err(ModelError::UnknownChannel { channel, channels: self.channels })
        } else {
            Ok(())
        }
    }

    pub fn ensure_same(&self, other: &Vocabulary) -> Result<(), ModelError> {
        if self == other {
            Ok(())
        } else {
            Err(ModelError::VocabularyMismatch { left: self.clone(), right: other.clone() })
        }
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.props.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "p{p}")?;
        }
        write!(f, "}}/{}", self.channels)
    }
}

/// `M = (W, (R_α), V)` over a [`Vocabulary`]. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    vocab: Vocabulary,
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    // succ[α - 1][pos] = sorted successor positions
    succ: Vec<Vec<Vec<usize>>>,
    // atoms[pos] = sorted true propositions
    atoms: Vec<Vec<u32>>,
}

/// Incremental construction of a [`KripkeModel`]; validation happens in [`build`](Self::build).
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    vocab: Vocabulary,
    nodes: Vec<NodeId>,
    edges: Vec<(u32, NodeId, NodeId)>,
    truths: Vec<(u32, NodeId)>,
}

impl ModelBuilder {
    pub fn node(mut self, id: u32) -> Self {
        self.nodes.push(NodeId(id));
        self
    }

    pub fn nodes(mut self, ids: impl IntoIterator<Item = u32>) -> Self {
        self.nodes.extend(ids.into_iter().map(NodeId));
        self
    }

    /// Adds `(u, v)` to `R_channel`.
    pub fn edge(mut self, channel: u32, u: u32, v: u32) -> Self {
        self.edges.push((channel, NodeId(u), NodeId(v)));
        self
    }

    /// Makes proposition `p` true at node `w`.
    pub fn truth(mut self, p: u32, w: u32) -> Self {
        self.truths.push((p, NodeId(w)));
        self
    }

    pub fn build(self) -> Result<KripkeModel, ModelError> {
        KripkeModel::new(self.vocab, self.nodes, self.edges, self.truths)
    }
}

impl KripkeModel {
    pub fn builder(vocab: Vocabulary) -> ModelBuilder {
        ModelBuilder { vocab, nodes: Vec::new(), edges: Vec::new(), truths: Vec::new() }
    }

    /// Builds a model, keeping node order as given. Duplicate edges and truths collapse.
    pub fn new(
        vocab: Vocabulary,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (u32, NodeId, NodeId)>,
        truths: impl IntoIterator<Item = (u32, NodeId)>,
    ) -> Result<Self, ModelError> {
        let nodes: Vec<NodeId> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, &n) in nodes.iter().enumerate() {
            if index.insert(n, i).is_some() {
                return Err(ModelError::DuplicateNode(n));
            }
        }
        let pos = |n: NodeId| index.get(&n).copied().ok_or(ModelError::UnknownNode(n));

        let mut succ = vec![vec![Vec::new(); nodes.len()]; vocab.channels as usize];
        for (channel, u, v) in edges {
            vocab.check_channel(channel)?;
            let (pu, pv) = (pos(u)?, pos(v)?);
            succ[channel as usize - 1][pu].push(pv);
        }
        for lists in &mut succ {
            for l in lists.iter_mut() {
                l.sort_unstable();
                l.dedup();
            }
        }

        let mut atoms = vec![Vec::new(); nodes.len()];
        for (p, w) in truths {
            if !vocab.has_prop(p) {
                return Err(ModelError::UnknownProp(p));
            }
            atoms[pos(w)?].push(p);
        }
        for a in &mut atoms {
            a.sort_unstable();
            a.dedup();
        }

        Ok(KripkeModel { vocab, nodes, index, succ, atoms })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn contains(&self, w: NodeId) -> bool {
        self.index.contains_key(&w)
    }

    pub fn position(&self, w: NodeId) -> Result<usize, ModelError> {
        self.index.get(&w).copied().ok_or(ModelError::UnknownNode(w))
    }

    pub fn node_at(&self, pos: usize) -> NodeId {
        self.nodes[pos]
    }

    /// Successor positions of the node at `pos` along `channel` (1-based).
    pub fn successors_at(&self, pos: usize, channel: u32) -> &[usize] {
        &self.succ[channel as usize - 1][pos]
    }

    /// Propositions true at the node at `pos`, sorted.
    pub fn atoms_at(&self, pos: usize) -> &[u32] {
        &self.atoms[pos]
    }

    /// `𝒩^α(w)`.
    pub fn successors(&self, w: NodeId, channel: u32) -> Result<BTreeSet<NodeId>, ModelError> {
        self.vocab.check_channel(channel)?;
        let p = self.position(w)?;
        Ok(self.successors_at(p, channel).iter().map(|&v| self.nodes[v]).collect())
    }

    pub fn true_props(&self, w: NodeId) -> Result<&[u32], ModelError> {
        Ok(self.atoms_at(self.position(w)?))
    }

    /// `V(p)`.
    pub fn valuation(&self, p: u32) -> Result<BTreeSet<NodeId>, ModelError> {
        if !self.vocab.has_prop(p) {
            return Err(ModelError::UnknownProp(p));
        }
        Ok((0..self.size()).filter(|&i| self.atoms[i].contains(&p)).map(|i| self.nodes[i]).collect())
    }

    /// `|R_α|`.
    pub fn relation_size(&self, channel: u32) -> Result<usize, ModelError> {
        self.vocab.check_channel(channel)?;
        Ok(self.succ[channel as usize - 1].iter().map(Vec::len).sum())
    }

    /// All edges as `(channel, u, v)`, ordered by channel, then source position, then target.
    pub fn edges(&self) -> impl Iterator<Item = (u32, NodeId, NodeId)> + '_ {
        self.succ.iter().enumerate().flat_map(move |(c, lists)| {
            lists
                .iter()
                .enumerate()
                .flat_map(move |(u, vs)| vs.iter().map(move |&v| (c as u32 + 1, self.nodes[u], self.nodes[v])))
        })
    }

    /// Nodes reachable from `w` in at most `steps` hops along the union of all relations.
    /// `steps = 0` gives `{w}`.
    pub fn reachable_within(&self, w: NodeId, steps: usize) -> Result<BTreeSet<NodeId>, ModelError> {
        let start = self.position(w)?;
        Ok(self.reachable_positions(start, steps).into_iter().map(|p| self.nodes[p]).collect())
    }

    pub(crate) fn reachable_positions(&self, start: usize, steps: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.size()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        let mut out = vec![start];
        while let Some(u) = queue.pop_front() {
            if dist[u] == steps {
                continue;
            }
            for lists in &self.succ {
                for &v in &lists[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        out.push(v);
                        queue.push_back(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Largest `|𝒩^α(v)|` over `v ∈ nodes`; 0 for the empty set.
    pub fn max_out_degree<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>, channel: u32) -> Result<usize, ModelError> {
        self.vocab.check_channel(channel)?;
        let mut best = 0;
        for &v in nodes {
            best = best.max(self.successors_at(self.position(v)?, channel).len());
        }
        Ok(best)
    }

    /// The same model with every relation closed under inversion.
    pub fn symmetric_closure(&self) -> KripkeModel {
        let mut out = self.clone();
        for (c, lists) in self.succ.iter().enumerate() {
            for (u, vs) in lists.iter().enumerate() {
                for &v in vs {
                    out.succ[c][v].push(u);
                }
            }
        }
        for lists in &mut out.succ {
            for l in lists.iter_mut() {
                l.sort_unstable();
                l.dedup();
            }
        }
        out
    }

    /// Renames nodes through `rename`, which must be injective.
    pub fn relabel(&self, mut rename: impl FnMut(NodeId) -> NodeId) -> Result<KripkeModel, ModelError> {
        let nodes: Vec<NodeId> = self.nodes.iter().map(|&n| rename(n)).collect();
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, &n) in nodes.iter().enumerate() {
            if index.insert(n, i).is_some() {
                return Err(ModelError::DuplicateNode(n));
            }
        }
        Ok(KripkeModel { nodes, index, ..self.clone() })
    }

    /// Dense copy whose node ids are the positions `0..size()`.
    pub fn renumbered(&self) -> KripkeModel {
        self.relabel(|n| NodeId(self.index[&n] as u32)).expect("positions are distinct")
    }
}

/// Result of [`disjoint_union`]: the union plus the renaming of each side.
#[derive(Debug, Clone)]
pub struct Union {
    pub model: KripkeModel,
    pub left: BTreeMap<NodeId, NodeId>,
    pub right: BTreeMap<NodeId, NodeId>,
}

/// `M1 ⊎ M2`. The first model's nodes become `0..|M1|` by position and the second
/// model's nodes are offset by `|M1|`.
pub fn disjoint_union(m1: &KripkeModel, m2: &KripkeModel) -> Result<Union, ModelError> {
    m1.vocab.ensure_same(&m2.vocab)?;
    let offset = m1.size();
    let left: BTreeMap<NodeId, NodeId> = m1.nodes.iter().enumerate().map(|(i, &n)| (n, NodeId(i as u32))).collect();
    let right: BTreeMap<NodeId, NodeId> = m2.nodes.iter().enumerate().map(|(i, &n)| (n, NodeId((offset + i) as u32))).collect();

    let nodes: Vec<NodeId> = (0..offset + m2.size()).map(|i| NodeId(i as u32)).collect();
    let index = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let succ = m1
        .succ
        .iter()
        .zip(&m2.succ)
        .map(|(a, b)| a.iter().cloned().chain(b.iter().map(|vs| vs.iter().map(|v| v + offset).collect())).collect())
        .collect();
    let atoms = m1.atoms.iter().chain(&m2.atoms).cloned().collect();
    let model = KripkeModel { vocab: m1.vocab.clone(), nodes, index, succ, atoms };
    Ok(Union { model, left, right })
}

/// `(M, w)`. The model is shared so that many points can reference one model cheaply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    model: Arc<KripkeModel>,
    point: NodeId,
}

impl PointedModel {
    pub fn new(model: impl Into<Arc<KripkeModel>>, point: NodeId) -> Result<Self, ModelError> {
        let model = model.into();
        model.position(point)?;
        Ok(PointedModel { model, point })
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn shared_model(&self) -> &Arc<KripkeModel> {
        &self.model
    }

    pub fn point(&self) -> NodeId {
        self.point
    }

    pub fn position(&self) -> usize {
        self.model.index[&self.point]
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.model.vocab
    }

    /// Every point of a model.
    pub fn all_points(model: Arc<KripkeModel>) -> impl Iterator<Item = PointedModel> {
        (0..model.size()).map(move |i| PointedModel { point: model.nodes[i], model: model.clone() })
    }
}

/// A finite multiset: element → positive multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, usize>,
    total: usize,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset { counts: BTreeMap::new(), total: 0 }
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: T) {
        *self.counts.entry(x).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn count(&self, x: &T) -> usize {
        self.counts.get(x).copied().unwrap_or(0)
    }

    /// `x ∈^k M`: `x` occurs at least `k` times. Always true for `k = 0`.
    pub fn contains_at_least(&self, x: &T, k: usize) -> bool {
        self.count(x) >= k
    }

    /// Number of elements counted with multiplicity.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Distinct elements with their multiplicities, in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> {
        self.counts.iter().map(|(x, &c)| (x, c))
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x);
        }
        m
    }
}
