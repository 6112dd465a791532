//! Test grids of small models: exhaustive enumeration up to size and degree
//! caps, or a seeded random sample.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{KripkeModel, Vocabulary};

pub const EXHAUSTIVE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("the exhaustive grid has {count} models, above the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },
    #[error("a grid needs at least one node and one channel")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    Exhaustive,
    Random { count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub max_nodes: usize,
    /// Per channel and node.
    pub max_degree: usize,
    pub channels: u32,
    /// Propositions `p0 … p(props-1)`.
    pub props: u32,
    pub seed: u64,
    pub mode: GridMode,
}

impl GridSpec {
    pub fn exhaustive(max_nodes: usize, max_degree: usize, channels: u32, props: u32) -> Self {
        GridSpec { max_nodes, max_degree, channels, props, seed: 0, mode: GridMode::Exhaustive }
    }

    pub fn random(max_nodes: usize, max_degree: usize, channels: u32, props: u32, seed: u64, count: usize) -> Self {
        GridSpec { max_nodes, max_degree, channels, props, seed, mode: GridMode::Random { count } }
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::new(0..self.props, self.channels).expect("channels checked")
    }

    /// Number of models in the exhaustive grid, saturating.
    pub fn exhaustive_count(&self) -> u128 {
        (1..=self.max_nodes)
            .map(|n| {
                let subsets = subsets_up_to(n, self.max_degree).len() as u128;
                let slots = (n as u32).saturating_mul(self.channels);
                let valuations = 2u128.checked_pow((n as u32).saturating_mul(self.props)).unwrap_or(u128::MAX);
                subsets.checked_pow(slots).and_then(|s| s.checked_mul(valuations)).unwrap_or(u128::MAX)
            })
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    pub fn models(&self) -> Result<Box<dyn Iterator<Item = KripkeModel> + Send>, GridError> {
        if self.max_nodes == 0 || self.channels == 0 {
            return Err(GridError::Empty);
        }
        match self.mode {
            GridMode::Exhaustive => {
                let count = self.exhaustive_count();
                if count > EXHAUSTIVE_CAP {
                    return Err(GridError::TooLarge { count, cap: EXHAUSTIVE_CAP });
                }
                let spec = *self;
                Ok(Box::new((1..=spec.max_nodes).flat_map(move |n| Exhaustive::new(spec, n))))
            }
            GridMode::Random { count } => {
                let spec = *self;
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                Ok(Box::new((0..count).map(move |_| random_model(&spec, &mut rng))))
            }
        }
    }
}

/// Subsets of `0..n` with at most `k` elements, by size then lexicographically.
fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&x| x + 1);
            for x in start..n as u32 {
                let mut t = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// All models on nodes `0..n`, odometer order: the valuation varies fastest,
/// then successor sets from the last (node, channel) slot backwards.
struct Exhaustive {
    spec: GridSpec,
    n: usize,
    subsets: Vec<Vec<u32>>,
    slots: Vec<usize>,
    valuation: u64,
    done: bool,
}

impl Exhaustive {
    fn new(spec: GridSpec, n: usize) -> Self {
        let slots = vec![0; n * spec.channels as usize];
        Exhaustive { spec, n, subsets: subsets_up_to(n, spec.max_degree), slots, valuation: 0, done: false }
    }

    fn build(&self) -> KripkeModel {
        let a = self.spec.channels as usize;
        let mut b = KripkeModel::builder(self.spec.vocabulary()).nodes(0..self.n as u32);
        for (slot, &s) in self.slots.iter().enumerate() {
            let (u, c) = (slot / a, slot % a);
            for &v in &self.subsets[s] {
                b = b.edge(c as u32 + 1, u as u32, v);
            }
        }
        let props = self.spec.props as usize;
        for bit in 0..self.n * props {
            if self.valuation >> bit & 1 == 1 {
                b = b.truth((bit % props) as u32, (bit / props) as u32);
            }
        }
        b.build().expect("grid models are well-formed")
    }

    fn advance(&mut self) {
        let bits = self.n * self.spec.props as usize;
        self.valuation += 1;
        if self.valuation < 1 << bits {
            return;
        }
        self.valuation = 0;
        for d in self.slots.iter_mut().rev() {
            *d += 1;
            if *d < self.subsets.len() {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

impl Iterator for Exhaustive {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        if self.done {
            return None;
        }
        let m = self.build();
        self.advance();
        Some(m)
    }
}

fn random_model(spec: &GridSpec, rng: &mut ChaCha8Rng) -> KripkeModel {
    let n = rng.gen_range(1..=spec.max_nodes);
    let mut b = KripkeModel::builder(spec.vocabulary()).nodes(0..n as u32);
    let targets: Vec<u32> = (0..n as u32).collect();
    for u in 0..n as u32 {
        for c in 1..=spec.channels {
            let k = rng.gen_range(0..=spec.max_degree.min(n));
            for &v in targets.choose_multiple(rng, k) {
                b = b.edge(c, u, v);
            }
        }
        for p in 0..spec.props {
            if rng.gen_bool(0.5) {
                b = b.truth(p, u);
            }
        }
    }
    b.build().expect("random models are well-formed")
}

/// A simple undirected `d`-regular graph on `n` nodes over one channel without
/// propositions, drawn by the pairing method. `None` if `n·d` is odd or no
/// simple pairing turns up within a fixed number of attempts.
pub fn random_regular_graph(n: usize, d: usize, rng: &mut impl Rng) -> Option<KripkeModel> {
    if n * d % 2 == 1 || d >= n.max(1) {
        return None;
    }
    'attempt: for _ in 0..1000 {
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|u| std::iter::repeat_n(u, d)).collect();
        stubs.shuffle(rng);
        let mut edges = std::collections::BTreeSet::new();
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !edges.insert((u, v)) {
                continue 'attempt;
            }
        }
        let mut b = KripkeModel::builder(Vocabulary::new([], 1).unwrap()).nodes(0..n as u32);
        for (u, v) in edges {
            b = b.edge(1, u, v).edge(1, v, u);
        }
        return Some(b.build().unwrap());
    }
    None
}
