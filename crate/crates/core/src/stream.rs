//! Deterministic, budgeted enumeration.
//!
//! Recursively enumerable sets (disjunct sets, accepting sets, sets of types)
//! are realized as finite prefixes. A stream that stops because a budget was
//! hit says so with a trailing [`Emit::BudgetReached`] marker; a stream that
//! simply ends is complete.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::Serialize;

/// Which budgets cut a stream short.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BudgetHit {
    pub items: bool,
    pub depth: bool,
    pub degree: bool,
    pub rounds: bool,
    pub steps: bool,
}

impl BudgetHit {
    pub const DEGREE: BudgetHit = BudgetHit { items: false, depth: false, degree: true, rounds: false, steps: false };
    pub const ITEMS: BudgetHit = BudgetHit { items: true, depth: false, degree: false, rounds: false, steps: false };
    pub const DEPTH: BudgetHit = BudgetHit { items: false, depth: true, degree: false, rounds: false, steps: false };
    pub const ROUNDS: BudgetHit = BudgetHit { items: false, depth: false, degree: false, rounds: true, steps: false };

    pub fn any(&self) -> bool {
        self.items || self.depth || self.degree || self.rounds || self.steps
    }

    pub fn union(self, other: BudgetHit) -> BudgetHit {
        BudgetHit {
            items: self.items || other.items,
            depth: self.depth || other.depth,
            degree: self.degree || other.degree,
            rounds: self.rounds || other.rounds,
            steps: self.steps || other.steps,
        }
    }
}

impl fmt::Display for BudgetHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.items, "items"),
            (self.depth, "depth"),
            (self.degree, "degree"),
            (self.rounds, "rounds"),
            (self.steps, "steps"),
        ];
        let hit: Vec<&str> = names.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect();
        write!(f, "{}", hit.join(","))
    }
}

impl std::str::FromStr for BudgetHit {
    type Err = String;

    /// The comma-separated form written by `Display`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut hit = BudgetHit::default();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "items" => hit.items = true,
                "depth" => hit.depth = true,
                "degree" => hit.degree = true,
                "rounds" => hit.rounds = true,
                "steps" => hit.steps = true,
                other => return Err(format!("unknown budget '{other}'")),
            }
        }
        Ok(hit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emit<T> {
    Item(T),
    BudgetReached(BudgetHit),
}

/// A duplicate-free stream with an optional item budget. Markers coming from
/// the source are merged into one final marker.
pub struct BudgetedEnumerator<T> {
    source: Box<dyn Iterator<Item = Emit<T>> + Send>,
    max_items: Option<usize>,
    emitted: usize,
    seen: HashSet<T>,
    pending: BudgetHit,
    lookahead: Option<T>,
    done: bool,
}

impl<T: Clone + Eq + Hash + Send + 'static> BudgetedEnumerator<T> {
    pub fn new(source: impl Iterator<Item = Emit<T>> + Send + 'static) -> Self {
        BudgetedEnumerator {
            source: Box::new(source),
            max_items: None,
            emitted: 0,
            seen: HashSet::new(),
            pending: BudgetHit::default(),
            lookahead: None,
            done: false,
        }
    }

    /// A stream over `items` that ends with `marker` if one is given.
    pub fn from_items(items: impl IntoIterator<Item = T, IntoIter: Send + 'static>, marker: Option<BudgetHit>) -> Self {
        Self::new(items.into_iter().map(Emit::Item).chain(marker.map(Emit::BudgetReached)))
    }

    pub fn empty() -> Self {
        Self::from_items(Vec::new(), None)
    }

    pub fn with_max_items(mut self, max: Option<usize>) -> Self {
        self.max_items = max;
        self
    }

    /// Keeps only items satisfying `keep`; markers pass through.
    pub fn filter_items(self, mut keep: impl FnMut(&T) -> bool + Send + 'static) -> Self {
        Self::new(self.filter(move |e| match e {
            Emit::Item(t) => keep(t),
            Emit::BudgetReached(_) => true,
        }))
    }

    /// Drains the stream into its items and final marker.
    pub fn into_parts(self) -> (Vec<T>, Option<BudgetHit>) {
        let mut items = Vec::new();
        let mut marker = None;
        for e in self {
            match e {
                Emit::Item(t) => items.push(t),
                Emit::BudgetReached(b) => marker = Some(b),
            }
        }
        (items, marker)
    }

    fn next_new(&mut self) -> Option<T> {
        if let Some(t) = self.lookahead.take() {
            return Some(t);
        }
        for e in self.source.by_ref() {
            match e {
                Emit::Item(t) => {
                    if self.seen.insert(t.clone()) {
                        return Some(t);
                    }
                }
                Emit::BudgetReached(b) => self.pending = self.pending.union(b),
            }
        }
        None
    }
}

impl<T: Clone + Eq + Hash + Send + 'static> Iterator for BudgetedEnumerator<T> {
    type Item = Emit<T>;

    fn next(&mut self) -> Option<Emit<T>> {
        if self.done {
            return None;
        }
        let next = self.next_new();
        let over = self.max_items.is_some_and(|m| self.emitted >= m);
        match next {
            Some(t) if !over => {
                self.emitted += 1;
                Some(Emit::Item(t))
            }
            Some(t) => {
                self.lookahead = Some(t);
                self.done = true;
                Some(Emit::BudgetReached(self.pending.union(BudgetHit::ITEMS)))
            }
            None => {
                self.done = true;
                self.pending.any().then_some(Emit::BudgetReached(self.pending))
            }
        }
    }
}

/// Dovetails a (possibly infinite) sequence of streams: diagonal `s` opens
/// stream `s` and takes one emission from each open stream `i ≤ s`, in order,
/// so the `j`-th item of stream `i` comes out on diagonal `i + j`.
pub fn diagonal<T: Clone + Eq + Hash + Send + 'static>(
    streams: impl Iterator<Item = BudgetedEnumerator<T>> + Send + 'static,
) -> BudgetedEnumerator<T> {
    BudgetedEnumerator::new(Diagonal { outer: Box::new(streams), outer_done: false, open: Vec::new(), queue: VecDeque::new() })
}

struct Diagonal<T> {
    outer: Box<dyn Iterator<Item = BudgetedEnumerator<T>> + Send>,
    outer_done: bool,
    open: Vec<Option<BudgetedEnumerator<T>>>,
    queue: VecDeque<Emit<T>>,
}

impl<T: Clone + Eq + Hash + Send + 'static> Diagonal<T> {
    fn advance(&mut self) -> bool {
        if !self.outer_done {
            match self.outer.next() {
                Some(s) => self.open.push(Some(s)),
                None => self.outer_done = true,
            }
        }
        let mut live = false;
        for slot in &mut self.open {
            if let Some(s) = slot {
                match s.next() {
                    Some(e) => {
                        live = true;
                        self.queue.push_back(e);
                    }
                    None => *slot = None,
                }
            }
        }
        live || !self.outer_done
    }
}

impl<T: Clone + Eq + Hash + Send + 'static> Iterator for Diagonal<T> {
    type Item = Emit<T>;

    fn next(&mut self) -> Option<Emit<T>> {
        loop {
            if let Some(e) = self.queue.pop_front() {
                return Some(e);
            }
            if !self.advance() && self.queue.is_empty() {
                return None;
            }
        }
    }
}
