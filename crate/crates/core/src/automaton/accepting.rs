use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use crate::stream::{BudgetHit, BudgetedEnumerator, Emit};

/// `F`, either as a decidable predicate or as an enumeration of its members.
pub enum AcceptingSet<S> {
    Predicate(Arc<dyn Fn(&S) -> bool + Send + Sync>),
    Enumerated(Arc<EnumeratedSet<S>>),
}

impl<S> Clone for AcceptingSet<S> {
    fn clone(&self) -> Self {
        match self {
            AcceptingSet::Predicate(f) => AcceptingSet::Predicate(f.clone()),
            AcceptingSet::Enumerated(e) => AcceptingSet::Enumerated(e.clone()),
        }
    }
}

impl<S> fmt::Debug for AcceptingSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptingSet::Predicate(_) => write!(f, "AcceptingSet::Predicate"),
            AcceptingSet::Enumerated(_) => write!(f, "AcceptingSet::Enumerated"),
        }
    }
}

impl<S: Clone + Eq + Hash + Send + Sync + 'static> AcceptingSet<S> {
    pub fn predicate(f: impl Fn(&S) -> bool + Send + Sync + 'static) -> Self {
        AcceptingSet::Predicate(Arc::new(f))
    }

    pub fn all() -> Self {
        Self::predicate(|_| true)
    }

    pub fn none() -> Self {
        Self::predicate(|_| false)
    }

    /// A finite set, decided by lookup.
    pub fn finite(states: impl IntoIterator<Item = S>) -> Self {
        let set: HashSet<S> = states.into_iter().collect();
        Self::predicate(move |s| set.contains(s))
    }

    pub fn enumerated(e: BudgetedEnumerator<S>) -> Self {
        AcceptingSet::Enumerated(Arc::new(EnumeratedSet::new(e)))
    }

    /// Membership with at most `max_items` enumerated members examined.
    pub fn membership(&self, s: &S, max_items: usize) -> Membership {
        match self {
            AcceptingSet::Predicate(f) => {
                if f(s) {
                    Membership::Member { position: None }
                } else {
                    Membership::NonMember
                }
            }
            AcceptingSet::Enumerated(e) => e.membership(s, max_items),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// In `F`; for enumerated sets, at this emission index.
    Member { position: Option<usize> },
    /// Not in `F`: the enumeration ended without it.
    NonMember,
    /// Not among the first items examined.
    Unknown,
}

/// An enumerated `F` with a shared, growing cache of its prefix.
pub struct EnumeratedSet<S> {
    cache: Mutex<Cache<S>>,
}

struct Cache<S> {
    stream: BudgetedEnumerator<S>,
    items: Vec<S>,
    index: HashMap<S, usize>,
    finished: bool,
    marker: Option<BudgetHit>,
}

impl<S: Clone + Eq + Hash + Send + 'static> EnumeratedSet<S> {
    pub fn new(stream: BudgetedEnumerator<S>) -> Self {
        EnumeratedSet {
            cache: Mutex::new(Cache { stream, items: Vec::new(), index: HashMap::new(), finished: false, marker: None }),
        }
    }

    /// Item `i`, pulling the stream as needed; `None` once it has ended.
    pub fn item(&self, i: usize) -> Option<S> {
        let mut c = self.cache.lock().unwrap();
        while c.items.len() <= i && !c.finished {
            match c.stream.next() {
                Some(Emit::Item(s)) => {
                    let at = c.items.len();
                    c.index.insert(s.clone(), at);
                    c.items.push(s);
                }
                Some(Emit::BudgetReached(b)) => c.marker = Some(c.marker.unwrap_or_default().union(b)),
                None => c.finished = true,
            }
        }
        c.items.get(i).cloned()
    }

    /// Emission index of `s` if it is already cached.
    pub fn position(&self, s: &S) -> Option<usize> {
        self.cache.lock().unwrap().index.get(s).copied()
    }

    /// True when the stream has no item at index `n` or beyond.
    pub fn is_complete_within(&self, n: usize) -> bool {
        self.item(n).is_none()
    }

    /// The budget marker of a finished stream.
    pub fn marker(&self) -> Option<BudgetHit> {
        self.cache.lock().unwrap().marker
    }

    pub fn membership(&self, s: &S, max_items: usize) -> Membership {
        if max_items > 0 {
            self.item(max_items - 1);
        }
        match self.position(s) {
            Some(p) if p < max_items => Membership::Member { position: Some(p) },
            _ if self.is_complete_within(max_items) && self.marker().is_none() => Membership::NonMember,
            _ => Membership::Unknown,
        }
    }

    /// The cached prefix so far.
    pub fn prefix(&self) -> Vec<S> {
        self.cache.lock().unwrap().items.clone()
    }
}
