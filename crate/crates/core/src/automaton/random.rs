use super::{AcceptingSet, Automaton};
use crate::kripke::{Multiset, Vocabulary};
use crate::types::TypeError;

/// A seeded pseudo-random automaton over states `0..states`.
///
/// `π` and `δ` hash their input with the seed. With `cap = Some(c)` incoming
/// multiplicities are cut off at `c` before hashing, so the automaton only
/// counts up to `c`. Accepting states are those below `states / 2`.
#[derive(Debug, Clone)]
pub struct RandomAutomaton {
    vocab: Vocabulary,
    states: u32,
    cap: Option<usize>,
    seed: u64,
    accepting: AcceptingSet<u32>,
}

impl RandomAutomaton {
    pub fn new(vocab: Vocabulary, states: u32, cap: Option<usize>, seed: u64) -> Self {
        assert!(states > 0, "an automaton needs a state");
        let half = states / 2;
        RandomAutomaton { vocab, states, cap, seed, accepting: AcceptingSet::predicate(move |&s| s < half) }
    }

    fn reduce(&self, words: impl IntoIterator<Item = u64>) -> u32 {
        let mut h = mix(self.seed);
        for w in words {
            h = mix(h ^ w);
        }
        (h % u64::from(self.states)) as u32
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Automaton for RandomAutomaton {
    type State = u32;

    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn initial(&self, atoms: &[u32]) -> Result<u32, String> {
        Ok(self.reduce(std::iter::once(u64::MAX).chain(atoms.iter().map(|&p| u64::from(p)))))
    }

    fn transition(&self, incoming: &[Multiset<u32>], previous: &u32) -> Result<u32, TypeError> {
        let mut words = vec![u64::from(*previous)];
        for (c, n) in incoming.iter().enumerate() {
            words.push(u64::MAX - c as u64);
            for (&s, k) in n.iter() {
                let k = self.cap.map_or(k, |cap| k.min(cap));
                words.push(u64::from(s) << 32 | k as u64);
            }
        }
        Ok(self.reduce(words))
    }

    fn accepting(&self) -> &AcceptingSet<u32> {
        &self.accepting
    }
}
