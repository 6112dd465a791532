use std::sync::Arc;

use super::{ChannelProfile, ChildEntry, Count, TypeError, TypeId, TypeNode, TypeTable};
use crate::stream::{BudgetHit, BudgetedEnumerator, Emit};

/// Every full type of depth `n` whose recorded successor counts are all at most `d`.
///
/// Types come in passes of increasing maximal degree `w = 0, 1, …, d`; pass
/// `w` emits the types whose largest count is exactly `w`, in construction
/// order (atom profile, then channel by channel, multisets in lexicographic
/// order of the previous level). For `n ≥ 1` the stream ends with a degree
/// marker, since there are full types of every degree.
pub fn enumerate_full_types(table: &Arc<TypeTable>, n: usize, d: usize) -> BudgetedEnumerator<TypeId> {
    let table = table.clone();
    let atoms = atom_profiles(table.vocabulary().props());
    if n == 0 {
        let items: Result<Vec<TypeId>, TypeError> = atoms.iter().map(|a| table.atomic(a)).collect();
        return BudgetedEnumerator::from_items(items.expect("profiles come from the vocabulary"), None);
    }
    let passes = (0..=d).flat_map(move |w| degree_pass(table.clone(), atoms.clone(), n, w));
    BudgetedEnumerator::new(passes.map(Emit::Item).chain(std::iter::once(Emit::BudgetReached(BudgetHit::DEGREE))))
}

fn atom_profiles(props: &[u32]) -> Vec<Vec<u32>> {
    (0u64..1 << props.len())
        .map(|bits| props.iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, &p)| p).collect())
        .collect()
}

/// Multisets of size at most `w` over `0..m`, as sorted (index, multiplicity) lists.
fn multisets(m: usize, w: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(start: usize, m: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(cur.clone());
        for i in start..m {
            for c in 1..=left {
                cur.push((i, c));
                go(i + 1, m, left - c, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(0, m, w, &mut Vec::new(), &mut out);
    out
}

/// Full types of `depth` with counts at most `w`, all of them.
fn level(table: &Arc<TypeTable>, atoms: &[Vec<u32>], depth: usize, w: usize) -> Vec<TypeId> {
    let mut current: Vec<TypeId> = atoms.iter().map(|a| table.atomic(a).expect("valid atoms")).collect();
    for j in 1..=depth {
        current = Product::new(table.clone(), atoms.to_vec(), current, j, w).collect();
    }
    current
}

/// Lazy mixed-radix product over atom profiles and per-channel multisets.
struct Product {
    table: Arc<TypeTable>,
    atoms: Vec<Vec<u32>>,
    children: Vec<TypeId>,
    shapes: Vec<Vec<(usize, usize)>>,
    depth: u32,
    digits: Vec<usize>,
    done: bool,
}

impl Product {
    fn new(table: Arc<TypeTable>, atoms: Vec<Vec<u32>>, children: Vec<TypeId>, depth: usize, w: usize) -> Self {
        let a = table.vocabulary().channels() as usize;
        let shapes = multisets(children.len(), w);
        Product { table, atoms, children, shapes, depth: depth as u32, digits: vec![0; a + 1], done: false }
    }

    fn current(&self) -> TypeNode {
        let channels = self.digits[1..]
            .iter()
            .map(|&s| {
                let shape = &self.shapes[s];
                ChannelProfile {
                    total: Some(shape.iter().map(|&(_, c)| c).sum()),
                    entries: shape
                        .iter()
                        .map(|&(i, c)| ChildEntry { child: self.children[i], count: Count::Exactly(c) })
                        .collect(),
                }
            })
            .collect();
        TypeNode { depth: self.depth, atoms: self.atoms[self.digits[0]].clone(), channels }
    }

    fn advance(&mut self) {
        // the last channel varies fastest
        for i in (0..self.digits.len()).rev() {
            let radix = if i == 0 { self.atoms.len() } else { self.shapes.len() };
            self.digits[i] += 1;
            if self.digits[i] < radix {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

impl Iterator for Product {
    type Item = TypeId;

    fn next(&mut self) -> Option<TypeId> {
        if self.done {
            return None;
        }
        let node = self.current();
        self.advance();
        Some(self.table.intern(node).expect("enumerated nodes are well formed"))
    }
}

/// One pass of [`enumerate_full_types`]: depth-`n` types of maximal degree exactly `w`.
fn degree_pass(table: Arc<TypeTable>, atoms: Vec<Vec<u32>>, n: usize, w: usize) -> impl Iterator<Item = TypeId> {
    let children = level(&table, &atoms, n - 1, w);
    let check = table.clone();
    Product::new(table, atoms, children, n, w).filter(move |&id| check.max_degree(id).expect("interned") == w)
}
