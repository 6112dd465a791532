use std::collections::{BTreeMap, VecDeque};

use super::{ChannelProfile, ChildEntry, Count, TypeError, TypeId, TypeNode, TypeTable};
use crate::gmml::WidthVector;
use crate::kripke::{KripkeModel, PointedModel};

/// `τ_ε` of the point: its atom profile.
pub fn type_epsilon(table: &TypeTable, pm: &PointedModel) -> Result<TypeId, TypeError> {
    table.vocabulary().ensure_same(pm.vocabulary())?;
    table.atomic(pm.model().atoms_at(pm.position()))
}

/// The type of `pm` of width `width` (outermost level first).
pub fn type_of_width(table: &TypeTable, pm: &PointedModel, width: &WidthVector) -> Result<TypeId, TypeError> {
    let vocab = table.vocabulary();
    vocab.ensure_same(pm.vocabulary())?;
    let a = vocab.channels() as usize;
    for (level, l) in width.levels().iter().enumerate() {
        if l.len() != a {
            return Err(TypeError::WidthShape { level, expected: a, found: l.len() });
        }
    }
    let model = pm.model();
    let n = width.depth();
    let dist = distances(model, pm.position(), n);

    // types[v] holds the type of depth j for every v with dist[v] + j <= n
    let mut types: Vec<Option<TypeId>> = vec![None; model.size()];
    for (v, d) in dist.iter().enumerate() {
        if d.is_some() {
            types[v] = Some(table.atomic(model.atoms_at(v))?);
        }
    }
    for j in 1..=n {
        let k = &width.levels()[n - j];
        let mut next = vec![None; model.size()];
        for (v, d) in dist.iter().enumerate() {
            if !d.is_some_and(|d| d + j <= n) {
                continue;
            }
            let mut channels = Vec::with_capacity(a);
            for (c, &kc) in k.iter().enumerate().take(a) {
                let succ = model.successors_at(v, c as u32 + 1);
                let mut counts: BTreeMap<TypeId, usize> = BTreeMap::new();
                for &u in succ {
                    *counts.entry(types[u].expect("successor within range")).or_default() += 1;
                }
                channels.push(profile(kc, succ.len(), counts));
            }
            let atoms = table.node(types[v].expect("node within range"))?.atoms.clone();
            next[v] = Some(table.intern(TypeNode { depth: j as u32, atoms, channels })?);
        }
        types = next;
    }
    Ok(types[pm.position()].expect("the point is always in range"))
}

// clauses of one channel at bound k
fn profile(k: usize, degree: usize, counts: BTreeMap<TypeId, usize>) -> ChannelProfile {
    let entries = counts
        .into_iter()
        .map(|(child, m)| ChildEntry { child, count: if m < k { Count::Exactly(m) } else { Count::AtLeast(k) } })
        .collect();
    ChannelProfile { total: (k > degree).then_some(degree), entries }
}

fn distances(model: &KripkeModel, start: usize, limit: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; model.size()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        if du == limit {
            continue;
        }
        for c in 1..=model.vocabulary().channels() {
            for &v in model.successors_at(u, c) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

/// `k_{i,α} = 1 + max{|𝒩^α(v)| : v reachable from w in at most i−1 hops}` for `i = 1..=n`.
pub fn full_type_width(pm: &PointedModel, n: usize) -> WidthVector {
    let model = pm.model();
    let a = model.vocabulary().channels();
    let levels = (1..=n)
        .map(|i| {
            let near = model.reachable_positions(pm.position(), i - 1);
            (1..=a).map(|c| 1 + near.iter().map(|&v| model.successors_at(v, c).len()).max().unwrap_or(0)).collect()
        })
        .collect();
    WidthVector::new(levels)
}

/// The full type of depth `n`: the type at [`full_type_width`].
pub fn full_type(table: &TypeTable, pm: &PointedModel, n: usize) -> Result<TypeId, TypeError> {
    let id = type_of_width(table, pm, &full_type_width(pm, n))?;
    debug_assert!(table.is_full(id).unwrap_or(false));
    Ok(id)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kripke::{NodeId, Vocabulary};
    use proptest::prelude::*;

    fn v(props: &[u32], a: u32) -> Vocabulary {
        Vocabulary::new(props.iter().copied(), a).unwrap()
    }

    fn star(leaves: u32) -> KripkeModel {
        let mut b = KripkeModel::builder(v(&[], 1)).nodes(0..=leaves);
        for l in 1..=leaves {
            b = b.edge(1, 0, l);
        }
        b.build().unwrap()
    }

    fn cycle(n: u32) -> KripkeModel {
        let mut b = KripkeModel::builder(v(&[], 1)).nodes(0..n);
        for i in 0..n {
            b = b.edge(1, i, (i + 1) % n).edge(1, (i + 1) % n, i);
        }
        b.build().unwrap()
    }

    fn at(m: &KripkeModel, w: u32) -> PointedModel {
        PointedModel::new(m.clone(), NodeId(w)).unwrap()
    }

    #[test]
    fn epsilon_types() {
        let t = TypeTable::new(v(&[0, 1], 1));
        let m = KripkeModel::builder(v(&[0, 1], 1)).nodes([0, 1]).truth(1, 0).truth(0, 1).build().unwrap();
        assert_eq!(t.node(type_epsilon(&t, &at(&m, 0)).unwrap()).unwrap().atoms, vec![1]);
        assert_eq!(t.node(type_epsilon(&t, &at(&m, 1)).unwrap()).unwrap().atoms, vec![0]);

        let empty = TypeTable::new(v(&[], 1));
        let a = type_epsilon(&empty, &at(&star(3), 0)).unwrap();
        let b = type_epsilon(&empty, &at(&cycle(4), 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(type_of_width(&empty, &at(&star(2), 1), &WidthVector::empty()).unwrap(), a);
    }

    #[test]
    fn star_thresholds_and_exact_counts() {
        let t = TypeTable::new(v(&[], 1));
        let top = t.atomic(&[]).unwrap();
        let pm = at(&star(3), 0);

        let low = t.node(type_of_width(&t, &pm, &WidthVector::new(vec![vec![2]])).unwrap()).unwrap();
        assert_eq!(
            low.channels[0],
            ChannelProfile { total: None, entries: vec![ChildEntry { child: top, count: Count::AtLeast(2) }] }
        );

        let high = type_of_width(&t, &pm, &WidthVector::new(vec![vec![5]])).unwrap();
        assert_eq!(
            t.node(high).unwrap().channels[0],
            ChannelProfile { total: Some(3), entries: vec![ChildEntry { child: top, count: Count::Exactly(3) }] }
        );
        for k in 4..9 {
            assert_eq!(type_of_width(&t, &pm, &WidthVector::new(vec![vec![k]])).unwrap(), high);
        }
        // k = |𝒩| is still a threshold
        assert!(!t.is_full(type_of_width(&t, &pm, &WidthVector::new(vec![vec![3]])).unwrap()).unwrap());
        assert_eq!(full_type(&t, &pm, 1).unwrap(), high);
    }

    #[test]
    fn zero_bound_channel_is_unconstrained() {
        let t = TypeTable::new(v(&[], 2));
        let m = KripkeModel::builder(v(&[], 2)).nodes([0, 1]).edge(1, 0, 1).edge(2, 0, 1).build().unwrap();
        let id = type_of_width(&t, &at(&m, 0), &WidthVector::new(vec![vec![0, 2]])).unwrap();
        let node = t.node(id).unwrap();
        assert_eq!(node.channels[0], ChannelProfile::default());
        assert_eq!(node.channels[1].total, Some(1));
        assert!(matches!(
            type_of_width(&t, &at(&m, 0), &WidthVector::new(vec![vec![1]])),
            Err(TypeError::WidthShape { level: 0, expected: 2, found: 1 })
        ));
    }

    #[test]
    fn two_path_full_type() {
        let t = TypeTable::new(v(&[], 1));
        let m = KripkeModel::builder(v(&[], 1)).nodes([1, 2]).edge(1, 1, 2).build().unwrap();
        let pm = at(&m, 1);
        assert_eq!(full_type_width(&pm, 1), WidthVector::new(vec![vec![2]]));
        assert_eq!(full_type(&t, &pm, 0).unwrap(), type_epsilon(&t, &pm).unwrap());
        let node = t.node(full_type(&t, &pm, 1).unwrap()).unwrap();
        let top = t.atomic(&[]).unwrap();
        assert_eq!(
            node.channels[0],
            ChannelProfile { total: Some(1), entries: vec![ChildEntry { child: top, count: Count::Exactly(1) }] }
        );
    }

    #[test]
    fn regular_cycles_share_types() {
        let t = TypeTable::new(v(&[], 1));
        let (c3, c4) = (cycle(3), cycle(4));
        for n in 0..5 {
            let id = full_type(&t, &at(&c3, 0), n).unwrap();
            for w in 0..3 {
                assert_eq!(full_type(&t, &at(&c3, w), n).unwrap(), id);
            }
            for w in 0..4 {
                assert_eq!(full_type(&t, &at(&c4, w), n).unwrap(), id);
            }
        }
    }

    #[test]
    fn repeated_construction_is_stable() {
        let m = KripkeModel::builder(v(&[0], 2))
            .nodes([0, 1, 2])
            .edge(1, 0, 1)
            .edge(2, 0, 2)
            .edge(1, 2, 0)
            .truth(0, 1)
            .build()
            .unwrap();
        let t1 = TypeTable::new(v(&[0], 2));
        let t2 = TypeTable::new(v(&[0], 2));
        for n in 0..4 {
            for w in 0..3 {
                assert_eq!(full_type(&t1, &at(&m, w), n).unwrap(), full_type(&t1, &at(&m, w), n).unwrap());
            }
        }
        // same construction order in a fresh table gives the same ids
        for n in 0..4 {
            for w in 0..3 {
                full_type(&t2, &at(&m, w), n).unwrap();
            }
        }
        assert_eq!(t1.len(), t2.len());
    }

    fn arb_model(max_nodes: u32, props: u32, channels: u32) -> impl Strategy<Value = KripkeModel> {
        (1..=max_nodes).prop_flat_map(move |n| {
            let edges = proptest::collection::vec((1..=channels, 0..n, 0..n), 0..(2 * n as usize + 2));
            let truths = proptest::collection::vec((0..props.max(1), 0..n), 0..(n as usize + 1));
            (edges, truths).prop_map(move |(edges, truths)| {
                let vocab = Vocabulary::new(0..props, channels).unwrap();
                let mut b = KripkeModel::builder(vocab).nodes(0..n);
                for (c, x, y) in edges {
                    b = b.edge(c, x, y);
                }
                if props > 0 {
                    for (p, w) in truths {
                        b = b.truth(p, w);
                    }
                }
                b.build().unwrap()
            })
        })
    }

    fn partition(ids: &[TypeId]) -> Vec<usize> {
        let mut first = std::collections::HashMap::new();
        ids.iter()
            .map(|id| {
                let next = first.len();
                *first.entry(*id).or_insert(next)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn deeper_types_refine_shallower(m in arb_model(5, 2, 2)) {
            let t = TypeTable::new(m.vocabulary().clone());
            let m = Arc::new(m);
            let size = m.size();
            let mut prev: Option<Vec<TypeId>> = None;
            let mut parts = Vec::new();
            for n in 0..=size + 1 {
                let ids: Vec<TypeId> = PointedModel::all_points(m.clone()).map(|p| full_type(&t, &p, n).unwrap()).collect();
                prop_assert!(ids.iter().all(|&id| t.is_full(id).unwrap()));
                if let Some(prev) = &prev {
                    for x in 0..size {
                        for y in 0..size {
                            if ids[x] == ids[y] {
                                prop_assert_eq!(prev[x], prev[y]);
                            }
                        }
                    }
                }
                parts.push(partition(&ids));
                prev = Some(ids);
            }
            // stable by depth |W|
            prop_assert_eq!(&parts[size], &parts[size + 1]);
        }

        #[test]
        fn larger_widths_give_full_types_too(m in arb_model(4, 1, 1), extra in 0usize..3, n in 0usize..3) {
            let t = TypeTable::new(m.vocabulary().clone());
            let m = Arc::new(m);
            for p in PointedModel::all_points(m.clone()) {
                let w = full_type_width(&p, n);
                let padded = WidthVector::new(w.levels().iter().map(|l| l.iter().map(|k| k + extra).collect()).collect());
                prop_assert_eq!(type_of_width(&t, &p, &padded).unwrap(), full_type(&t, &p, n).unwrap());
            }
        }
    }
}
