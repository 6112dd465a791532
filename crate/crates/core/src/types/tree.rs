use super::render::ordered_entries;
use super::{Count, TypeError, TypeId, TypeTable};
use crate::kripke::{KripkeModel, NodeId, PointedModel};

/// The tree realizing a full type: the root carries the atom profile, and for
/// every channel and child entry `=ℓ τ` it gets `ℓ` fresh subtrees realizing `τ`.
///
/// Nodes are numbered in depth-first preorder from the root `0`. Refused when
/// the tree would have more nodes than the table's size cap.
pub fn tree_model_of_type(table: &TypeTable, id: TypeId) -> Result<PointedModel, TypeError> {
    if !table.is_full(id)? {
        return Err(TypeError::NotFull);
    }
    let size = table.tree_size(id)?;
    if size > table.render_cap() {
        return Err(TypeError::SizeCap { size, cap: table.render_cap() });
    }
    let mut parts = Parts::default();
    grow(table, id, &mut parts)?;
    let model = KripkeModel::new(table.vocabulary().clone(), (0..parts.nodes).map(NodeId), parts.edges, parts.truths)?;
    Ok(PointedModel::new(model, NodeId(0))?)
}

#[derive(Default)]
struct Parts {
    nodes: u32,
    edges: Vec<(u32, NodeId, NodeId)>,
    truths: Vec<(u32, NodeId)>,
}

fn grow(table: &TypeTable, id: TypeId, parts: &mut Parts) -> Result<NodeId, TypeError> {
    let me = NodeId(parts.nodes);
    parts.nodes += 1;
    let node = table.node(id)?;
    parts.truths.extend(node.atoms.iter().map(|&p| (p, me)));
    for (c, profile) in node.channels.iter().enumerate() {
        for (entry, _) in ordered_entries(table, profile)? {
            let Count::Exactly(copies) = entry.count else {
                return Err(TypeError::NotFull);
            };
            for _ in 0..copies {
                let child = grow(table, entry.child, parts)?;
                parts.edges.push((c as u32 + 1, me, child));
            }
        }
    }
    Ok(me)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{full_type, render_type, type_of_width};
    use super::*;
    use crate::gmml::{check, WidthVector};
    use crate::kripke::Vocabulary;
    use proptest::prelude::*;

    fn v(props: &[u32], a: u32) -> Vocabulary {
        Vocabulary::new(props.iter().copied(), a).unwrap()
    }

    #[test]
    fn single_node_and_star() {
        let t = TypeTable::new(v(&[], 1));
        let top = t.atomic(&[]).unwrap();
        let pm = tree_model_of_type(&t, top).unwrap();
        assert_eq!(pm.model().size(), 1);
        assert_eq!(pm.model().edges().count(), 0);

        let m = KripkeModel::builder(v(&[], 1)).nodes([5, 6, 7]).edge(1, 5, 6).edge(1, 5, 7).build().unwrap();
        let id = full_type(&t, &PointedModel::new(m, NodeId(5)).unwrap(), 1).unwrap();
        let tree = tree_model_of_type(&t, id).unwrap();
        assert_eq!(tree.model().size(), 3);
        assert_eq!(tree.model().successors(NodeId(0), 1).unwrap().len(), 2);
        assert!(check(&tree, &render_type(&t, id).unwrap()).unwrap());
        assert_eq!(t.tree_size(id).unwrap(), 3);
    }

    #[test]
    fn non_full_types_are_refused() {
        let t = TypeTable::new(v(&[], 1));
        let m = KripkeModel::builder(v(&[], 1)).nodes([0, 1]).edge(1, 0, 1).build().unwrap();
        let id = type_of_width(&t, &PointedModel::new(m, NodeId(0)).unwrap(), &WidthVector::new(vec![vec![1]])).unwrap();
        assert!(matches!(tree_model_of_type(&t, id), Err(TypeError::NotFull)));
    }

    fn arb_model() -> impl Strategy<Value = KripkeModel> {
        (1u32..=5).prop_flat_map(|n| {
            let edges = proptest::collection::vec((1u32..=2, 0..n, 0..n), 0..9);
            let truths = proptest::collection::vec(0..n, 0..4);
            (edges, truths).prop_map(move |(edges, truths)| {
                let mut b = KripkeModel::builder(v(&[0], 2)).nodes(0..n);
                for (c, x, y) in edges {
                    b = b.edge(c, x, y);
                }
                for w in truths {
                    b = b.truth(0, w);
                }
                b.build().unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn realize_then_retype(m in arb_model(), n in 0usize..=2) {
            let t = TypeTable::new(m.vocabulary().clone());
            for pm in PointedModel::all_points(Arc::new(m)) {
                let id = full_type(&t, &pm, n).unwrap();
                let tree = tree_model_of_type(&t, id).unwrap();
                prop_assert_eq!(full_type(&t, &tree, n).unwrap(), id);
                prop_assert_eq!(tree.model().size() as u64, t.tree_size(id).unwrap());
                prop_assert!(check(&tree, &render_type(&t, id).unwrap()).unwrap());
            }
        }
    }
}
