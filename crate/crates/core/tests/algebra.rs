mod common;

use common::*;
use proptest::prelude::*;
use tempdx_core::sia::{composition_table, possible, necessary, BasicRelation, Constraint, RelationSet, SiaNetwork};

#[test]
fn converse_matches_operand_swap() {
    for b in BasicRelation::ALL {
        assert_eq!(b.converse(), converse_by_swap(b), "{b}");
    }
}

#[test]
fn composition_matches_search() {
    let table = composition_table();
    for a in BasicRelation::ALL {
        for b in BasicRelation::ALL {
            let got = RelationSet::from_bits(table[a.index()][b.index()]);
            assert_eq!(got, compose_by_search(a, b), "{a} ∘ {b}");
        }
    }
}

#[test]
fn sia_membership_matches_sampling() {
    for bits in 1u16..0x2000 {
        let r = RelationSet::from_bits(bits);
        assert_eq!(r.is_sia(), sia_by_sampling(r), "{r}");
    }
    assert_eq!(sia_sets().len(), 82);
}

fn relation_set() -> impl Strategy<Value = RelationSet> {
    (0u16..0x2000).prop_map(RelationSet::from_bits)
}

fn sia_set() -> impl Strategy<Value = RelationSet> {
    let all = sia_sets();
    (0..all.len()).prop_map(move |i| all[i])
}

proptest! {
    #[test]
    fn converse_is_an_involution(r in relation_set()) {
        prop_assert_eq!(r.converse().converse(), r);
    }

    #[test]
    fn converse_distributes_over_composition(a in relation_set(), b in relation_set()) {
        prop_assert_eq!(a.compose(b).converse(), b.converse().compose(a.converse()));
    }

    #[test]
    fn encode_decode_fixpoint(r in relation_set()) {
        match r.encode() {
            Ok(enc) => prop_assert_eq!(enc.decode(), r),
            Err(_) => prop_assert!(!r.is_sia()),
        }
    }

    #[test]
    fn minimal_labels_are_sia_and_necessary_implies_possible(
        labels in proptest::collection::vec(sia_set(), 3),
        phi in sia_set(),
    ) {
        let mut net = SiaNetwork::new();
        let ids = ["x", "y", "z"];
        let n: Vec<usize> = ids.iter().map(|id| net.add_variable(*id).unwrap()).collect();
        net.constrain(n[0], n[1], labels[0]).unwrap();
        net.constrain(n[1], n[2], labels[1]).unwrap();
        net.constrain(n[0], n[2], labels[2]).unwrap();
        if let Ok(solved) = net.solve() {
            for &i in &n {
                for &j in &n {
                    prop_assert!(solved.relation(i, j).is_sia());
                }
            }
            let q = [Constraint::new("x", "z", phi)];
            if necessary(&net, &q).unwrap() {
                prop_assert!(possible(&net, &q).unwrap());
            }
        }
    }
}
