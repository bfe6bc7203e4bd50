use proptest::prelude::*;

use qlbm_core::lattice::{
    collide_classical, equivalence_classes, mass_momentum, stream_classical, CollisionRule, LatticeDescriptor,
    OccupancyField, Pattern,
};

const NAMES: [&str; 4] = ["D1Q2", "D1Q3", "D2Q4", "D2Q5"];

fn field_strategy() -> impl Strategy<Value = OccupancyField> {
    (0usize..4, 1usize..6, 1usize..6).prop_flat_map(|(k, a, b)| {
        let d = LatticeDescriptor::build(NAMES[k]).unwrap();
        let extents = if d.dimension() == 1 { vec![a * b] } else { vec![a, b] };
        let n = extents.iter().product::<usize>() * d.num_directions();
        proptest::collection::vec(any::<bool>(), n)
            .prop_map(move |bits| OccupancyField::from_bits(&d, &extents, bits).unwrap())
    })
}

/// Streaming written directly against coordinates.
fn stream_by_coords(f: &OccupancyField) -> Vec<bool> {
    let d = f.descriptor();
    let m = d.num_directions();
    let mut out = vec![false; f.bits().len()];
    for site in 0..f.num_sites() {
        let x = f.site_coords(site);
        for j in 0..m {
            let src: Vec<i64> = x
                .iter()
                .zip(d.velocity(j))
                .map(|(&c, &v)| c as i64 - v as i64)
                .collect();
            out[site * m + j] = f.get(f.site_index(&src), j);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn streaming_matches_coordinate_oracle(f in field_strategy()) {
        prop_assert_eq!(stream_classical(&f).bits().to_vec(), stream_by_coords(&f));
    }

    #[test]
    fn streaming_conserves_mass_and_momentum(f in field_strategy()) {
        let g = stream_classical(&f);
        prop_assert_eq!(g.total_mass(), f.total_mass());
        prop_assert_eq!(g.total_momentum(), f.total_momentum());
    }

    #[test]
    fn collision_conserves_per_site(f in field_strategy()) {
        let g = collide_classical(&f, CollisionRule::SwapClass);
        for site in 0..f.num_sites() {
            prop_assert_eq!(
                mass_momentum(g.pattern(site), f.descriptor()),
                mass_momentum(f.pattern(site), f.descriptor())
            );
        }
        prop_assert_eq!(collide_classical(&f, CollisionRule::Identity), f);
    }

    #[test]
    fn swap_collision_is_an_involution(f in field_strategy()) {
        let g = collide_classical(&collide_classical(&f, CollisionRule::SwapClass), CollisionRule::SwapClass);
        prop_assert_eq!(g, f);
    }

    #[test]
    fn reversed_lattice_undoes_streaming(f in field_strategy()) {
        let g = stream_classical(&f);
        let back = OccupancyField::from_bits(&f.descriptor().reversed(), f.extents(), g.bits().to_vec()).unwrap();
        prop_assert_eq!(stream_classical(&back).bits().to_vec(), f.bits().to_vec());
    }

    #[test]
    fn d2q4_three_by_three_is_periodic(bits in proptest::collection::vec(any::<bool>(), 36)) {
        let d = LatticeDescriptor::build("D2Q4").unwrap();
        let f = OccupancyField::from_bits(&d, &[3, 3], bits).unwrap();
        let mut g = f.clone();
        for _ in 0..d.num_directions() * 3 {
            g = stream_classical(&g);
        }
        prop_assert_eq!(&g, &f);
        let mut h = f.clone();
        for _ in 0..3 {
            h = stream_classical(&h);
        }
        prop_assert_eq!(h, f);
    }
}

#[test]
fn classes_partition_patterns_by_invariants() {
    for name in NAMES {
        let d = LatticeDescriptor::build(name).unwrap();
        let table = equivalence_classes(&d);
        let mut total = 0;
        for (mm, members) in table.classes() {
            total += members.len();
            for &p in members {
                assert_eq!(&mass_momentum(p, &d), mm);
                assert_eq!(table.class_of(p), members.as_slice());
            }
        }
        assert_eq!(total, 1 << d.num_directions());
        for class in table.non_singleton() {
            assert_eq!(class.len(), 2, "{name}: only pair classes expected");
            assert_eq!(table.partner(class[0]), Some(class[1]));
            assert_eq!(table.partner(class[1]), Some(class[0]));
        }
    }
}

#[test]
fn d2q4_head_on_pairs() {
    let d = LatticeDescriptor::build("d2q4").unwrap();
    let table = equivalence_classes(&d);
    let pairs: Vec<Vec<String>> = table
        .non_singleton()
        .map(|c| c.iter().map(|p| p.to_string()).collect())
        .collect();
    assert_eq!(pairs, vec![vec!["1010".to_string(), "0101".to_string()]]);
    let p: Pattern = "1100".parse().unwrap();
    assert_eq!(table.partner(p), None);
}
