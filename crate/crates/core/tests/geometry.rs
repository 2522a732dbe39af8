mod common;

use std::f64::consts::PI;

use autorvo::geometry::{
    contains_origin, minkowski_sum, place_shape, shape_gap, shapes_overlap, signed_distance_origin, tangent_angles,
    CtmatShape, Disk, Pose,
};
use autorvo::math::Vec2;
use common::oracle::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BAND: f64 = 1e-6;

fn chain_shape(chain: &[Disk]) -> CtmatShape {
    CtmatShape::new(chain.to_vec(), chain[0].center).unwrap()
}

fn piece_shape(p: &[Disk; 2]) -> CtmatShape {
    chain_shape(&if p[0] == p[1] { vec![p[0]] } else { p.to_vec() })
}

fn seeded() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Vec<Disk>, Vec<Disk>) {
    let a = random_chain(rng, Vec2::ZERO);
    let offset = Vec2::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
    (a, random_chain(rng, offset))
}

#[test]
fn predicates_agree_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut checked, mut overlapping) = (0, 0);
    for _ in 0..2000 {
        let (a, b) = random_pair(&mut rng);
        let truth = chain_gap(&a, &b);
        if truth.abs() <= BAND {
            continue;
        }
        let (sa, sb) = (chain_shape(&a), chain_shape(&b));
        let expect = truth < 0.0;
        assert_eq!(shapes_overlap(&sa, &sb), expect, "{a:?} {b:?} gap {truth}");
        assert_eq!(
            contains_origin(&minkowski_sum(&sa, &sb, true)),
            expect,
            "{a:?} {b:?} gap {truth}"
        );
        assert!((shape_gap(&sa, &sb) - truth).abs() < 1e-6 || truth < 0.0);
        checked += 1;
        overlapping += usize::from(expect);
    }
    assert!(
        checked > 1900 && overlapping > 300 && checked - overlapping > 300,
        "{checked} {overlapping}"
    );
}

#[test]
fn crossing_capsules_overlap() {
    let h = chain_shape(&[Disk::from([-2.0, 0.0, 0.1]), Disk::from([2.0, 0.0, 0.1])]);
    let v = chain_shape(&[Disk::from([0.0, -2.0, 0.1]), Disk::from([0.0, 2.0, 0.1])]);
    assert!(shapes_overlap(&h, &v));
    assert!(chain_gap(h.disks(), v.disks()) < 0.0);
}

#[test]
fn capsule_plus_disk_is_inflated_capsule() {
    let capsule = [Disk::from([0.0, 0.0, 0.5]), Disk::from([3.0, 0.0, 0.5])];
    let dot = Disk::from([1.0, 2.0, 0.25]);
    let sum = minkowski_sum(&piece_shape(&capsule), &chain_shape(&[dot]), false);
    let inflated = [Disk::from([1.0, 2.0, 0.75]), Disk::from([4.0, 2.0, 0.75])];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let x = Vec2::new(rng.random_range(-1.0..6.0), rng.random_range(0.0..4.0));
        let truth = point_piece_gap(x, &inflated);
        if truth.abs() > BAND {
            assert_eq!(contains_origin(&sum.translated(-x)), truth < 0.0, "{x:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sums_contain_sums_of_points(mut rng in seeded()) {
        let p = [random_disk(&mut rng, Vec2::ZERO, 2.0), random_disk(&mut rng, Vec2::ZERO, 2.0)];
        let q = [random_disk(&mut rng, Vec2::ZERO, 2.0), random_disk(&mut rng, Vec2::ZERO, 2.0)];
        let sum = minkowski_sum(&piece_shape(&p), &piece_shape(&q), false);
        for _ in 0..40 {
            let x = point_in_piece(&mut rng, &p) + point_in_piece(&mut rng, &q);
            prop_assert!(contains_origin(&sum.translated(-x)), "{:?}", x);
        }
    }

    #[test]
    fn points_outside_sums_are_reported_outside(mut rng in seeded()) {
        let p = [random_disk(&mut rng, Vec2::ZERO, 2.0), random_disk(&mut rng, Vec2::ZERO, 2.0)];
        let q = [random_disk(&mut rng, Vec2::ZERO, 2.0), random_disk(&mut rng, Vec2::ZERO, 2.0)];
        let sum = minkowski_sum(&piece_shape(&p), &piece_shape(&q), false);
        for _ in 0..40 {
            let x = Vec2::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
            let truth = piece_gap(&p, &reflected_about(x, &q));
            if truth > BAND {
                prop_assert!(!contains_origin(&sum.translated(-x)), "{:?}", x);
            } else if truth < -BAND {
                prop_assert!(contains_origin(&sum.translated(-x)), "{:?}", x);
            }
        }
    }

    #[test]
    fn signed_distance_sign_matches_containment(mut rng in seeded()) {
        let (a, b) = random_pair(&mut rng);
        let sum = minkowski_sum(&chain_shape(&a), &chain_shape(&b), true);
        let d = signed_distance_origin(&sum);
        if d.abs() > 1e-9 {
            prop_assert_eq!(d < 0.0, contains_origin(&sum));
        }
    }

    #[test]
    fn overlap_is_symmetric(mut rng in seeded()) {
        let (a, b) = random_pair(&mut rng);
        let (sa, sb) = (chain_shape(&a), chain_shape(&b));
        prop_assert_eq!(shapes_overlap(&sa, &sb), shapes_overlap(&sb, &sa));
        prop_assert!((shape_gap(&sa, &sb) - shape_gap(&sb, &sa)).abs() < 1e-12);
    }

    #[test]
    fn tangent_interval_covers_every_centre(mut rng in seeded(), bearing in -PI..PI, dist in 4.0f64..30.0) {
        let chain = random_chain(&mut rng, Vec2::ZERO);
        let shape = chain_shape(&chain);
        let viewpoint = Vec2::from_angle(bearing) * dist;
        let interval = tangent_angles(viewpoint, &shape).unwrap();
        prop_assert!(interval.width() >= 0.0 && interval.width() < PI);
        for d in &chain {
            prop_assert!(interval.contains((d.center - viewpoint).angle()));
        }
    }

    #[test]
    fn placement_is_rigid(mut rng in seeded(), x in -50.0f64..50.0, y in -50.0f64..50.0, theta in -10.0f64..10.0) {
        let chain = random_chain(&mut rng, Vec2::ZERO);
        let shape = chain_shape(&chain);
        let placed = place_shape(&shape, Pose::new(Vec2::new(x, y), theta));
        prop_assert_eq!(placed.width(), shape.width());
        for (i, a) in chain.iter().enumerate() {
            prop_assert_eq!(placed.disks()[i].radius, a.radius);
            for (j, b) in chain.iter().enumerate() {
                let before = a.center.distance(b.center);
                let after = placed.disks()[i].center.distance(placed.disks()[j].center);
                prop_assert!((after - before).abs() <= 1e-12 * before.max(1.0));
            }
        }
    }
}
