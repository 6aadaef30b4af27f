mod common;

use common::oracle::{components_at, height_values, radial_values, Complex};
use proptest::prelude::*;
use tdac::complexes::build_vr_filtration;
use tdac::imaging::{height_filtration, radial_filtration};
use tdac::persistence::{reduce_clearing, reduce_standard};
use tdac::{build_cubical_filtration, compute_persistence, BinaryImage, Center, Direction, GrayImage, PointCloud};

fn engine_bars(gray: &GrayImage, k: usize) -> Vec<(f64, f64)> {
    let pd = compute_persistence(&build_cubical_filtration(gray)).unwrap();
    pd.dim(k).iter().map(|b| (b.birth, b.death)).collect()
}

fn image(w: usize, h: usize) -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    prop::collection::vec(0u8..4, w * h).prop_map(move |v| (w, h, v.into_iter().map(f64::from).collect()))
}

fn any_image() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..5, 1usize..5).prop_flat_map(|(w, h)| image(w, h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cubical_diagrams_match_oracle((w, h, values) in any_image()) {
        let gray = GrayImage::new(w, h, values.clone()).unwrap();
        let oracle = Complex::cubical(w, h, &values);
        for k in 0..2 {
            prop_assert_eq!(engine_bars(&gray, k), oracle.bars(k), "H{}", k);
        }
    }

    #[test]
    fn clearing_and_standard_reduction_agree((w, h, values) in any_image()) {
        let cx = build_cubical_filtration(&GrayImage::new(w, h, values).unwrap());
        let a = reduce_standard(&cx);
        let b = reduce_clearing(&cx);
        prop_assert_eq!(a.pairs, b.pairs);
        prop_assert_eq!(a.essential, b.essential);
    }

    #[test]
    fn filtration_values_match_definitions(
        (w, h, bits) in (1usize..6, 1usize..6).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<bool>(), w * h))),
        dir in (-3i8..=3, -3i8..=3).prop_filter("nonzero", |d| *d != (0, 0)),
        c in (-1i64..6, -1i64..6),
    ) {
        let img = BinaryImage::new(w, h, bits.iter().map(|&b| u8::from(b)).collect()).unwrap();
        let v = (f64::from(dir.0), f64::from(dir.1));
        let got = height_filtration(&img, Direction::new(v.0, v.1).unwrap());
        let want = height_values(w, h, &bits, v);
        for (a, b) in got.values().iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
        let center = Center::new(c.0, c.1);
        match radial_filtration(&img, center) {
            Ok(g) => prop_assert_eq!(g.values(), &radial_values(w, h, &bits, c)[..]),
            Err(_) => prop_assert!(!center.inside(w, h)),
        }
    }

    #[test]
    fn rips_h0_counts_components(
        pts in prop::collection::vec(prop::collection::vec(-4.0f64..4.0, 2), 1..9),
        probes in prop::collection::vec(0.0f64..5.0, 5),
    ) {
        let pc = PointCloud::new(pts.clone()).unwrap();
        let pd = compute_persistence(&build_vr_filtration(&pc, 1, f64::INFINITY).unwrap()).unwrap();
        // probe random scales and every exact merge scale
        let mut eps: Vec<f64> = probes;
        for i in 0..pc.len() {
            for j in i + 1..pc.len() {
                eps.push(pc.distance(i, j) / 2.0);
            }
        }
        for e in eps {
            let alive = pd.dim(0).iter().filter(|b| b.contains(e)).count();
            prop_assert_eq!(alive, components_at(&pts, e), "eps {}", e);
        }
    }
}

#[test]
fn ring_and_blank_examples() {
    // 3x3 ring in a 5x5 image, radial from its centre
    let mut img = BinaryImage::new(5, 5, vec![0; 25]).unwrap();
    for (x, y) in [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (1, 3), (2, 3), (3, 3)] {
        img.set(x, y, true);
    }
    let gray = radial_filtration(&img, Center::new(2, 2)).unwrap();
    let oracle = Complex::cubical(5, 5, gray.values());
    assert_eq!(engine_bars(&gray, 1), oracle.bars(1));
    assert_eq!(oracle.bars(1).len(), 1);

    // all-background image: a single essential component
    let blank = height_filtration(
        &BinaryImage::new(3, 2, vec![0; 6]).unwrap(),
        Direction::new(0.0, 1.0).unwrap(),
    );
    assert_eq!(engine_bars(&blank, 0), vec![(1.0, f64::INFINITY)]);
    assert!(engine_bars(&blank, 1).is_empty());
}

#[test]
fn oracle_on_hand_examples() {
    // single pixel: one essential component, nothing else
    let c = Complex::cubical(1, 1, &[3.0]);
    assert_eq!(c.bars(0), vec![(3.0, f64::INFINITY)]);
    assert!(c.bars(1).is_empty());
    // two pixels at 0 separated by a pixel at 2 in a row: two components
    // merge at 2
    let c = Complex::cubical(3, 1, &[0.0, 2.0, 0.0]);
    assert_eq!(c.bars(0), vec![(0.0, 2.0), (0.0, f64::INFINITY)]);
    // ring of 8 pixels at 0 around a centre at 5: a loop born at 0, filled at 5
    let mut v = vec![0.0; 9];
    v[4] = 5.0;
    let c = Complex::cubical(3, 3, &v);
    assert_eq!(c.bars(1), vec![(0.0, 5.0)]);
    assert_eq!(c.bars(0), vec![(0.0, f64::INFINITY)]);
}

#[test]
fn components_by_hand() {
    let pts = vec![vec![0.0], vec![1.0], vec![3.0]];
    assert_eq!(components_at(&pts, 0.49), 3);
    assert_eq!(components_at(&pts, 0.5), 2);
    assert_eq!(components_at(&pts, 1.0), 1);
}
