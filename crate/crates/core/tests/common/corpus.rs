//! Hand-enumerated detection cases: name, series, expected (hour, kind).

use skewdemand_core::{detect_peaks, CandidateKind, DemandProfile};

use CandidateKind::{InteriorMax as I, LeftEndpoint as L, Plateau as P, RightEndpoint as R};

pub fn detect(values: Vec<f64>) -> Vec<(usize, CandidateKind)> {
    let p = DemandProfile::new(values, "m3/h", "corpus").unwrap();
    detect_peaks(&p).iter().map(|c| (c.hour_index, c.kind)).collect()
}

pub fn series(f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..24).map(f).collect()
}

pub type Case = (&'static str, Vec<f64>, Vec<(usize, CandidateKind)>);

pub fn corpus() -> Vec<Case> {
    let shoulder = {
        let mut v: Vec<f64> = (0..=6).map(|i| i as f64).collect();
        v.extend([5.0, 4.9, 4.85, 4.8]);
        v.extend((11..24).map(|i| 3.0 - 0.2 * (i - 11) as f64));
        v
    };
    let endpoint_and_interior = {
        let mut v = vec![10.0];
        v.extend((1..=6).map(|i| 4.0 + i as f64));
        v.extend((7..24).map(|i| 10.0 - 0.5 * (i - 6) as f64));
        v
    };
    let interior_and_endpoint: Vec<f64> = endpoint_and_interior.iter().rev().copied().collect();
    vec![
        ("single apex", series(|i| 13.0 - (i as f64 - 10.0).abs()), vec![(10, I)]),
        ("strictly increasing", series(|i| i as f64), vec![(23, R)]),
        ("strictly decreasing", series(|i| 23.0 - i as f64), vec![(0, L)]),
        ("v shape", series(|i| (i as f64 - 11.0).abs()), vec![(0, L), (23, R)]),
        (
            "two apexes",
            vec![
                0., 1., 2., 3., 4., 5., 4., 3., 2., 1., 0., 1., 2., 3., 4., 5., 6., 7., 6., 5., 4., 3., 2., 1.,
            ],
            vec![(5, I), (17, I)],
        ),
        (
            "spike then decay",
            [2.0, 5.0, 3.0]
                .into_iter()
                .chain((0..21).map(|k| 2.9 - 0.1 * k as f64))
                .collect(),
            vec![(1, I)],
        ),
        (
            "plateau of three then flat tail",
            [1.0, 4.0, 4.0, 4.0, 2.0]
                .into_iter()
                .chain(std::iter::repeat_n(1.0, 19))
                .collect(),
            vec![(2, P), (14, P)],
        ),
        ("constant", vec![7.5; 24], vec![(11, P)]),
        ("all zero", vec![0.0; 24], vec![(11, P)]),
        (
            "top plateau of two",
            series(|i| match i {
                0..=9 => i as f64 + 5.0,
                10 => 14.0,
                _ => 24.0 - i as f64,
            }),
            vec![(9, P)],
        ),
        (
            "top plateau of three",
            series(|i| match i {
                0..=9 => i as f64 + 5.0,
                10 | 11 => 14.0,
                _ => 25.0 - i as f64,
            }),
            vec![(10, P)],
        ),
        (
            "top plateau of four takes lower median",
            series(|i| match i {
                0..=8 => i as f64 + 5.0,
                9..=11 => 13.0,
                _ => 24.0 - i as f64,
            }),
            vec![(9, P)],
        ),
        (
            "plateau at the left edge",
            series(|i| if i < 2 { 10.0 } else { 10.0 - 0.4 * (i - 1) as f64 }),
            vec![(0, P)],
        ),
        (
            "plateau at the right edge",
            series(|i| if i > 21 { 10.0 } else { 10.0 - 0.4 * (22 - i) as f64 }),
            vec![(22, P)],
        ),
        ("left endpoint and apex", endpoint_and_interior, vec![(0, L), (6, I)]),
        ("apex and right endpoint", interior_and_endpoint, vec![(17, I), (23, R)]),
        (
            "valley plateau with both endpoints",
            series(|i| match i {
                0..=5 => 10.0 - i as f64,
                6 | 7 => 5.0,
                _ => i as f64 - 2.0,
            }),
            vec![(0, L), (6, P), (23, R)],
        ),
        (
            "staircase of pairs",
            series(|i| (i / 2) as f64),
            (0..12).map(|k| (2 * k, P)).collect(),
        ),
        (
            "zigzag from low",
            series(|i| (i % 2) as f64),
            (0..11).map(|k| (2 * k + 1, I)).chain([(23, R)]).collect(),
        ),
        (
            "zigzag from high",
            series(|i| ((i + 1) % 2) as f64),
            [(0, L)].into_iter().chain((1..12).map(|k| (2 * k, I))).collect(),
        ),
        ("shoulder is not a peak", shoulder, vec![(6, I)]),
        (
            "flat step inside a rise",
            series(|i| if i <= 3 { i as f64 } else { i as f64 - 1.0 }),
            vec![(3, P), (23, R)],
        ),
        (
            "tiny bump between flats",
            series(|i| if i == 12 { 1.0 + 1e-9 } else { 1.0 }),
            vec![(5, P), (12, I), (18, P)],
        ),
        (
            "repeated low pairs",
            series(|i| if i % 3 == 2 { 1.0 } else { 0.0 }),
            (0..8)
                .flat_map(|k| [(3 * k, P), (3 * k + 2, if k == 7 { R } else { I })])
                .collect(),
        ),
    ]
}
