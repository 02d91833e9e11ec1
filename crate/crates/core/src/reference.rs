//! Tabulated reference values for `n = 1` used by the reproduction
//! command and the acceptance tests.

use num_complex::Complex;

/// Leading coefficients of `E_m(q) / pi^2` as `(m, [...])`.
///
/// The last row starts at `241/3 = 9^2 - 2/3` and therefore belongs to
/// `m = 7`; the listing labels it `E_5`.
pub const SERIES: &[(usize, &[&str])] = &[
    (
        0,
        &["10/3", "80/3", "1360/27", "20800/243", "195920/2187", "3174880/19683", "684960/59049"],
    ),
    (
        2,
        &[
            "46/3",
            "272/15",
            "198928/3375",
            "55403584/759375",
            "4307155408/34171875",
            "2879355070048/38443359375",
        ],
    ),
    (
        4,
        &["106/3", "592/35", "2279248/42875", "3773733184/52521875", "1634762851088/12867859375"],
    ),
    (
        1,
        &["25/3", "20", "65", "115/2", "2165/16", "3165/32", "23965/128", "38755/256"],
    ),
    (
        3,
        &["73/3", "52/3", "1493/27", "35671/486", "4492153/34992", "55853449/629856", "1646085467/7558272"],
    ),
    (
        7,
        &[
            "241/3",
            "82/5",
            "50339/1000",
            "13640101/200000",
            "3872868499/32000000",
            "3267409458867/32000000000",
        ],
    ),
];

/// Listed label of each [`SERIES`] row (`E_5` for the `m = 7` row).
pub fn series_label(m: usize) -> usize {
    if m == 7 {
        5
    } else {
        m
    }
}

/// The `q^12` entry of `E_0` whose printed value is suspect.
pub const E0_Q12: &str = "684960/59049";

/// `(m, radius)` of the inferred convergence radii.
pub const RADII: &[(usize, f64)] = &[(0, 0.749), (2, 0.749), (4, 0.875), (1, 0.838), (3, 0.838), (5, 0.906)];

/// Roots of the branching conditions with periodic sheet index.
pub const PERIODIC_POINTS: &[(f64, f64)] = &[
    (0.0, 0.328106),
    (0.258666, 0.697448),
    (0.510303, 0.546057),
    (0.746852, 0.452463),
    (0.224582, 0.842777),
    (0.552288, 0.677536),
    (0.314813, 0.821858),
    (0.686317, 0.559106),
];

/// Roots of the branching conditions with anti-periodic sheet index.
pub const ANTIPERIODIC_POINTS: &[(f64, f64)] = &[
    (0.281417, 0.534362),
    (0.655163, 0.503275),
    (0.264829, 0.792687),
    (0.535905, 0.640487),
    (0.807197, 0.405705),
];

/// Roots that are coincidences `2 eta_1 = -e_i`, as `(q, i)`.
pub const COINCIDENCES: &[((f64, f64), u8)] = &[
    ((0.0, 0.328106), 1),
    ((0.510303, 0.546057), 1),
    ((0.746852, 0.452463), 1),
    ((0.281417, 0.534362), 2),
    ((0.655163, 0.503275), 2),
    ((0.264829, 0.792687), 3),
    ((0.807197, 0.405705), 2),
];

/// Cycle anchors with the indices continued around them and the
/// resulting permutation `E_from => E_to`.
pub const PERMUTATIONS: &[((f64, f64), [(usize, usize); 4])] = &[
    ((0.258666, 0.697448), [(0, 2), (2, 0), (4, 4), (6, 6)]),
    ((0.224582, 0.842777), [(0, 4), (2, 2), (4, 0), (6, 6)]),
    ((0.552288, 0.677536), [(0, 4), (2, 2), (4, 0), (6, 6)]),
    ((0.314813, 0.821858), [(0, 4), (2, 2), (4, 0), (6, 6)]),
    ((0.686317, 0.559106), [(0, 0), (2, 4), (4, 2), (6, 6)]),
    ((0.535905, 0.640487), [(1, 3), (3, 1), (5, 5), (7, 7)]),
];

/// Nearest branch points and the series whose radius they should set, as
/// `(q, |q|, [m...])`.
pub const NEAREST_BRANCHES: &[((f64, f64), f64, &[usize])] = &[
    ((0.258666, 0.697448), 0.743869, &[0, 2]),
    ((0.224582, 0.842777), 0.872187, &[4]),
    ((0.535905, 0.640487), 0.835115, &[1, 3]),
];

pub fn c(p: (f64, f64)) -> Complex<f64> {
    Complex::new(p.0, p.1)
}
