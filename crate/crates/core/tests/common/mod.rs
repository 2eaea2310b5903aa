#![allow(dead_code)]

use stabring::group::{load_group, FiniteGroup, GroupSpec};

/// (name, n_max, p_max) for each group of the test battery.
pub const BATTERY: &[(&str, usize, usize)] = &[
    ("trivial", 4, 3),
    ("z2", 4, 3),
    ("z3", 4, 3),
    ("z4", 4, 3),
    ("klein", 4, 3),
    ("s3", 3, 2),
];

/// Schur multipliers worked out by hand from Hopf's formula
/// `H_2 = (R cap [F,F]) / [F,R]` on small presentations.
pub const HOPF_FIXTURES: &[(&str, &str, &[u64])] = &[
    ("trivial", "< | >", &[]),
    ("z2", "<x | x^2>", &[]),
    ("z3", "<x | x^3>", &[]),
    ("z4", "<x | x^4>", &[]),
    ("klein", "<x, y | x^2, y^2, [x,y]>", &[2]),
    ("s3", "<x, y | x^2, y^3, (xy)^2>", &[]),
    ("d4", "<x, y | x^4, y^2, (xy)^2>", &[2]),
    ("q8", "<x, y | x^4, x^2 y^-2, y^-1 x y x>", &[]),
];

pub fn group(name: &str) -> FiniteGroup {
    load_group(&GroupSpec::named(name).expect("known name")).expect("loads")
}
