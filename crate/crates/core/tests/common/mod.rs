//! Published table rows and small helpers shared by the integration tests.
#![allow(dead_code)]

use shrinkshoot::models::FamilyKind;
use shrinkshoot::shooting::{
    default_config, solve_angenent, solve_cheng_wei, solve_mcgrath, solve_sphere, SolveReport,
    CHENG_WEI_INNER_TOL, CHENG_WEI_OUTER_TOL,
};

/// `(dimension, perimeter, entropy)` for the rotational tori.
pub const ANGENENT_TABLE: &[(u64, f64, f64)] = &[
    (2, 5.30925757, 1.85121667),
    (3, 5.27363687, 1.80277855),
    (4, 5.26292303, 1.78388334),
    (5, 5.25776364, 1.77399119),
    (10, 5.24944377, 1.75703279),
    (30, 5.24499759, 1.74754529),
    (60, 5.24399424, 1.74537297),
    (100, 5.24360376, 1.74452494),
    (300, 5.24321928, 1.74368858),
    (500, 5.24314309, 1.74352269),
    (1000, 5.24308610, 1.74339858),
    (3000, 5.24304818, 1.74331598),
    (5000, 5.24304060, 1.74329947),
    (10000, 5.24303492, 1.74328710),
    (1000000, 5.24302930, 1.74327485),
];

/// `(m, perimeter, entropy)` for the doubly rotational shrinkers.
pub const MCGRATH_TABLE: &[(u64, f64, f64)] = &[
    (2, 4.43826945, 2.46576946),
    (3, 4.44243932, 2.31878674),
    (4, 4.44299929, 2.26407546),
    (5, 4.44312496, 2.23590016),
    (10, 4.44310546, 2.18824431),
    (30, 4.44297176, 2.16189319),
    (100, 4.44291082, 2.15354529),
    (1000, 4.44288579, 2.15043689),
];

pub const CHENG_WEI_TABLE: &[(u64, f64, f64)] = &[
    (2, 8.88844927, 2.88472911),
    (3, 9.13322887, 2.80335273),
    (4, 9.20151285, 2.77142541),
    (5, 9.23377545, 2.75470243),
    (10, 9.28508471, 2.72601411),
    (100, 9.32064378, 2.70482197),
];

pub fn row(table: &[(u64, f64, f64)], dim: u64) -> (f64, f64) {
    let &(_, p, e) = table.iter().find(|r| r.0 == dim).expect("dimension is tabulated");
    (p, e)
}

pub fn angenent(n: u64) -> SolveReport {
    solve_angenent(n, &default_config(FamilyKind::Rotational(n)), 1e-10).expect("angenent solve")
}

pub fn mcgrath(m: u64) -> SolveReport {
    solve_mcgrath(m, &default_config(FamilyKind::DoublyRotational(m)), 1e-10).expect("mcgrath solve")
}

pub fn cheng_wei(n: u64) -> SolveReport {
    solve_cheng_wei(n, &default_config(FamilyKind::ChengWei(n)), CHENG_WEI_OUTER_TOL, CHENG_WEI_INNER_TOL)
        .expect("cheng-wei solve")
}

pub fn sphere(n: u64) -> SolveReport {
    solve_sphere(n, &default_config(FamilyKind::Rotational(n))).expect("sphere solve")
}
