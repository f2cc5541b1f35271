//! Independent oracles and fixtures shared by the integration suites.
//!
//! Nothing here calls the library's enumeration, index or sampling code; the
//! oracles work on plain `bool` matrices, integer counts and a dense grid.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use galimp::{ContingencyTable, FormalContext, PairTables, Quadrant, UsageMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAVIGATION: &str = include_str!("../../../../fixtures/navigation_context.csv");
pub const SYMBOLIC: &str = include_str!("../../../../fixtures/novice_symbolic.csv");
pub const NOVICE: &str = include_str!("../../../../fixtures/novice_context.csv");
pub const TERM_PAIRS: &str = include_str!("../../../../fixtures/term_pairs.csv");
pub const NUMBER_SIGN_LOG: &str = include_str!("../../../../fixtures/number_sign_log.csv");

pub const NOVICE_ORDER: [&str; 6] = [
    "The number",
    "The Sign",
    "The letters",
    "The numbers",
    "The Characters",
    "Substantive",
];

/// Published index values, `[exclusion, forward, backward, complement]`
/// per pair, in the order of `TERM_PAIRS`.
pub const PRINTED_H: [(&str, &str, [f64; 4]); 15] = [
    ("The number", "The Sign", [-2.19, 0.70, 0.45, -0.14]),
    ("The number", "The letters", [-0.53, 0.18, 0.11, -0.04]),
    ("The number", "The numbers", [-0.94, 0.22, 0.19, -0.05]),
    ("The number", "The Characters", [-1.08, 0.18, 0.22, -0.04]),
    ("The number", "Substantive", [-2.36, 0.42, 0.48, -0.09]),
    ("The Sign", "The letters", [-2.23, 0.75, 0.71, -0.24]),
    ("The Sign", "The numbers", [0.57, 0.09, 0.12, -0.03]),
    ("The Sign", "The Characters", [-0.65, 0.11, 0.21, -0.03]),
    ("The Sign", "Substantive", [-0.65, 0.11, 0.20, -0.04]),
    ("The letters", "The numbers", [-0.30, 0.07, 0.10, -0.02]),
    ("The letters", "The Characters", [-1.87, 0.31, 0.18, -0.10]),
    ("The letters", "Substantive", [0.11, -0.02, -0.04, 0.01]),
    ("The numbers", "The Characters", [-1.34, 0.22, 0.32, -0.05]),
    ("The numbers", "Substantive", [-0.23, 0.05, 0.07, -0.01]),
    ("The Characters", "Substantive", [-1.33, 0.24, 0.22, -0.04]),
];

/// Printed cells that contradict the printed counts. Each entry is
/// `(a, b, quadrant, printed, value from the counts rounded to 2 decimals)`.
pub const PRINTED_H_TYPOS: [(&str, &str, Quadrant, f64, f64); 3] = [
    ("The Sign", "The numbers", Quadrant::Exclusion, 0.57, -0.37),
    (
        "The letters",
        "The Characters",
        Quadrant::Backward,
        0.18,
        0.63,
    ),
    (
        "The numbers",
        "Substantive",
        Quadrant::Exclusion,
        -0.23,
        -0.29,
    ),
];

/// Published lower bounds as `(source, target, bound)`; all are
/// implication cells at δ = 0.90.
pub const PRINTED_BOUNDS: [(&str, &str, f64); 12] = [
    ("The number", "The Sign", 0.634),
    ("The Sign", "The number", 0.397),
    ("The number", "The numbers", 0.168),
    ("The Characters", "The number", 0.156),
    ("The number", "Substantive", 0.36),
    ("Substantive", "The number", 0.414),
    ("The Sign", "The letters", 0.698),
    ("The letters", "The Sign", 0.658),
    ("The Characters", "The Sign", 0.135),
    ("The letters", "The Characters", 0.264),
    ("The numbers", "The Characters", 0.171),
    ("The Characters", "The numbers", 0.253),
];

pub fn printed_tables() -> PairTables {
    PairTables::parse_csv(TERM_PAIRS).expect("term pair fixture parses")
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

// ---------------------------------------------------------------------------
// Concept oracle

/// Every closed `(extent, intent)` of a boolean matrix, by brute force over all
/// attribute subsets. Objects and attributes are indices.
pub fn brute_force_concepts(
    incidence: &[Vec<bool>],
    m: usize,
) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    assert!(m <= 16, "brute force over 2^{m} subsets");
    let n = incidence.len();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|a| mask >> a & 1 == 1).collect();
        let extent: Vec<usize> = (0..n)
            .filter(|&o| subset.iter().all(|&a| incidence[o][a]))
            .collect();
        let intent: Vec<usize> = (0..m)
            .filter(|&a| extent.iter().all(|&o| incidence[o][a]))
            .collect();
        if intent == subset {
            out.insert((extent, intent));
        }
    }
    out
}

pub fn incidence_of(ctx: &FormalContext) -> Vec<Vec<bool>> {
    (0..ctx.object_count())
        .map(|o| {
            (0..ctx.attribute_count())
                .map(|a| ctx.incident(o, a))
                .collect()
        })
        .collect()
}

pub fn random_context(
    rng: &mut impl Rng,
    max_objects: usize,
    max_attributes: usize,
) -> FormalContext {
    let n = rng.random_range(0..=max_objects);
    let m = rng.random_range(1..=max_attributes);
    let density: f64 = rng.random_range(0.1..0.9);
    let incidence = (0..n)
        .map(|_| (0..m).map(|_| rng.random_bool(density)).collect())
        .collect();
    FormalContext::new(
        (0..n).map(|i| format!("g{i}")).collect(),
        (0..m).map(|i| format!("m{i}")).collect(),
        incidence,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Exact index oracle

/// Loevinger index of the error cell as an exact fraction `(num, den)`,
/// computed as `1 − P(error)/(P(row)·P(col))` with probabilities `count/n`.
pub fn rational_h(t: [u64; 4], q: Quadrant) -> Option<(i128, i128)> {
    let [a, b, c, d] = t.map(|x| x as i128);
    let n = a + b + c + d;
    let (err, row, col) = match q {
        Quadrant::Exclusion => (a, a + b, a + c),
        Quadrant::Forward => (b, a + b, b + d),
        Quadrant::Backward => (c, c + d, a + c),
        Quadrant::Complement => (d, c + d, b + d),
    };
    if row == 0 || col == 0 {
        return None;
    }
    // 1 − (err/n) / ((row/n)(col/n)) = (row·col − err·n) / (row·col)
    Some((row * col - err * n, row * col))
}

// ---------------------------------------------------------------------------
// Dense-grid posterior oracle

/// `(1−δ)` quantile of the quadrant's index under Dirichlet(counts + prior),
/// integrated on a grid of step `1/steps` over the 3-simplex.
///
/// The largest-α cell is the implicit coordinate. The other three carry the
/// exact integral of `x^(α−1)` over each grid interval, so zero counts with
/// sub-unit prior weights (integrable singularities at 0) are handled.
pub fn grid_lower_bound(
    t: [u64; 4],
    q: Quadrant,
    delta: f64,
    prior: [f64; 4],
    steps: usize,
) -> f64 {
    let alpha: [f64; 4] = std::array::from_fn(|i| t[i] as f64 + prior[i]);
    let dep = (0..4)
        .max_by(|&i, &j| alpha[i].total_cmp(&alpha[j]))
        .unwrap();
    let free: Vec<usize> = (0..4).filter(|&i| i != dep).collect();
    let n = steps as f64;
    let cell_mass = |a: f64| -> Vec<f64> {
        (0..steps)
            .map(|k| (((k + 1) as f64 / n).powf(a) - (k as f64 / n).powf(a)) / a)
            .collect()
    };
    let masses: Vec<Vec<f64>> = free.iter().map(|&i| cell_mass(alpha[i])).collect();

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(steps * steps * steps / 6 + steps * steps);
    let mut p = [0.0f64; 4];
    for i in 0..steps {
        for j in 0..steps - i {
            let w_ij = masses[0][i] * masses[1][j];
            if (i + j) + 2 > steps {
                break;
            }
            for k in 0..=(steps - 2 - i - j) {
                let x = [
                    (i as f64 + 0.5) / n,
                    (j as f64 + 0.5) / n,
                    (k as f64 + 0.5) / n,
                ];
                let rest = 1.0 - x[0] - x[1] - x[2];
                if rest <= 0.0 {
                    continue;
                }
                p[free[0]] = x[0];
                p[free[1]] = x[1];
                p[free[2]] = x[2];
                p[dep] = rest;
                let w = w_ij * masses[2][k] * rest.powf(alpha[dep] - 1.0);
                if w == 0.0 {
                    continue;
                }
                if let Some(h) = index_on_probabilities(&p, q) {
                    points.push((h, w));
                }
            }
        }
    }
    let total: f64 = points.iter().map(|x| x.1).sum();
    weighted_quantile(&mut points, (1.0 - delta) * total)
}

fn index_on_probabilities(p: &[f64; 4], q: Quadrant) -> Option<f64> {
    let (err, row, col) = match q {
        Quadrant::Exclusion => (p[0], p[0] + p[1], p[0] + p[2]),
        Quadrant::Forward => (p[1], p[0] + p[1], p[1] + p[3]),
        Quadrant::Backward => (p[2], p[2] + p[3], p[0] + p[2]),
        Quadrant::Complement => (p[3], p[2] + p[3], p[1] + p[3]),
    };
    let denom = row * col;
    (denom > 0.0).then(|| 1.0 - err / denom)
}

// Smallest value whose cumulative weight reaches `target`.
fn weighted_quantile(items: &mut [(f64, f64)], target: f64) -> f64 {
    let cmp = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0);
    let (mut lo, mut hi) = (0usize, items.len());
    let mut below = 0.0;
    while hi - lo > 256 {
        let mid = lo + (hi - lo) / 2;
        items[lo..hi].select_nth_unstable_by(mid - lo, cmp);
        let left: f64 = items[lo..mid].iter().map(|x| x.1).sum();
        if below + left >= target {
            hi = mid;
        } else {
            below += left;
            lo = mid;
        }
    }
    let slice = &mut items[lo..hi];
    slice.sort_unstable_by(cmp);
    for &(h, w) in slice.iter() {
        below += w;
        if below >= target {
            return h;
        }
    }
    slice.last().map(|x| x.0).unwrap_or(f64::NAN)
}

/// Small tables for the grid comparison: `n ≤ 30`, mixed zero cells, with
/// the compared quadrant descriptively defined.
pub const ORACLE_TABLES: [([u64; 4], Quadrant); 20] = [
    ([5, 0, 3, 12], Quadrant::Forward),
    ([5, 0, 3, 12], Quadrant::Backward),
    ([3, 1, 2, 10], Quadrant::Forward),
    ([8, 2, 1, 9], Quadrant::Forward),
    ([8, 2, 1, 9], Quadrant::Backward),
    ([10, 1, 2, 1], Quadrant::Forward),
    ([2, 2, 2, 2], Quadrant::Forward),
    ([6, 1, 4, 14], Quadrant::Forward),
    ([7, 0, 0, 8], Quadrant::Forward),
    ([7, 0, 0, 8], Quadrant::Backward),
    ([4, 3, 0, 6], Quadrant::Backward),
    ([12, 2, 5, 11], Quadrant::Forward),
    ([1, 0, 2, 7], Quadrant::Forward),
    ([9, 4, 4, 9], Quadrant::Forward),
    ([0, 5, 6, 4], Quadrant::Exclusion),
    ([1, 6, 7, 3], Quadrant::Exclusion),
    ([3, 5, 2, 0], Quadrant::Complement),
    ([15, 3, 2, 10], Quadrant::Backward),
    ([5, 5, 1, 19], Quadrant::Backward),
    ([2, 1, 1, 6], Quadrant::Forward),
];

// ---------------------------------------------------------------------------
// Random usage logs

pub fn random_usage(rng: &mut impl Rng) -> UsageMatrix {
    let users = rng.random_range(10..=150);
    let terms = rng.random_range(2..=6);
    // per-term base rates plus a shared latent trait so that some pairs correlate
    let rates: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..0.7)).collect();
    let mut used = Vec::with_capacity(users);
    for _ in 0..users {
        let boost = rng.random_bool(0.5);
        let row: Vec<bool> = rates
            .iter()
            .enumerate()
            .map(|(t, &r)| {
                let p = if boost && t % 2 == 0 {
                    (r + 0.3).min(0.95)
                } else {
                    r
                };
                rng.random_bool(p)
            })
            .collect();
        used.push(row);
    }
    let population = users + rng.random_range(0..=users);
    UsageMatrix::new(
        (0..users).map(|u| format!("u{u}")).collect(),
        (0..terms).map(|t| format!("t{t}")).collect(),
        used,
        population,
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn table(c: [u64; 4]) -> ContingencyTable {
    ContingencyTable::from_cells(c)
}
