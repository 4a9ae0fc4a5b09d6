//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero if any failed.

#![allow(clippy::needless_range_loop)]

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use emle::datasets;
use emle_core::design::{build_design, sufficient_statistic, DesignMatrix};
use emle_core::facial::{find_facial_set, per_cell_oracle};
use emle_core::fit::{fit, fit_unrestricted, FitResult};
use emle_core::linalg::Matrix;
use emle_core::lp::{solve, LinearProgram, LpStatus};
use emle_core::{parse_formula, parse_generators, ContingencyTable, FactorSpec, ModelFormula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_INSTANCES: usize = 600;
const RANDOM_LPS: usize = 200;

enum Outcome {
    Pass(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("haberman 2x2x2 worked example", haberman),
        ("3x3x3 example facial set", example_3x3x3),
        ("rochdale face and aliasing", rochdale),
        ("rochdale bic and cbic tables", rochdale_tables),
        ("search agrees with per-cell oracle", oracle_equivalence),
        ("existence and positivity properties", existence),
        ("zero-pattern invariance", zero_pattern_invariance),
        ("moment equations at convergence", moment_equations),
        ("lp solves and brute-force agreement", lp_sanity),
    ];
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(|info| eprintln!("    {info}")));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let line = match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(Outcome::Pass(detail)) => format!("PASS  {name} ({detail})"),
            Ok(Outcome::Skip(why)) => format!("SKIP  {name} ({why})"),
            Err(_) => {
                failed += 1;
                format!("FAIL  {name}")
            }
        };
        println!("criterion {}: {line}", k + 1);
    }
    panic::set_hook(default_hook);
    println!("acceptance: {} of {} criteria failed", failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn table(names: &[&str], levels: &[usize], counts: Vec<u64>) -> ContingencyTable {
    let factors = names
        .iter()
        .zip(levels)
        .map(|(n, &l)| FactorSpec::new(*n, (1..=l).map(|x| x.to_string())).unwrap())
        .collect();
    ContingencyTable::new(factors, counts).unwrap()
}

fn builtin(name: &str) -> Option<ContingencyTable> {
    datasets::builtin(name).map(|r| r.expect("bundled dataset parses"))
}

/// Shape from {2x2x2, 2x2x3, 3x3}, ~40% zeros (`zero_rate`), positive counts on 1..=5.
fn random_instance(rng: &mut ChaCha8Rng, zero_rate: f64) -> (ContingencyTable, ModelFormula) {
    let shapes: [&[usize]; 3] = [&[2, 2, 2], &[2, 2, 3], &[3, 3]];
    let shape = shapes[rng.gen_range(0..shapes.len())];
    let names = &["a", "b", "c"][..shape.len()];
    let cells: usize = shape.iter().product();
    let counts = loop {
        let c: Vec<u64> =
            (0..cells).map(|_| if rng.gen_bool(zero_rate) { 0 } else { rng.gen_range(1..=5) }).collect();
        if c.iter().any(|&x| x > 0) {
            break c;
        }
    };
    let models: &[&str] =
        if shape.len() == 3 { &["[a][b][c]", "[ab][c]", "[ab][bc]", "[ab][bc][ac]"] } else { &["[a][b]", "[ab]"] };
    let model = parse_generators(models[rng.gen_range(0..models.len())]).unwrap();
    (table(names, shape, counts), model)
}

fn instances(seed: u64, zero_rate: f64, count: usize) -> Vec<(ContingencyTable, ModelFormula)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, zero_rate)).collect()
}

/// `max_j |Σ_{i∈F} x_ij (m_i − n_i)|` over the estimable columns, computed
/// from the design directly.
fn moment_gap(t: &ContingencyTable, x: &DesignMatrix, r: &FitResult) -> f64 {
    r.estimable_columns
        .iter()
        .map(|&j| {
            (0..t.num_cells())
                .filter(|&i| r.fitted_means[i] > 0.0 || t.counts()[i] > 0)
                .map(|i| x.row(i)[j] * (r.fitted_means[i] - t.counts()[i] as f64))
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

fn haberman() -> Outcome {
    let t = builtin("haberman").unwrap();
    let m = parse_formula("freq ~ a*b + a*c + b*c").unwrap();
    let fs = find_facial_set(&t, &m).unwrap();
    let r = fit(&t, &m, &fs).unwrap();
    assert_eq!(fs.model_dimension, 7);
    let excluded: Vec<String> = fs.excluded().iter().map(|&i| t.cell(i).to_string()).collect();
    assert_eq!(excluded, ["111", "222"], "excluded cells (one-based labels)");
    assert_eq!(fs.face_dimension, 6);
    assert_eq!(fs.iterations, 1);
    assert!((r.loglik - -1.772691).abs() <= 1e-4, "loglik {}", r.loglik);
    for i in fs.cells() {
        assert!((r.fitted_means[i] - t.counts()[i] as f64).abs() <= 1e-6);
    }
    assert_eq!(r.aliased().len(), 1);
    assert_eq!(r.residual_df, 0);
    assert!(r.deviance <= 1e-12, "deviance {}", r.deviance);
    Outcome::Pass(format!("loglik {:.6}, deviance {:.1e}", r.loglik, r.deviance))
}

fn example_3x3x3() -> Outcome {
    let t = builtin("example3x3x3").unwrap();
    let m = parse_generators("[ab][ac][bc]").unwrap();
    let fs = find_facial_set(&t, &m).unwrap();
    let zeros: Vec<String> = t.zero_cells().iter().map(|&i| t.cell(i).to_string()).collect();
    assert_eq!(zeros.len(), 7);
    for (i, &n) in t.counts().iter().enumerate() {
        let expected = n > 0 || t.cell(i).to_string() == "131";
        assert_eq!(fs.in_face[i], expected, "cell {}", t.cell(i));
    }
    assert_eq!(fs.face_dimension, 18);
    Outcome::Pass(format!("zeros {}, rescued 131, d_F {}", zeros.join(" "), fs.face_dimension))
}

const ROCHDALE_MODEL: &str = "freq ~ a*d + a*e + b*e + c*e + e*f + a*c*g + d*g + f*g + b*d*h";

fn rochdale() -> Outcome {
    let Some(t) = builtin("rochdale") else {
        return Outcome::Skip("dataset not bundled".into());
    };
    assert_eq!(t.total(), 665);
    assert_eq!(t.zero_cells().len(), 165);
    let m = parse_formula(ROCHDALE_MODEL).unwrap();
    let fs = find_facial_set(&t, &m).unwrap();
    let r = fit(&t, &m, &fs).unwrap();
    assert_eq!(fs.model_dimension, 24);
    assert_eq!(fs.face_dimension, 22);
    assert_eq!(fs.len(), 196);
    assert_eq!(r.residual_df, 174);
    let mut aliased: Vec<String> = r.aliased().iter().map(|&j| r.labels[j].term.to_string()).collect();
    aliased.sort();
    aliased.dedup();
    assert_eq!(aliased, ["a:c:g", "b:d:h"]);
    assert_eq!(r.aliased().len(), 2);
    Outcome::Pass(format!("d 24, d_F 22, |I_F| 196, df 174, aliased {}", aliased.join(" ")))
}

/// Generators, reference criterion value, model dimension, face dimension.
type TableRow = (&'static str, f64, usize, usize);

const CBIC_TABLE: [TableRow; 5] = [
    ("|ad|ae|be|ce|ef|acg|dg|fg|bdh|", 985.3, 24, 22),
    ("|ad|ae|be|ce|cf|ef|acg|dg|fg|bdh|", 985.2, 25, 23),
    ("|ad|ae|be|ce|cf|df|ef|acg|dg|fg|bdh", 984.4, 26, 24),
    ("|ad|ae|be|ce|df|ef|acg|dg|fg|bdh|", 984.3, 25, 23),
    ("|ac|ad|ae|be|ce|ef|ag|cg|dg|fg|bdh", 984.0, 23, 22),
];

const BIC_TABLE: [TableRow; 5] = [
    ("|ac|ad|bd|ae|be|ce|ef|ag|cg|dg|fg|bh|dh|", 981.3, 22, 22),
    ("|ac|ad|bd|ae|be|ce|cf|ef|ag|cg|dg|fg|bh|dh|", 981.1, 23, 23),
    ("|ac|ad|ae|be|ce|ef|ag|cg|dg|fg|bdh|", 980.7, 23, 22),
    ("|ac|ad|ae|be|ce|cf|ef|ag|cg|dg|fg|bdh|", 980.5, 24, 23),
    ("|ac|ad|bd|ae|be|ce|ef|ag|cg|dg|fg|bh|", 980.4, 21, 21),
];

fn check_table(t: &ContingencyTable, rows: &[TableRow], corrected: bool) -> f64 {
    let values: Vec<f64> = rows
        .iter()
        .map(|&(gens, _, d, d_f)| {
            let m = parse_generators(gens).unwrap();
            let fs = find_facial_set(t, &m).unwrap();
            let r = fit(t, &m, &fs).unwrap();
            assert_eq!((r.model_dimension, r.face_dimension), (d, d_f), "{gens}");
            if corrected {
                r.cbic
            } else {
                r.bic
            }
        })
        .collect();
    for w in values.windows(2) {
        assert!(w[0] > w[1], "ranking differs: {values:?}");
    }
    let mut worst: f64 = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let gap = ((values[i] - values[j]) - (rows[i].1 - rows[j].1)).abs();
            assert!(gap <= 0.15, "rows {} and {}: computed {values:?}", i + 1, j + 1);
            worst = worst.max(gap);
        }
    }
    worst
}

fn rochdale_tables() -> Outcome {
    let Some(t) = builtin("rochdale") else {
        return Outcome::Skip("dataset not bundled".into());
    };
    let a = check_table(&t, &CBIC_TABLE, true);
    let b = check_table(&t, &BIC_TABLE, false);
    Outcome::Pass(format!("worst pairwise gap cbic {a:.3}, bic {b:.3}"))
}

fn oracle_equivalence() -> Outcome {
    let mut excluded_some = 0;
    for (t, m) in instances(1, 0.4, RANDOM_INSTANCES) {
        let fs = find_facial_set(&t, &m).unwrap();
        let oracle = per_cell_oracle(&t, &m).unwrap();
        assert_eq!(fs.in_face, oracle.in_face, "counts {:?} model {}", t.counts(), m.generator_string());
        excluded_some += usize::from(!fs.excluded().is_empty());
    }
    Outcome::Pass(format!("{RANDOM_INSTANCES} instances, {excluded_some} with excluded cells"))
}

fn existence() -> Outcome {
    let mut exists = 0;
    for (t, m) in instances(1, 0.4, RANDOM_INSTANCES) {
        let fs = find_facial_set(&t, &m).unwrap();
        for (i, &n) in t.counts().iter().enumerate() {
            assert!(n == 0 || fs.in_face[i], "positive cell off the face");
        }
        if emle_core::mle_exists(&fs) {
            exists += 1;
            let u = fit_unrestricted(&t, &build_design(&t, &m).unwrap(), 100).unwrap();
            assert!(u.converged, "counts {:?} model {}", t.counts(), m.generator_string());
            assert!(u.fitted_means.iter().all(|&x| x > 1e-10));
        }
    }
    let positive = instances(2, 0.0, 200);
    for (t, m) in &positive {
        let fs = find_facial_set(t, m).unwrap();
        assert!(fs.in_face.iter().all(|&f| f));
    }
    Outcome::Pass(format!("{exists} existing MLEs fitted, {} all-positive tables", positive.len()))
}

fn zero_pattern_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (t, m) in instances(1, 0.4, RANDOM_INSTANCES) {
        let scaled: Vec<u64> = t.counts().iter().map(|&n| n * rng.gen_range(1..=50)).collect();
        let s = t.with_counts(scaled).unwrap();
        let a = find_facial_set(&t, &m).unwrap();
        let b = find_facial_set(&s, &m).unwrap();
        assert_eq!(a.in_face, b.in_face);
        assert_eq!(a.face_dimension, b.face_dimension);
    }
    Outcome::Pass(format!("{RANDOM_INSTANCES} rescaled instances"))
}

fn moment_equations() -> Outcome {
    let mut cases: Vec<(ContingencyTable, ModelFormula)> = instances(1, 0.4, RANDOM_INSTANCES);
    cases.push((builtin("haberman").unwrap(), parse_generators("[ab][ac][bc]").unwrap()));
    cases.push((builtin("example3x3x3").unwrap(), parse_generators("[ab][ac][bc]").unwrap()));
    if let Some(t) = builtin("rochdale") {
        cases.push((t.clone(), parse_formula(ROCHDALE_MODEL).unwrap()));
        for (gens, ..) in CBIC_TABLE.iter().chain(&BIC_TABLE) {
            cases.push((t.clone(), parse_generators(gens).unwrap()));
        }
    }
    let mut worst: f64 = 0.0;
    for (t, m) in &cases {
        let x = build_design(t, m).unwrap();
        let fs = find_facial_set(t, m).unwrap();
        let r = fit(t, m, &fs).unwrap();
        let n = t.total() as f64;
        let gap = moment_gap(t, &x, &r);
        assert!(gap <= 1e-8 * n, "gap {gap} for N = {n}");
        worst = worst.max(gap / n);
    }
    Outcome::Pass(format!("{} fits, worst gap / N {worst:.1e}", cases.len()))
}

/// Max of `cᵀx` over basic feasible solutions of `ax = b, x ≥ 0`.
fn brute_force(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let (n, m) = (c.len(), b.len());
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        if cols.len() > m {
            continue;
        }
        let k = cols.len();
        let x = if k == 0 {
            Vec::new()
        } else {
            let mut g: Vec<Vec<f64>> = (0..k)
                .map(|p| (0..k).map(|q| (0..m).map(|i| a[i][cols[p]] * a[i][cols[q]]).sum()).collect())
                .collect();
            let mut h: Vec<f64> = (0..k).map(|p| (0..m).map(|i| a[i][cols[p]] * b[i]).sum()).collect();
            let mut singular = false;
            for col in 0..k {
                let p = (col..k).max_by(|&i, &j| g[i][col].abs().total_cmp(&g[j][col].abs())).unwrap();
                if g[p][col].abs() < 1e-10 {
                    singular = true;
                    break;
                }
                g.swap(p, col);
                h.swap(p, col);
                for r in 0..k {
                    if r != col {
                        let f = g[r][col] / g[col][col];
                        for q in col..k {
                            g[r][q] -= f * g[col][q];
                        }
                        h[r] -= f * h[col];
                    }
                }
            }
            if singular {
                continue;
            }
            (0..k).map(|r| h[r] / g[r][r]).collect()
        };
        if x.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let residual = (0..m)
            .map(|i| (cols.iter().zip(&x).map(|(&j, v)| a[i][j] * v).sum::<f64>() - b[i]).abs())
            .fold(0.0, f64::max);
        if residual > 1e-9 {
            continue;
        }
        let z: f64 = cols.iter().zip(&x).map(|(&j, v)| c[j] * v).sum();
        best = Some(best.map_or(z, |bz: f64| bz.max(z)));
    }
    best
}

/// Replays the facial-set LPs (every search round and every per-cell
/// problem) and checks each solve.
fn facial_lps(t: &ContingencyTable, m: &ModelFormula) -> usize {
    let x = build_design(t, m).unwrap();
    let indicator: Vec<u64> = t.counts().iter().map(|&n| u64::from(n > 0)).collect();
    let rhs = sufficient_statistic(&x, &indicator).unwrap().as_f64();
    let constraints = Matrix::from_fn(x.dimension(), t.num_cells(), |r, c| x.row(c)[r]);
    let solve_on = |cells: &[usize]| {
        let mut c = vec![0.0; t.num_cells()];
        for &i in cells {
            c[i] = 1.0;
        }
        let sol = solve(&LinearProgram::new(c, constraints.clone(), rhs.clone()).unwrap()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective_value <= rhs[0] + 1e-8);
        sol
    };
    let mut solves = 0;
    let mut active = t.zero_cells();
    while !active.is_empty() {
        let sol = solve_on(&active);
        solves += 1;
        let before = active.len();
        active.retain(|i| sol.point[*i] <= 1e-8);
        if active.len() == before {
            break;
        }
    }
    for i in t.zero_cells() {
        solve_on(&[i]);
        solves += 1;
    }
    solves
}

fn lp_sanity() -> Outcome {
    let mut facial = 0;
    for (t, m) in instances(1, 0.4, RANDOM_INSTANCES) {
        facial += facial_lps(&t, &m);
    }
    if let Some(t) = builtin("rochdale") {
        facial += facial_lps(&t, &parse_formula(ROCHDALE_MODEL).unwrap());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut infeasible = 0;
    for _ in 0..RANDOM_LPS {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=n.min(4));
        let a: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..n).map(|_| if i == 0 { rng.gen_range(1..=3) as f64 } else { rng.gen_range(-2..=3) as f64 }).collect()
            })
            .collect();
        let b: Vec<f64> = if rng.gen_bool(0.8) {
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=3) as f64).collect();
            a.iter().map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect()
        } else {
            (0..m).map(|_| rng.gen_range(-3..=6) as f64).collect()
        };
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
        let lp = LinearProgram::new(c.clone(), Matrix::from_fn(m, n, |i, j| a[i][j]), b.clone()).unwrap();
        let sol = solve(&lp).unwrap();
        match brute_force(&c, &a, &b) {
            Some(z) => {
                assert_eq!(sol.status, LpStatus::Optimal);
                assert!((sol.objective_value - z).abs() <= 1e-8, "simplex {} vs {z}", sol.objective_value);
            }
            None => {
                assert_eq!(sol.status, LpStatus::Infeasible);
                infeasible += 1;
            }
        }
    }
    Outcome::Pass(format!("{facial} facial LPs, {RANDOM_LPS} brute-force LPs ({infeasible} infeasible)"))
}
