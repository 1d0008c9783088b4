//! Nine end-to-end checks over the whole workspace, numbered 1 through 9,
//! each printing one `criterion N: PASS` or `criterion N: FAIL` line.
//!
//! Every dimension comparison is exact equality; the checks that carry a
//! wall-clock budget assert it. Failures collect into the line's report
//! rather than stopping at the first mismatch, so one run shows the full
//! damage.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cotorlab::annular::{annular_stratum, coskeletal_page, koszul_roundtrip, tangent_line};
use cotorlab::coalgebra::{
    coideal, cotensor_power, cotor, curve_coalgebra, trivial_comodule,
};
use cotorlab::coeffring::{build_field, build_witt, galois_norm};
use cotorlab::dieudonne::{
    exterior_power, honda_module, lie_dimension, operator_exterior_power,
};
use cotorlab::fgl::{honda_fgl, p_series, torsion_algebra};
use cotorlab::prolim::{
    compare_derived_limits, extend_tower, milnor_exact, random_module_tower, TailPolicy,
};
use cotorlab::stabilizer::{
    beta_star_action, determinant, is_unit, left_mult_matrix, multiply, random_unit,
    EndoElement,
};
use cotorlab::ExecMode;

const MODE: ExecMode = ExecMode::Parallel;

fn conclude(n: usize, label: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {n}: PASS ({label})");
    } else {
        println!("criterion {n}: FAIL ({label}; {} problems)", failures.len());
        panic!("criterion {n}: FAIL\n{}", failures.join("\n"));
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn criterion_1_cotor_vanishing_and_dual_ideal_dims() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for &p in &[2u64, 3, 5] {
        let field = build_field(p, 1).unwrap();
        for t in 2..=10usize {
            let c = curve_coalgebra(&field, t).unwrap();
            let powers = cotensor_power(&c, 3, t, MODE).unwrap();
            for a in 0..=3usize {
                for b in 0..=3usize {
                    let report =
                        cotor(&powers.levels[a], &c, &powers.levels[b], t, MODE).unwrap();
                    for (s, row) in report.dims.iter().enumerate().skip(1) {
                        if row.iter().any(|&v| v != 0) {
                            failures.push(format!(
                                "p={p} T={t} a={a} b={b}: nonzero classes at s={s}: {row:?}"
                            ));
                        }
                    }
                    // The dual of the curve is k[x]/(x^T); the (a+b)-th
                    // power of its maximal ideal is one line in each
                    // degree from a+b up to T-1.
                    let oracle: Vec<usize> =
                        (0..t).map(|g| usize::from(g >= a + b)).collect();
                    if report.dims[0] != oracle {
                        failures.push(format!(
                            "p={p} T={t} a={a} b={b}: degree-zero row {:?} differs from ideal dims {oracle:?}",
                            report.dims[0]
                        ));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        failures.push(format!("runtime {secs:.1}s exceeds the 60s budget"));
    }
    conclude(
        1,
        &format!("vanishing above row zero + dual-ideal dims, p in {{2,3,5}}, T up to 10, powers up to 3, {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_2_annular_strata_tangent_powers_and_additivity() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for &p in &[2u64, 3, 5] {
        let field = build_field(p, 1).unwrap();
        for t in 2..=10usize {
            let c = curve_coalgebra(&field, t).unwrap();
            let (line_deg, _) = tangent_line(&c, MODE).unwrap();
            if line_deg != 1 {
                failures.push(format!("p={p} T={t}: tangent line in degree {line_deg}"));
            }
            let mut dims: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
            for n in 0..t {
                for n_prime in n..t {
                    let rep = annular_stratum(&c, n, n_prime, t, MODE).unwrap();
                    dims.insert((n, n_prime), rep.dims);
                }
            }
            for n in 0..t {
                let got = &dims[&(n, n)];
                let expected: Vec<usize> =
                    (0..t).map(|g| usize::from(g == n * line_deg)).collect();
                if got != &expected {
                    failures.push(format!(
                        "p={p} T={t}: diagonal stratum {n} has dims {got:?}, tensor power of the line gives {expected:?}"
                    ));
                }
            }
            for n in 0..t {
                for n_prime in n..t {
                    for n_second in n_prime + 1..t {
                        let sum: Vec<usize> = dims[&(n, n_prime)]
                            .iter()
                            .zip(&dims[&(n_prime + 1, n_second)])
                            .map(|(&x, &y)| x + y)
                            .collect();
                        if sum != dims[&(n, n_second)] {
                            failures.push(format!(
                                "p={p} T={t}: [{n},{n_prime}] + [{},{n_second}] = {sum:?} differs from [{n},{n_second}] = {:?}",
                                n_prime + 1,
                                dims[&(n, n_second)]
                            ));
                        }
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        failures.push(format!("runtime {secs:.1}s exceeds the 30s budget"));
    }
    conclude(
        2,
        &format!("diagonal strata are tangent-line powers and strata add degreewise, T up to 10, {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_3_coskeletal_towers_stabilize_by_index_two() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // Coefficients (coideal, curve, j-th cotensor power) for j = 1..=3;
    // the j = 0 slot (the coalgebra itself) genuinely stabilizes later
    // and sits outside the filtration the tower built here measures.
    for &p in &[2u64, 3, 5] {
        let field = build_field(p, 1).unwrap();
        for t in 2..=8usize {
            let c = curve_coalgebra(&field, t).unwrap();
            let m = coideal(&c).unwrap();
            let powers = cotensor_power(&c, 3, t, MODE).unwrap();
            for j in 1..=3usize {
                // The six-term bookkeeping is re-checked inside at every
                // even in-window cell; imbalance aborts the page.
                let page = match coskeletal_page(
                    &m,
                    &c,
                    &powers.levels[j],
                    t - 1,
                    2 * t,
                    t,
                    MODE,
                ) {
                    Ok(page) => page,
                    Err(e) => {
                        failures.push(format!("p={p} T={t} j={j}: {e}"));
                        continue;
                    }
                };
                if !page.pro_constant {
                    failures.push(format!(
                        "p={p} T={t} j={j}: page not pro-constant: {:?}",
                        page.stabilization
                    ));
                }
                for s in 0..t {
                    match page.stabilization[s] {
                        Some(t0) if t0 <= 2 => {}
                        other => failures.push(format!(
                            "p={p} T={t} j={j}: row {s} stabilizes at {other:?}"
                        )),
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    conclude(
        3,
        &format!("stabilization index at most 2 on every row in window, six-term balance internal, T up to 8, {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_4_koszul_roundtrip_exterior_and_bar() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for &p in &[2u64, 3, 5] {
        let field = build_field(p, 1).unwrap();
        for t in 2..=10usize {
            let c = curve_coalgebra(&field, t).unwrap();
            let report = koszul_roundtrip(&c, t, MODE).unwrap();
            if report.algebra_cells != vec![(0, 0, 1), (1, 1, 1)] {
                failures.push(format!(
                    "p={p} T={t}: cohomology cells {:?} are not one unit plus one (1,1) class",
                    report.algebra_cells
                ));
            }
            if report.square_checked == Some(false) {
                failures.push(format!("p={p} T={t}: generator square is nonzero"));
            }
            let curve_dims = c.basis().dims_below(t);
            if report.collapsed_bar_dims != curve_dims {
                failures.push(format!(
                    "p={p} T={t}: bar homology dims {:?} differ from curve dims {curve_dims:?}",
                    report.collapsed_bar_dims
                ));
            }
            if !report.dims_match {
                failures.push(format!("p={p} T={t}: round-trip dims flag is false"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    conclude(
        4,
        &format!("one exterior (1,1) generator and bar homology reproduces curve dims, T in 2..=10, {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_5_honda_axioms_frobenius_congruence_and_torsion_dims() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let pairs: [(u64, usize); 6] = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (3, 3)];
    for &(p, d) in &pairs {
        let law = honda_fgl(p, d, 12, 2).unwrap();
        if let Err(e) = law.check_axioms() {
            failures.push(format!("p={p} d={d}: axiom check: {e}"));
        }
        let pd = (p as usize).pow(d as u32);
        let cap = 12usize.max(pd) + 1;
        let mod_p = honda_fgl(p, d, cap, 1).unwrap();
        let series = p_series(&mod_p, 1, cap).unwrap();
        let mut monomials = series.series.monomials();
        monomials.sort_unstable();
        if monomials != vec![(pd, 0, 1)] {
            failures.push(format!(
                "p={p} d={d}: multiplication by p mod p is {monomials:?}, not the {pd}-power map"
            ));
        }
        if !series.complete {
            failures.push(format!("p={p} d={d}: p-series cap misses its lowest degree"));
        }
        for j in 0..=2usize {
            let torsion = torsion_algebra(&mod_p, j).unwrap();
            let expected = (p as usize).pow((j * d) as u32);
            if torsion.dim != expected {
                failures.push(format!(
                    "p={p} d={d} j={j}: torsion dimension {} instead of {expected}",
                    torsion.dim
                ));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        failures.push(format!("runtime {secs:.1}s exceeds the 120s budget"));
    }
    conclude(
        5,
        &format!("axioms to degree 12, p-multiplication is the p^d-power map mod p, torsion dims p^(jd), {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_6_determinant_properties_on_seeded_units() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let contexts: [(u64, usize, u32); 4] = [(3, 2, 2), (5, 2, 2), (3, 3, 2), (2, 3, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut checked = 0usize;
    for &(p, d, n) in &contexts {
        let w = build_witt(p, d, n).unwrap();
        let units: Vec<_> = (0..50).map(|_| random_unit(&w, &mut rng)).collect();
        let dets: Vec<_> = units
            .iter()
            .map(|g| determinant(&w, g).unwrap())
            .collect();
        for (i, (g, det_g)) in units.iter().zip(&dets).enumerate() {
            let tag = format!("p={p} d={d} N={n} unit {i}");
            if !w.is_unit(det_g) {
                failures.push(format!("{tag}: determinant is not a unit"));
            }
            if w.sigma(det_g, 1) != *det_g {
                failures.push(format!("{tag}: determinant moves under sigma"));
            }
            let a = g.coeffs()[0].clone();
            let scalar_det =
                determinant(&w, &EndoElement::scalar(&w, a.clone()).unwrap()).unwrap();
            let norm = galois_norm(&w, &a).unwrap();
            if scalar_det != w.scalar(norm as i64) {
                failures.push(format!("{tag}: scalar determinant is not the Galois norm"));
            }
            match beta_star_action(&w, g) {
                Ok(beta) if beta == *det_g => {}
                Ok(beta) => failures.push(format!(
                    "{tag}: class action {beta:?} differs from determinant {det_g:?}"
                )),
                Err(e) => failures.push(format!("{tag}: class action: {e}")),
            }
            let h = &units[(i + 1) % units.len()];
            let det_h = &dets[(i + 1) % units.len()];
            let det_gh = determinant(&w, &multiply(&w, g, h).unwrap()).unwrap();
            if det_gh != w.mul(det_g, det_h) {
                failures.push(format!("{tag}: determinant is not multiplicative"));
            }
            if !is_unit(&w, g) {
                failures.push(format!("{tag}: sample is not a unit"));
            }
            checked += 1;
        }
    }
    if checked != 200 {
        failures.push(format!("checked {checked} units, expected 200"));
    }
    let secs = start.elapsed().as_secs_f64();
    conclude(
        6,
        &format!("multiplicative sigma-fixed unit-valued determinant, Galois norm on scalars, class action matches, 200 units, {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_7_exterior_power_dimensions_and_top_character() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // j = 0 would be the zero module (no torsion), where the binomial
    // dimension counts have nothing to measure; the grid starts at 1.
    for &p in &[2u64, 3, 5] {
        for d in 1..=4usize {
            for j in 1..=2usize {
                for q in 1..=d {
                    let precision = (j.max(1) + q - 1) as u32;
                    let m = honda_module(p, d, j, precision).unwrap();
                    let ext = exterior_power(&m, q).unwrap();
                    let tag = format!("p={p} d={d} j={j} q={q}");
                    if ext.rank() != binom(d, q) {
                        failures.push(format!(
                            "{tag}: rank {} instead of {}",
                            ext.rank(),
                            binom(d, q)
                        ));
                    }
                    if lie_dimension(&ext) != binom(d - 1, q - 1) {
                        failures.push(format!(
                            "{tag}: tangent dimension {} instead of {}",
                            lie_dimension(&ext),
                            binom(d - 1, q - 1)
                        ));
                    }
                }
            }
            // Top power: a unit's induced action on the one-line module
            // is exactly its determinant.
            let w = build_witt(p, d, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7 * p + d as u64);
            for i in 0..5 {
                let g = random_unit(&w, &mut rng);
                let mat = left_mult_matrix(&w, &g).unwrap();
                let induced = operator_exterior_power(&w, &mat, d);
                let det_g = determinant(&w, &g).unwrap();
                if induced.len() != 1 || induced[0].len() != 1 {
                    failures.push(format!("p={p} d={d}: top power is not one line"));
                } else if induced[0][0] != det_g {
                    failures.push(format!(
                        "p={p} d={d} unit {i}: top-power action {:?} differs from determinant {det_g:?}",
                        induced[0][0]
                    ));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    conclude(
        7,
        &format!("exterior ranks binom(d,q), tangent dims binom(d-1,q-1), top power acts by the determinant, {secs:.1}s"),
        failures,
    );
}

#[test]
fn criterion_8_derived_limits_agree_and_vanish() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let primes = [2u64, 3, 5];
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for i in 0..20usize {
        let p = primes[i % primes.len()];
        let field = build_field(p, 1).unwrap();
        let c = curve_coalgebra(&field, 6).unwrap();
        let window = 3 + i % 4;
        let levels = 2 + i % 3;
        let tail = if i % 2 == 0 {
            TailPolicy::ConstantAfterLast
        } else {
            TailPolicy::ZeroAfterLast
        };
        let tag = format!("tower {i} (p={p}, window={window}, levels={levels}, {tail:?})");
        let base =
            random_module_tower(&field, window, levels, 2, tail, &mut rng).unwrap();
        let extended = extend_tower(&base, &c).unwrap();
        let comparison = compare_derived_limits(&extended, 2, MODE).unwrap();
        if !comparison.agree {
            failures.push(format!(
                "{tag}: cobar route {:?} differs from two-term route {:?}",
                comparison.cobar, comparison.two_term
            ));
        }
        if comparison.two_term[1..]
            .iter()
            .any(|row| row.iter().any(|&v| v != 0))
        {
            failures.push(format!(
                "{tag}: higher derived classes survive: {:?}",
                comparison.two_term
            ));
        }
        let underlying = extended.underlying().unwrap();
        let exact = milnor_exact(&underlying);
        if exact.iter().any(|&ok| !ok) {
            failures.push(format!("{tag}: six-term limit sequence imbalanced: {exact:?}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    conclude(
        8,
        &format!("cobar and two-term routes agree with nothing above row zero, Milnor exactness degreewise, 20 towers, {secs:.1}s"),
        failures,
    );
}

struct MatrixJob {
    name: &'static str,
    config: &'static str,
    expected_rows: fn() -> Vec<(u64, u64, u64)>,
}

fn to_rows(cells: Vec<(usize, usize, usize)>) -> Vec<(u64, u64, u64)> {
    cells
        .into_iter()
        .map(|(s, n, v)| (s as u64, n as u64, v as u64))
        .collect()
}

fn mono_rows(monomials: Vec<(usize, usize, u64)>) -> Vec<(u64, u64, u64)> {
    monomials
        .into_iter()
        .map(|(i, j, c)| (i as u64, j as u64, c))
        .collect()
}

fn matrix_jobs() -> Vec<MatrixJob> {
    vec![
        MatrixJob {
            name: "cotor",
            config: "job = cotor\np = 3\nT = 8\nwindow = 8\nj = 1\n",
            expected_rows: || {
                let field = build_field(3, 1).unwrap();
                let c = curve_coalgebra(&field, 8).unwrap();
                let k = trivial_comodule(&c).unwrap();
                let m = cotensor_power(&c, 1, 8, MODE).unwrap().final_level().clone();
                to_rows(cotor(&k, &c, &m, 8, MODE).unwrap().nonzero_cells())
            },
        },
        MatrixJob {
            name: "annular",
            config: "job = annular\np = 5\nT = 9\nj = 2\nq = 4\nwindow = 9\n",
            expected_rows: || {
                let field = build_field(5, 1).unwrap();
                let c = curve_coalgebra(&field, 9).unwrap();
                let rep = annular_stratum(&c, 2, 4, 9, MODE).unwrap();
                rep.dims
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0)
                    .map(|(g, &v)| (0, g as u64, v as u64))
                    .collect()
            },
        },
        MatrixJob {
            name: "coskeletal",
            config: "job = coskeletal\np = 3\nT = 6\nj = 1\nN = 8\nwindow = 6\n",
            expected_rows: || {
                let field = build_field(3, 1).unwrap();
                let c = curve_coalgebra(&field, 6).unwrap();
                let k = trivial_comodule(&c).unwrap();
                let m = cotensor_power(&c, 1, 6, MODE).unwrap().final_level().clone();
                let page = coskeletal_page(&k, &c, &m, 6, 8, 6, MODE).unwrap();
                let mut rows = Vec::new();
                for (s, line) in page.cells.iter().enumerate() {
                    for (t, cell) in line.iter().enumerate() {
                        if let Some(v) = cell {
                            rows.push((s as u64, t as u64, *v as u64));
                        }
                    }
                }
                rows
            },
        },
        MatrixJob {
            name: "koszul",
            config: "job = koszul\np = 2\nT = 7\nwindow = 7\n",
            expected_rows: || {
                let field = build_field(2, 1).unwrap();
                let c = curve_coalgebra(&field, 7).unwrap();
                to_rows(koszul_roundtrip(&c, 7, MODE).unwrap().algebra_cells)
            },
        },
        MatrixJob {
            name: "fgl",
            config: "job = fgl\np = 3\nd = 2\nT = 12\nN = 2\n",
            expected_rows: || {
                let law = honda_fgl(3, 2, 12, 2).unwrap();
                mono_rows(law.f().monomials())
            },
        },
        MatrixJob {
            name: "pseries",
            config: "job = pseries\np = 2\nd = 2\nj = 1\nT = 6\nN = 2\n",
            expected_rows: || {
                let law = honda_fgl(2, 2, 6, 2).unwrap();
                mono_rows(p_series(&law, 1, 6).unwrap().series.monomials())
            },
        },
        MatrixJob {
            name: "det",
            config: "job = det\np = 3\nd = 2\nN = 2\nseed = 17\n",
            expected_rows: Vec::new,
        },
        MatrixJob {
            name: "betastar",
            config: "job = betastar\np = 5\nd = 2\nN = 2\nseed = 23\n",
            expected_rows: Vec::new,
        },
        MatrixJob {
            name: "dieudonne",
            config: "job = dieudonne\np = 3\nd = 3\nj = 1\nq = 2\n",
            expected_rows: Vec::new,
        },
        MatrixJob {
            name: "prolim",
            config: "job = prolim\np = 2\nT = 5\nwindow = 4\nN = 3\nseed = 29\n",
            expected_rows: || {
                let field = build_field(2, 1).unwrap();
                let c = curve_coalgebra(&field, 5).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(29);
                let base = random_module_tower(
                    &field,
                    4,
                    3,
                    2,
                    TailPolicy::ConstantAfterLast,
                    &mut rng,
                )
                .unwrap();
                let extended = extend_tower(&base, &c).unwrap();
                let comparison = compare_derived_limits(&extended, 2, MODE).unwrap();
                let mut rows = Vec::new();
                for (s, line) in comparison.cobar.iter().enumerate() {
                    for (n, &v) in line.iter().enumerate() {
                        if v != 0 {
                            rows.push((s as u64, n as u64, v as u64));
                        }
                    }
                }
                rows
            },
        },
    ]
}

fn run_cli(config: &Path, out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_cotorlab"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success(), "binary failed on {}", config.display());
}

#[test]
fn criterion_9_cli_determinism_and_library_agreement() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    for job in matrix_jobs() {
        let config = dir.path().join(format!("{}.conf", job.name));
        std::fs::write(&config, job.config).unwrap();
        let first = dir.path().join(format!("{}-1.json", job.name));
        let second = dir.path().join(format!("{}-2.json", job.name));
        run_cli(&config, &first);
        run_cli(&config, &second);
        let bytes = std::fs::read(&first).unwrap();
        if bytes != std::fs::read(&second).unwrap() {
            failures.push(format!("{}: reruns differ", job.name));
        }
        let artifact: cotorlab_cli::artifact::Artifact =
            serde_json::from_slice(&bytes).unwrap();
        let expected = (job.expected_rows)();
        if artifact.result.bigraded_dims != expected {
            failures.push(format!(
                "{}: artifact rows {:?} differ from library rows {:?}",
                job.name, artifact.result.bigraded_dims, expected
            ));
        }
        if artifact.result.verdicts.values().any(|&ok| !ok) && job.name != "cotor" {
            failures.push(format!(
                "{}: failing verdicts {:?}",
                job.name, artifact.result.verdicts
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    conclude(
        9,
        &format!("byte-identical reruns and library-equal rows across the 10-job matrix, {secs:.1}s"),
        failures,
    );
}
