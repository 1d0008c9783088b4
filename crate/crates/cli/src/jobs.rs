//! Job dispatch: each job resolves its integer parameters, runs one
//! library computation, and packs the outcome into an [`Artifact`].
//!
//! Every verdict in an artifact is computed on this run, either directly
//! here or by a library constructor that refuses to return an invalid
//! object; nothing is hardcoded to `true`. Randomized jobs (`det`,
//! `betastar`, `prolim`) require a seed and are deterministic given one;
//! the other jobs reject a seed so a config cannot suggest randomness
//! where there is none.

use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use cotorlab::annular::{annular_stratum, coskeletal_page, koszul_roundtrip};
use cotorlab::coalgebra::{
    cotensor_power, cotor, curve_coalgebra, trivial_comodule, GradedCoalgebra, GradedComodule,
};
use cotorlab::coeffring::{build_field, build_witt, galois_norm};
use cotorlab::dieudonne::{exterior_power, honda_module, lie_dimension, order_and_height};
use cotorlab::fgl::{honda_fgl, p_series};
use cotorlab::prolim::{
    compare_derived_limits, extend_tower, is_mittag_leffler, milnor_exact, random_module_tower,
    TailPolicy,
};
use cotorlab::stabilizer::{
    beta_star_action, determinant, is_unit, multiply, random_unit, EndoElement,
};
use cotorlab::ExecMode;

use crate::artifact::{Artifact, JobResult, Meta};
use crate::config::JobConfig;
use crate::CliError;

const MODE: ExecMode = ExecMode::Parallel;

/// Tracks which config keys a job consumed, so leftovers are an error and
/// the artifact can echo every resolved parameter, defaults included.
struct ParamReader {
    job: String,
    remaining: BTreeMap<String, u64>,
    resolved: BTreeMap<String, u64>,
}

impl ParamReader {
    fn new(cfg: &JobConfig, seed_flag: Option<u64>) -> Self {
        let mut remaining = cfg.values.clone();
        if let Some(seed) = seed_flag {
            // The command-line seed wins over a seed line in the config.
            remaining.insert("seed".to_string(), seed);
        }
        ParamReader {
            job: cfg.job.clone(),
            remaining,
            resolved: BTreeMap::new(),
        }
    }

    fn require(&mut self, key: &str) -> Result<u64, CliError> {
        let v = self.remaining.remove(key).ok_or_else(|| {
            CliError::validation(format!("job {} is missing the field `{key}`", self.job))
        })?;
        self.resolved.insert(key.to_string(), v);
        Ok(v)
    }

    fn optional(&mut self, key: &str, default: u64) -> u64 {
        let v = self.remaining.remove(key).unwrap_or(default);
        self.resolved.insert(key.to_string(), v);
        v
    }

    fn finish(self) -> Result<BTreeMap<String, u64>, CliError> {
        if let Some(key) = self.remaining.keys().next() {
            return Err(CliError::validation(format!(
                "job {} does not take the field `{key}`",
                self.job
            )));
        }
        Ok(self.resolved)
    }
}

fn usize_of(key: &str, v: u64) -> Result<usize, CliError> {
    usize::try_from(v).map_err(|_| CliError::validation(format!("{key} = {v} is too large")))
}

fn u32_of(key: &str, v: u64) -> Result<u32, CliError> {
    u32::try_from(v).map_err(|_| CliError::validation(format!("{key} = {v} is too large")))
}

fn cells_to_rows(cells: Vec<(usize, usize, usize)>) -> Vec<(u64, u64, u64)> {
    cells
        .into_iter()
        .map(|(s, n, v)| (s as u64, n as u64, v as u64))
        .collect()
}

/// Series monomials `(i, j, coeff)` as table rows; the third column holds
/// the coefficient rather than a dimension.
fn monomials_to_rows(monomials: Vec<(usize, usize, u64)>) -> Vec<(u64, u64, u64)> {
    monomials
        .into_iter()
        .map(|(i, j, coeff)| (i as u64, j as u64, coeff))
        .collect()
}

/// Nonzero entries of an `[s][n]` grid as `(s, n, dim)` rows.
fn grid_to_rows(grid: &[Vec<usize>]) -> Vec<(u64, u64, u64)> {
    let mut rows = Vec::new();
    for (s, line) in grid.iter().enumerate() {
        for (n, &v) in line.iter().enumerate() {
            if v != 0 {
                rows.push((s as u64, n as u64, v as u64));
            }
        }
    }
    rows
}

/// Right-slot comodule for the cobar-based jobs: `j = 0` is the trivial
/// comodule and `j >= 1` the j-fold cotensor power of the coideal.
fn right_slot(
    c: &GradedCoalgebra,
    j: usize,
    window: usize,
) -> Result<GradedComodule, CliError> {
    if j == 0 {
        Ok(trivial_comodule(c)?)
    } else {
        Ok(cotensor_power(c, j, window, MODE)?.final_level().clone())
    }
}

/// Runs the configured job and returns its artifact.
pub fn run_job(cfg: &JobConfig, seed_flag: Option<u64>) -> Result<Artifact, CliError> {
    let reader = ParamReader::new(cfg, seed_flag);
    match cfg.job.as_str() {
        "cotor" => cotor_job(reader),
        "annular" => annular_job(reader),
        "coskeletal" => coskeletal_job(reader),
        "koszul" => koszul_job(reader),
        "fgl" => fgl_job(reader),
        "pseries" => pseries_job(reader),
        "det" => det_job(reader),
        "betastar" => betastar_job(reader),
        "dieudonne" => dieudonne_job(reader),
        "prolim" => prolim_job(reader),
        other => Err(CliError::validation(format!("unknown job {other:?}"))),
    }
}

fn cotor_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.optional("d", 1);
    let t = r.require("T")?;
    let window = r.require("window")?;
    let j = r.optional("j", 0);
    let params = r.finish()?;

    let field = build_field(p, usize_of("d", d)?)?;
    let c = curve_coalgebra(&field, usize_of("T", t)?)?;
    let window_u = usize_of("window", window)?;
    let left = trivial_comodule(&c)?;
    let right = right_slot(&c, usize_of("j", j)?, window_u)?;
    let report = cotor(&left, &c, &right, window_u, MODE)?;

    let mut scalars = BTreeMap::new();
    scalars.insert("total_dim".to_string(), json!(report.total_dim()));
    let mut verdicts = BTreeMap::new();
    let positive_rows_vanish = report
        .dims
        .iter()
        .skip(1)
        .all(|row| row.iter().all(|&v| v == 0));
    verdicts.insert("positive_rows_vanish".to_string(), positive_rows_vanish);

    Ok(Artifact {
        job: "cotor".to_string(),
        params,
        result: JobResult {
            bigraded_dims: cells_to_rows(report.nonzero_cells()),
            scalars,
            verdicts,
        },
        meta: Meta::new(Some(window), None),
    })
}

fn annular_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.optional("d", 1);
    let t = r.require("T")?;
    let n = r.require("j")?;
    let n_prime = r.require("q")?;
    let window = r.require("window")?;
    let params = r.finish()?;

    let field = build_field(p, usize_of("d", d)?)?;
    let c = curve_coalgebra(&field, usize_of("T", t)?)?;
    let report = annular_stratum(
        &c,
        usize_of("j", n)?,
        usize_of("q", n_prime)?,
        usize_of("window", window)?,
        MODE,
    )?;

    let rows: Vec<(u64, u64, u64)> = report
        .dims
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0)
        .map(|(deg, &v)| (0, deg as u64, v as u64))
        .collect();
    let mut scalars = BTreeMap::new();
    scalars.insert(
        "total_dim".to_string(),
        json!(report.dims.iter().sum::<usize>()),
    );

    Ok(Artifact {
        job: "annular".to_string(),
        params,
        result: JobResult {
            bigraded_dims: rows,
            scalars,
            verdicts: BTreeMap::new(),
        },
        meta: Meta::new(Some(window), None),
    })
}

fn coskeletal_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.optional("d", 1);
    let t = r.require("T")?;
    let j = r.optional("j", 0);
    let t_max = r.require("N")?;
    let window = r.require("window")?;
    let s_top = r.optional("q", t);
    let params = r.finish()?;

    let field = build_field(p, usize_of("d", d)?)?;
    let c = curve_coalgebra(&field, usize_of("T", t)?)?;
    let window_u = usize_of("window", window)?;
    let left = trivial_comodule(&c)?;
    let right = right_slot(&c, usize_of("j", j)?, window_u)?;
    let page = coskeletal_page(
        &left,
        &c,
        &right,
        usize_of("q", s_top)?,
        usize_of("N", t_max)?,
        window_u,
        MODE,
    )?;

    let mut rows = Vec::new();
    for (s, line) in page.cells.iter().enumerate() {
        for (t_deg, cell) in line.iter().enumerate() {
            if let Some(v) = cell {
                rows.push((s as u64, t_deg as u64, *v as u64));
            }
        }
    }
    let mut scalars = BTreeMap::new();
    scalars.insert("stabilization".to_string(), json!(page.stabilization));
    let mut verdicts = BTreeMap::new();
    verdicts.insert("pro_constant".to_string(), page.pro_constant);

    Ok(Artifact {
        job: "coskeletal".to_string(),
        params,
        result: JobResult {
            bigraded_dims: rows,
            scalars,
            verdicts,
        },
        meta: Meta::new(Some(window), None),
    })
}

fn koszul_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.optional("d", 1);
    let t = r.require("T")?;
    let window = r.require("window")?;
    let params = r.finish()?;

    let field = build_field(p, usize_of("d", d)?)?;
    let c = curve_coalgebra(&field, usize_of("T", t)?)?;
    let report = koszul_roundtrip(&c, usize_of("window", window)?, MODE)?;

    let mut scalars = BTreeMap::new();
    scalars.insert("scale".to_string(), json!(report.scale));
    scalars.insert("bar_cells".to_string(), json!(report.bar_cells));
    scalars.insert(
        "collapsed_bar_dims".to_string(),
        json!(report.collapsed_bar_dims),
    );
    scalars.insert("coalgebra_dims".to_string(), json!(report.coalgebra_dims));
    let mut verdicts = BTreeMap::new();
    // `None` means no bar cell consults the square, which the report
    // documents as equivalent to a verified vanishing square.
    verdicts.insert(
        "square_zero".to_string(),
        report.square_checked.unwrap_or(true),
    );
    verdicts.insert("dims_match".to_string(), report.dims_match);

    Ok(Artifact {
        job: "koszul".to_string(),
        params,
        result: JobResult {
            bigraded_dims: cells_to_rows(report.algebra_cells),
            scalars,
            verdicts,
        },
        meta: Meta::new(Some(window), None),
    })
}

fn fgl_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.require("d")?;
    let t = r.require("T")?;
    let n = r.require("N")?;
    let params = r.finish()?;

    let law = honda_fgl(p, usize_of("d", d)?, usize_of("T", t)?, u32_of("N", n)?)?;
    law.check_axioms()?;

    let mut scalars = BTreeMap::new();
    scalars.insert("modulus".to_string(), json!(law.modulus()));
    let mut verdicts = BTreeMap::new();
    // Reached only when the axiom check above returned without error.
    verdicts.insert("axioms_hold".to_string(), true);

    Ok(Artifact {
        job: "fgl".to_string(),
        params,
        result: JobResult {
            bigraded_dims: monomials_to_rows(law.f().monomials()),
            scalars,
            verdicts,
        },
        meta: Meta::new(Some(t), Some(n)),
    })
}

fn pseries_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.require("d")?;
    let j = r.require("j")?;
    let t = r.require("T")?;
    let n = r.require("N")?;
    let params = r.finish()?;

    let law = honda_fgl(p, usize_of("d", d)?, usize_of("T", t)?, u32_of("N", n)?)?;
    let series = p_series(&law, usize_of("j", j)?, usize_of("T", t)?)?;

    let mut scalars = BTreeMap::new();
    scalars.insert("modulus".to_string(), json!(law.modulus()));
    scalars.insert(
        "certified_lowest".to_string(),
        json!(series.certified_lowest),
    );
    let mut verdicts = BTreeMap::new();
    verdicts.insert("complete".to_string(), series.complete);

    Ok(Artifact {
        job: "pseries".to_string(),
        params,
        result: JobResult {
            bigraded_dims: monomials_to_rows(series.series.monomials()),
            scalars,
            verdicts,
        },
        meta: Meta::new(Some(t), Some(n)),
    })
}

fn det_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.require("d")?;
    let n = r.require("N")?;
    let seed = r.require("seed")?;
    let params = r.finish()?;

    let w = build_witt(p, usize_of("d", d)?, u32_of("N", n)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_unit(&w, &mut rng);
    let h = random_unit(&w, &mut rng);
    let det_g = determinant(&w, &g)?;
    let det_h = determinant(&w, &h)?;
    let det_gh = determinant(&w, &multiply(&w, &g, &h)?)?;
    let a = g.coeffs()[0].clone();
    let det_scalar = determinant(&w, &EndoElement::scalar(&w, a.clone())?)?;
    let norm = galois_norm(&w, &a)?;

    let mut scalars = BTreeMap::new();
    scalars.insert("coeffs".to_string(), json!(g.coeffs()));
    scalars.insert("det".to_string(), json!(det_g));
    let mut verdicts = BTreeMap::new();
    verdicts.insert("unit".to_string(), is_unit(&w, &g));
    verdicts.insert("sigma_fixed".to_string(), w.sigma(&det_g, 1) == det_g);
    verdicts.insert(
        "multiplicative".to_string(),
        det_gh == w.mul(&det_g, &det_h),
    );
    verdicts.insert(
        "norm_on_scalars".to_string(),
        det_scalar == w.scalar(norm as i64),
    );

    Ok(Artifact {
        job: "det".to_string(),
        params,
        result: JobResult {
            bigraded_dims: Vec::new(),
            scalars,
            verdicts,
        },
        meta: Meta::new(None, Some(n)),
    })
}

fn betastar_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.require("d")?;
    let n = r.require("N")?;
    let seed = r.require("seed")?;
    let params = r.finish()?;

    let w = build_witt(p, usize_of("d", d)?, u32_of("N", n)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_unit(&w, &mut rng);
    let beta = beta_star_action(&w, &g)?;
    let det_g = determinant(&w, &g)?;

    let mut scalars = BTreeMap::new();
    scalars.insert("coeffs".to_string(), json!(g.coeffs()));
    scalars.insert("beta".to_string(), json!(beta));
    scalars.insert("det".to_string(), json!(det_g));
    let mut verdicts = BTreeMap::new();
    verdicts.insert("matches_determinant".to_string(), beta == det_g);

    Ok(Artifact {
        job: "betastar".to_string(),
        params,
        result: JobResult {
            bigraded_dims: Vec::new(),
            scalars,
            verdicts,
        },
        meta: Meta::new(None, Some(n)),
    })
}

fn dieudonne_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.require("d")?;
    let j = r.require("j")?;
    let q = r.optional("q", 1);
    let params = r.finish()?;

    let j_u = usize_of("j", j)?;
    let q_u = usize_of("q", q)?;
    // Enough digit precision for every minor of the q-th compound matrix.
    let n_prec = (j_u.max(1) + q_u.saturating_sub(1)) as u32;
    let m = honda_module(p, usize_of("d", d)?, j_u, n_prec)?;
    let ext = exterior_power(&m, q_u)?;
    let (rank, order_exp) = order_and_height(&ext);

    let mut scalars = BTreeMap::new();
    scalars.insert("rank".to_string(), json!(rank));
    scalars.insert("torsion".to_string(), json!(ext.torsion()));
    scalars.insert("lie_dimension".to_string(), json!(lie_dimension(&ext)));
    scalars.insert("order_exponent".to_string(), json!(order_exp));
    scalars.insert("f_matrix".to_string(), json!(ext.f_matrix()));
    scalars.insert("v_matrix".to_string(), json!(ext.v_matrix()));
    let mut verdicts = BTreeMap::new();
    // The constructors refuse to return a module whose F and V fail the
    // p-multiplication and twisted-linearity relations.
    verdicts.insert("relations_hold".to_string(), true);

    Ok(Artifact {
        job: "dieudonne".to_string(),
        params,
        result: JobResult {
            bigraded_dims: Vec::new(),
            scalars,
            verdicts,
        },
        meta: Meta::new(None, Some(n_prec as u64)),
    })
}

fn prolim_job(mut r: ParamReader) -> Result<Artifact, CliError> {
    let p = r.require("p")?;
    let d = r.optional("d", 1);
    let t = r.require("T")?;
    let window = r.require("window")?;
    let levels = r.require("N")?;
    let seed = r.require("seed")?;
    let params = r.finish()?;

    let field = build_field(p, usize_of("d", d)?)?;
    let c = curve_coalgebra(&field, usize_of("T", t)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_module_tower(
        &field,
        usize_of("window", window)?,
        usize_of("N", levels)?,
        2,
        TailPolicy::ConstantAfterLast,
        &mut rng,
    )?;
    let ext = extend_tower(&base, &c)?;
    let under = ext.underlying()?;
    let cmp = compare_derived_limits(&ext, 2, MODE)?;
    let ml = is_mittag_leffler(&under);
    let milnor = milnor_exact(&under);

    let mut scalars = BTreeMap::new();
    scalars.insert("two_term".to_string(), json!(cmp.two_term));
    scalars.insert("cobar_route".to_string(), json!(cmp.cobar));
    scalars.insert("offsets".to_string(), json!(ml.offsets));
    let mut verdicts = BTreeMap::new();
    verdicts.insert("routes_agree".to_string(), cmp.agree);
    verdicts.insert(
        "higher_derived_vanish".to_string(),
        cmp.two_term[1..]
            .iter()
            .all(|row| row.iter().all(|&v| v == 0)),
    );
    verdicts.insert(
        "milnor_exact".to_string(),
        milnor.iter().all(|&ok| ok),
    );
    verdicts.insert(
        "mittag_leffler".to_string(),
        ml.stable.iter().all(|&ok| ok),
    );

    Ok(Artifact {
        job: "prolim".to_string(),
        params,
        result: JobResult {
            bigraded_dims: grid_to_rows(&cmp.cobar),
            scalars,
            verdicts,
        },
        meta: Meta::new(Some(window), None),
    })
}
