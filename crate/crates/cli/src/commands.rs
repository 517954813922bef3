use std::io::Write;
use std::path::{Path, PathBuf};

use adelic_qc::counterexample::Counterexample;
use adelic_qc::grid::GridField;
use adelic_qc::leaf::LeafCoefficient;
use adelic_qc::plane::{finite_difference_residual, normalize_fix01inf, PlaneSolver, SolverConfig};
use adelic_qc::renorm::{ren_norm, RenNormReport};
use adelic_qc::teich::{ab_extension, ab_extension_integral, d_id_phi, l_eval, l_prime, nag_verjovsky_mu};
use adelic_qc::tower::{level_coefficient, AdelicBeltrami, Tower, TowerConfig};
use adelic_qc::{Chain, Complex64};
use serde::Serialize;

use crate::formats::{self, ChainJson, GridDump, MuInput, SeriesJson};
use crate::{ChainArgs, CliError, Command, ExtendMethod, GridArgs, Suite, WindowArgs};

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Filter { mu, n, out } => filter(&mu, n, out.as_deref()),
        Command::Norm { mu, chain, out } => norm(&mu, &chain, out.as_deref()),
        Command::SolveLevel { mu, profile, chain, level, grid, out, csv, coefficient_out } => {
            let outs = SolveOutputs { map: out, csv, coefficient: coefficient_out };
            solve_level(&mu, &profile, &chain, level, &grid, &outs)
        }
        Command::Tower { mu, profile, chain, grid, reference_level, out, csv } => {
            tower(&mu, &profile, &chain, &grid, reference_level, out, csv)
        }
        Command::Extend { f, chain, window, method, out } => extend(&f, &chain, &window, method, out.as_deref()),
        Command::Nvmu { f, chain, window, linear, csv, out } => nvmu(&f, &chain, &window, linear, csv.as_deref(), out.as_deref()),
        Command::Verify { suite, n, out } => verify(suite, n, out.as_deref()),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::input(e.to_string())),
    }
}

fn chain_or_default(args: &ChainArgs) -> Result<Chain, CliError> {
    formats::parse_chain(args.chain.as_deref().unwrap_or("p=2"), args.depth)
}

fn series_only(mu: &str) -> Result<adelic_qc::PontryaginSeries, CliError> {
    match formats::parse_mu(mu)? {
        MuInput::Series(s) => Ok(s),
        _ => Err(CliError::input(format!("{mu:?} is not a series"))),
    }
}

fn filter(mu: &str, n: u64, out: Option<&Path>) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::input("n must be positive"));
    }
    emit(&SeriesJson::from_series(&series_only(mu)?.filter(n)), out)
}

#[derive(Serialize)]
struct NormJson {
    head: f64,
    terms: Vec<f64>,
    total: f64,
    tail_flag: &'static str,
}

impl From<RenNormReport> for NormJson {
    fn from(r: RenNormReport) -> Self {
        NormJson { head: r.head, terms: r.terms, total: r.total, tail_flag: r.tail_flag.as_str() }
    }
}

fn norm(mu: &str, chain: &ChainArgs, out: Option<&Path>) -> Result<(), CliError> {
    let report = match formats::parse_mu(mu)? {
        MuInput::Series(s) => ren_norm(&s, &chain_or_default(chain)?),
        // The fixture lives on its own factorial chain.
        MuInput::Counterexample(ce) => ce.ren_norm(&ce.default_sup_grid())?,
        MuInput::Disk(_) => return Err(CliError::input("disk fixtures have no renormalized norm")),
    };
    emit(&NormJson::from(report), out)
}

fn solver_config(g: &GridArgs) -> Result<SolverConfig, CliError> {
    if g.tol.is_nan() || g.tol <= 0.0 || g.max_iter == 0 || g.half_width.is_nan() || g.half_width <= 0.0 {
        return Err(CliError::input("tolerance, iteration cap and half width must be positive"));
    }
    Ok(SolverConfig { tol: g.tol, max_iter: g.max_iter })
}

fn beltrami(mu: &str, profile: &str, chain: &ChainArgs) -> Result<AdelicBeltrami, CliError> {
    let s = series_only(mu)?;
    let eta = LeafCoefficient::from_series(&s, formats::parse_profile(profile)?)?;
    Ok(AdelicBeltrami::new(eta, chain_or_default(chain)?)?)
}

#[derive(Serialize)]
struct SolveJson {
    level: Option<u64>,
    grid: usize,
    half_width: f64,
    iterations: usize,
    update: f64,
    residual: f64,
    fd_residual: f64,
    jacobian_positive_fraction: f64,
    f_at_2: [f64; 2],
}

struct SolveOutputs {
    map: Option<PathBuf>,
    csv: Option<PathBuf>,
    coefficient: Option<PathBuf>,
}

fn solve_level(mu: &str, profile: &str, chain: &ChainArgs, level: usize, g: &GridArgs, outs: &SolveOutputs) -> Result<(), CliError> {
    let cfg = solver_config(g)?;
    let (field, n) = match formats::parse_mu(mu)? {
        MuInput::Disk(k) => (GridField::disk_indicator(g.half_width, g.grid, 1.0, Complex64::new(k, 0.0))?, None),
        MuInput::Series(_) => {
            let b = beltrami(mu, profile, chain)?;
            let n = *b.chain().levels().get(level).ok_or_else(|| CliError::input(format!("no level index {level}")))?;
            (level_coefficient(&b, level, g.half_width, g.grid)?, Some(n))
        }
        MuInput::Counterexample(_) => return Err(CliError::input("the counterexample has no compact level support")),
    };
    if let Some(p) = &outs.coefficient {
        GridDump::from_field(&field).write(p)?;
    }
    let f = normalize_fix01inf(&PlaneSolver::new(g.half_width, g.grid)?.solve(&field, &cfg)?)?;
    let dump = GridDump::from_map(&f);
    if let Some(p) = &outs.map {
        dump.write(p)?;
    }
    if let Some(p) = &outs.csv {
        dump.write_csv(p)?;
    }
    let stats = f.stats();
    let at2 = f.eval(Complex64::new(2.0, 0.0));
    emit(
        &SolveJson {
            level: n,
            grid: g.grid,
            half_width: g.half_width,
            iterations: stats.iterations,
            update: stats.update,
            residual: stats.residual,
            fd_residual: finite_difference_residual(&f, &field),
            jacobian_positive_fraction: f.jacobian_positive_fraction(),
            f_at_2: [at2.re, at2.im],
        },
        None,
    )
}

#[derive(Serialize)]
struct TowerJson {
    chain: ChainJson,
    reference_level: u64,
    solved_at: Vec<usize>,
    diffs: Vec<f64>,
    bound_terms: Vec<f64>,
    m_l_est: f64,
    a_prime_est: Option<f64>,
    violations: Vec<usize>,
}

fn tower(
    mu: &str,
    profile: &str,
    chain: &ChainArgs,
    g: &GridArgs,
    reference_level: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<(), CliError> {
    let b = beltrami(mu, profile, chain)?;
    if b.chain().depth() < 2 {
        return Err(CliError::input("tower runs need a chain of depth at least 2"));
    }
    let config = TowerConfig { half_width: g.half_width, grid: g.grid, solver: solver_config(g)?, reference_level };
    let chain_json = ChainJson::from_chain(b.chain());
    let t = Tower::solve(b, config)?;
    let d = t.diagnostics()?;
    let levels: Vec<u64> = t.levels().iter().map(|l| l.n).collect();
    let csv = csv.or_else(|| out.as_ref().map(|p| p.with_extension("csv")));
    if let Some(p) = &csv {
        let rows = (0..d.diffs.len()).map(|i| [i as f64, levels[i] as f64, levels[i + 1] as f64, d.diffs[i], d.bound_terms[i]]);
        formats::write_csv(p, &["i", "n_i", "n_next", "d_i", "bound_i"], rows)?;
    }
    let report = TowerJson {
        chain: chain_json,
        reference_level: d.reference_level,
        solved_at: t.levels().iter().map(|l| l.solved_at).collect(),
        diffs: d.diffs,
        bound_terms: d.bound_terms,
        m_l_est: d.m_l_est,
        a_prime_est: d.a_prime_est,
        violations: d.violations.clone(),
    };
    emit(&report, out.as_deref())?;
    if !d.violations.is_empty() {
        return Err(CliError::verification(format!("differences exceed their bound terms at {:?}", d.violations)));
    }
    Ok(())
}

fn window_points(w: &WindowArgs) -> Result<Vec<(f64, f64)>, CliError> {
    if w.nx == 0 || w.ny == 0 || [w.x0, w.x1, w.y0, w.y1].iter().any(|v| v.is_nan()) || w.x1 < w.x0 || w.y1 < w.y0 {
        return Err(CliError::input("empty sampling window"));
    }
    let at = |a: f64, b: f64, k: usize, m: usize| if m == 1 { a } else { a + (b - a) * k as f64 / (m - 1) as f64 };
    Ok((0..w.ny)
        .flat_map(|j| (0..w.nx).map(move |i| (at(w.x0, w.x1, i, w.nx), at(w.y0, w.y1, j, w.ny))))
        .collect())
}

fn diffeo(f: &str, chain: &ChainArgs) -> Result<adelic_qc::teich::SolenoidDiffeo, CliError> {
    let fallback = chain.chain.as_deref().map(|c| formats::parse_chain(c, chain.depth)).transpose()?;
    formats::parse_diffeo(f, fallback)
}

fn extend(f: &str, chain: &ChainArgs, w: &WindowArgs, method: ExtendMethod, out: Option<&Path>) -> Result<(), CliError> {
    let f = diffeo(f, chain)?;
    let rows = window_points(w)?.into_iter().map(|(x, y)| {
        let z = Complex64::new(x, y);
        let v = match method {
            ExtendMethod::Series => ab_extension(&f, z),
            ExtendMethod::Integral => ab_extension_integral(&f, z, 1e-12),
        };
        [x, y, v.re, v.im]
    });
    let header = ["x", "y", "re", "im"];
    match out {
        Some(p) => formats::write_csv(p, &header, rows),
        None => formats::write_csv_to(std::io::stdout().lock(), &header, rows)
            .map_err(|e| CliError::input(e.to_string())),
    }
}

#[derive(Serialize)]
struct NvJson {
    linear: bool,
    certificate: f64,
    bound: Option<f64>,
    sup_grid: f64,
}

fn nvmu(f: &str, chain: &ChainArgs, w: &WindowArgs, linear: bool, csv: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let f = diffeo(f, chain)?;
    let nv = if linear { d_id_phi(f.h())? } else { nag_verjovsky_mu(&f)? };
    let pts = window_points(w)?;
    let vals: Vec<Complex64> = pts.iter().map(|&(x, y)| nv.eval(x, y)).collect();
    if let Some(p) = csv {
        formats::write_csv(p, &["x", "y", "re", "im"], pts.iter().zip(&vals).map(|(&(x, y), v)| [x, y, v.re, v.im]))?;
    }
    let sup_grid = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bound = nv.bound.is_finite().then_some(nv.bound);
    emit(&NvJson { linear, certificate: nv.certificate, bound, sup_grid }, out)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    value: f64,
    limit: f64,
}

#[derive(Serialize)]
struct VerifyJson {
    suite: &'static str,
    pass: bool,
    checks: Vec<Check>,
}

fn verify(suite: Suite, n: usize, out: Option<&Path>) -> Result<(), CliError> {
    let report = match suite {
        Suite::Counterexample => verify_counterexample(n)?,
        Suite::Kernel => verify_kernel(),
    };
    emit(&report, out)?;
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::verification(format!("failed checks: {}", failed.join(", "))))
    }
}

fn verify_counterexample(n: usize) -> Result<VerifyJson, CliError> {
    let ce = Counterexample::new(n)?;
    let top = ce.chain().top() as f64;
    let span = std::f64::consts::TAU * top;
    let mut residual = 0.0f64;
    for i in 0..100 {
        for j in 0..100 {
            let z = Complex64::new(span * (i as f64 + 0.5) / 100.0, 1.5 * top * (2.0 * (j as f64 + 0.5) / 100.0 - 1.0));
            let (wzb, wz) = ce.derivatives(z);
            residual = residual.max((wzb - ce.mu(z) * wz).norm());
        }
    }
    let e = std::f64::consts::E;
    let limit = (e - 1.0) / (e + 1.0);
    let grid = ce.default_sup_grid();
    let sup = ce.sup_grid_estimate(grid.x_per_turn, &grid.ys);
    let rep = ce.ren_norm(&grid)?;
    let floor = 1.0 / (8.0 * e);
    let min_term = rep.terms.iter().copied().fold(f64::INFINITY, f64::min);
    let admitted = ce.admission()?.is_admitted();
    let mut checks = vec![
        Check { name: "beltrami_residual", pass: residual <= 1e-10, value: residual, limit: 1e-10 },
        Check { name: "sup_grid", pass: sup < limit, value: sup, limit },
        Check { name: "sup_upper_bound", pass: ce.sup_upper_bound() < limit, value: ce.sup_upper_bound(), limit },
        Check { name: "rejected", pass: !admitted, value: f64::from(u8::from(admitted)), limit: 0.0 },
    ];
    if !rep.terms.is_empty() {
        checks.push(Check { name: "ren_terms_floor", pass: min_term >= floor, value: min_term, limit: floor });
    }
    Ok(VerifyJson { suite: "counterexample", pass: checks.iter().all(|c| c.pass), checks })
}

fn verify_kernel() -> VerifyJson {
    let m = 100_000;
    let worst = (0..m)
        .map(|k| -200.0 + 400.0 * (k as f64 + 0.5) / m as f64)
        .map(|x| {
            let (l, lp) = (l_eval(x), l_prime(x));
            (0.5 * (l + lp).abs()).max(0.5 * (l - lp).abs())
        })
        .fold(0.0, f64::max);
    let checks = vec![Check { name: "half_l_plus_minus_l_prime", pass: worst < 1.0, value: worst, limit: 1.0 }];
    VerifyJson { suite: "kernel", pass: checks.iter().all(|c| c.pass), checks }
}
