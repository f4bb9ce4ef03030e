use npspec_core::np_operator::{
    eigensolve, fd_multiplet_slopes, select_multiplet, sphere_np_eigenvalue, Assembler,
};
use npspec_core::spectral_sums::{adjudicate, half_sum};
use npspec_core::variation::{plasmon_slope, variation_matrix, within_tolerance};
use npspec_core::{HarmonicIndex, ShapeSpec};
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::error::{CliError, CliResult};
use crate::parallel::ParallelAssembler;
use crate::report::Report;

/// Bound on the finite-difference slope of a multiplet sum.
pub const SUM_SLOPE_TOL: f64 = 1e-6;

pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    match cfg.command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Variation => cmd_variation(cfg),
        Command::FdCheck => cmd_fd_check(cfg),
        Command::Zeta => cmd_zeta(cfg),
        Command::Halfsum => cmd_halfsum(cfg),
    }
}

fn shape(cfg: &RunConfig) -> CliResult<ShapeSpec> {
    cfg.shape
        .as_ref()
        .ok_or_else(|| CliError::Config("--shape is required".into()))?
        .to_shape()
        .map_err(CliError::at("shape"))
}

fn assembler(cfg: &RunConfig) -> CliResult<ParallelAssembler> {
    ParallelAssembler::new(cfg.threads).map_err(CliError::Config)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> CliResult<Report> {
    let mut rep = Report::new("spectrum", cfg, &["k", "slot", "lambda", "imag_residual"]);
    let kmax = cfg.kmax.unwrap_or(cfg.degree);
    if cfg.analytic {
        for k in 0..=kmax {
            let lam = sphere_np_eigenvalue(k);
            for slot in -(k as i64)..=k as i64 {
                rep.push_row(vec![json!(k), json!(slot), json!(lam), json!(0.0)]);
            }
        }
        rep.set("max_imag", 0.0);
        return Ok(rep);
    }
    if kmax > cfg.degree {
        return Err(CliError::Config(format!(
            "--kmax {kmax} exceeds the Galerkin degree {}",
            cfg.degree
        )));
    }
    let shape = shape(cfg)?;
    let system = assembler(cfg)?
        .assemble(&shape, &cfg.galerkin())
        .map_err(CliError::at("assembly"))?;
    let decomp = eigensolve(&system).map_err(CliError::at("eigensolve"))?;
    let mut max_dev: f64 = 0.0;
    for k in 0..=kmax {
        let m = select_multiplet(&decomp, k).map_err(CliError::at("multiplet tracking"))?;
        for (slot, &v) in (-(k as i64)..).zip(&m.values) {
            max_dev = max_dev.max((v - sphere_np_eigenvalue(k)).abs());
            rep.push_row(vec![json!(k), json!(slot), json!(v), json!(m.residual_imag)]);
        }
    }
    rep.set("max_imag", decomp.max_imag);
    rep.set("max_deviation_from_sphere", max_dev);
    rep.set("basis_len", system.matrix.nrows());
    if let Some(w) = decomp.warning {
        rep.notes.push(w);
    }
    Ok(rep)
}

pub fn cmd_variation(cfg: &RunConfig) -> CliResult<Report> {
    let k = cfg.k.ok_or_else(|| CliError::Config("--k is required".into()))?;
    let field = shape(cfg)?;
    let m = variation_matrix(k, &field, cfg.grid_override).map_err(CliError::at("variation"))?;
    let mut rep = Report::new("variation", cfg, &["l", "l_prime", "re", "im"]);
    for (r, jr) in HarmonicIndex::multiplet(k).enumerate() {
        for (c, jc) in HarmonicIndex::multiplet(k).enumerate() {
            let v = m.matrix[(r, c)];
            rep.push_row(vec![json!(jr.l()), json!(jc.l()), json!(v.re), json!(v.im)]);
        }
    }
    let lam = sphere_np_eigenvalue(k);
    let slopes = m.eigenvalues();
    let plasmon: Vec<f64> = slopes
        .iter()
        .map(|&s| plasmon_slope(lam, s))
        .collect::<Result<_, _>>()
        .map_err(CliError::at("plasmon map"))?;
    let trace = m.trace();
    let norm = m.norm();
    rep.set("k", k);
    rep.set("trace", trace);
    rep.set("norm", norm);
    rep.set("branch_slopes", &slopes);
    rep.set("plasmon_slopes", &plasmon);
    rep.set("plasmon_slope_sum", plasmon.iter().sum::<f64>());
    rep.set("quadrature_exactness", m.exactness);
    rep.set("pass", within_tolerance(trace, norm, cfg.tol));
    Ok(rep)
}

pub fn cmd_fd_check(cfg: &RunConfig) -> CliResult<Report> {
    let k = cfg.k.unwrap_or(1);
    let steps = cfg.h.clone().unwrap_or_else(|| vec![0.04, 0.02]);
    let field = shape(cfg)?;
    if k > cfg.degree {
        return Err(CliError::Config(format!(
            "--k {k} exceeds the Galerkin degree {}",
            cfg.degree
        )));
    }
    let m = variation_matrix(k, &field, None).map_err(CliError::at("variation"))?;
    let formula = m.eigenvalues();
    let fd = fd_multiplet_slopes(&assembler(cfg)?, &field, k, &steps, &cfg.galerkin())
        .map_err(CliError::at("finite differences"))?;
    let mut rep = Report::new(
        "fd-check",
        cfg,
        &["branch", "formula_slope", "fd_slope", "fd_raw_slope", "gap"],
    );
    let mut max_gap: f64 = 0.0;
    for (i, ((f, d), raw)) in formula.iter().zip(&fd.branch).zip(&fd.raw_branch).enumerate() {
        let gap = (f - d).abs();
        max_gap = max_gap.max(gap);
        rep.push_row(vec![json!(i), json!(f), json!(d), json!(raw), json!(gap)]);
    }
    rep.set("k", k);
    rep.set("steps", &fd.steps);
    rep.set("max_gap", max_gap);
    rep.set("formula_sum", m.trace());
    rep.set("fd_sum_slope", fd.sum);
    rep.set("fd_raw_sum_slope", fd.raw_sum);
    rep.set("sum_slope_tol", SUM_SLOPE_TOL);
    rep.set("pass", max_gap <= cfg.tol && fd.sum.abs() <= SUM_SLOPE_TOL);
    Ok(rep)
}

pub fn cmd_zeta(cfg: &RunConfig) -> CliResult<Report> {
    let p = cfg.p.ok_or_else(|| CliError::Config("--p is required".into()))?;
    let kmax = cfg.kmax.unwrap_or(1_000_000);
    let adj = adjudicate(p, kmax, cfg.tol).map_err(CliError::at("zeta"))?;
    let z = adj.partial;
    let mut rep = Report::new(
        "zeta",
        cfg,
        &[
            "p",
            "k_max",
            "partial_sum",
            "tail_lower",
            "tail_bound",
            "closed_form",
            "printed_variant",
            "closed_form_bracketed",
            "printed_variant_bracketed",
        ],
    );
    rep.push_row(vec![
        json!(p),
        json!(kmax),
        json!(z.partial_sum),
        json!(z.tail_lower),
        json!(z.tail_bound),
        json!(adj.closed_form),
        json!(adj.printed),
        json!(adj.closed_form_bracketed),
        json!(adj.printed_bracketed),
    ]);
    rep.set("closed_form_expr", "2^-p (1 - 2^(1-p)) zeta(p-1)");
    rep.set("printed_variant_expr", "2^-p (1 - 2^-p) zeta(p-1)");
    rep.set("printed_variant_gap", adj.printed - adj.closed_form);
    rep.set("bracket_width", z.tail_bound - z.tail_lower);
    rep.notes.push(format!(
        "the printed variant 2^-p(1-2^-p)zeta(p-1) differs from the direct sum by {:.6e} and is {} by the partial-sum bracket",
        adj.printed - adj.closed_form,
        if adj.printed_bracketed { "not excluded" } else { "excluded" }
    ));
    Ok(rep)
}

pub fn cmd_halfsum(cfg: &RunConfig) -> CliResult<Report> {
    let hs = cfg.h.clone().unwrap_or_else(|| vec![0.02, 0.04, 0.08]);
    let field = shape(cfg)?;
    let table = half_sum(&assembler(cfg)?, &field, &hs, &cfg.galerkin())
        .map_err(CliError::at("half sum"))?;
    let mut rep = Report::new("halfsum", cfg, &["h", "lambda_sum", "deviation"]);
    for r in &table.rows {
        rep.push_row(vec![json!(r.h), json!(r.lambda_sum), json!(r.deviation)]);
    }
    rep.set("order", table.order);
    rep.set("min_order", cfg.tol);
    rep.set("pass", table.order.is_some_and(|o| o >= cfg.tol));
    Ok(rep)
}
