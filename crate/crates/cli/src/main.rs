use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use vqe_r12::cabs::CabsMode;
use vqe_r12::integrals::{fit_geminal, FitGrid, DEFAULT_FIT_THRESHOLD};
use vqe_r12::pipeline::{
    compute_metrics, load_geometry, read_curve_csv, run_scan, run_scf, run_single, RunConfig, Scan, ScanReport,
};
use vqe_r12::vqe::{write_trace_csv, AnsatzKind};
use vqe_r12::{Error, Result};

#[derive(Parser)]
#[command(name = "vqe-r12", version, about = "Simulated VQE energies with an explicitly correlated basis-set correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hartree-Fock in the orbital basis.
    Scf(RunArgs),
    /// VQE energy; writes the optimizer trace and RDMs under --out.
    Vqe(RunArgs),
    /// VQE plus the correction at one geometry.
    Correct(RunArgs),
    /// Corrected potential energy curve over --scan.
    Pes(RunArgs),
    /// NPE and MAX of a scan against a reference curve.
    Metrics(MetricsArgs),
    /// Gaussian fit of the Slater geminal.
    FitGeminal(FitArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run configuration; other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// XYZ file or "El x y z; ..." in Angstrom, `{R}` marks the scan coordinate.
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    charge: Option<i32>,
    /// Orbital basis: builtin name, .gbs path or et:l,a0,beta,n;... joined with '+'.
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    cabs_basis: Option<String>,
    #[arg(long, value_parser = ["gbs", "pno", "none"])]
    cabs_mode: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_parser = ["spa", "spa-g", "uccsd", "hf"])]
    ansatz: Option<String>,
    #[arg(long)]
    frozen_core: bool,
    #[arg(long)]
    pnos_per_pair: Option<usize>,
    /// start:stop:count in Angstrom.
    #[arg(long)]
    scan: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mp2_init: bool,
    #[arg(long)]
    max_iter: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// pes.json written by `pes`.
    #[arg(long)]
    records: PathBuf,
    /// Reference curve as R,E rows in Angstrom and Hartree.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long, default_value = "e_total", value_parser = ["e_total", "e_vqe", "e_hf"])]
    column: String,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value_t = vqe_r12::pipeline::DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long, default_value_t = 6)]
    terms: usize,
    #[arg(long, default_value_t = FitGrid::default().r_max)]
    r_max: f64,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.geometry {
            c.geometry = v.clone();
        }
        if let Some(v) = self.charge {
            c.charge = v;
        }
        if let Some(v) = &self.basis {
            c.basis = v.clone();
        }
        if let Some(v) = &self.cabs_basis {
            c.cabs_basis = Some(v.clone());
            c.cabs_mode = CabsMode::Gbs;
        }
        if let Some(v) = &self.cabs_mode {
            c.cabs_mode = v.parse()?;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = &self.ansatz {
            c.ansatz = v.parse::<AnsatzKind>()?;
        }
        c.frozen_core |= self.frozen_core;
        c.mp2_init |= self.mp2_init;
        if self.pnos_per_pair.is_some() {
            c.pnos_per_pair = self.pnos_per_pair;
        }
        if let Some(v) = &self.scan {
            c.scan = Some(Scan::parse(v)?);
        }
        if self.shots.is_some() {
            c.shots = self.shots;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.max_iter {
            c.max_iter = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn out_dir(p: &Option<PathBuf>) -> Result<Option<&Path>> {
    if let Some(d) = p {
        fs::create_dir_all(d)?;
    }
    Ok(p.as_deref())
}

fn cmd_scf(a: &RunArgs) -> Result<i32> {
    let cfg = a.config()?;
    let mol = load_geometry(&cfg.geometry, cfg.charge)?;
    let (basis, _, scf) = run_scf(&cfg, &mol)?;
    print_json(&json!({
        "e_hf": scf.e_hf,
        "e_nuc": scf.e_nuc,
        "n_ao": basis.ao_count(),
        "n_occ": scf.n_occ,
        "orbital_energies": scf.orbital_energies.as_slice(),
        "converged": scf.converged,
        "iterations": scf.iterations,
    }))?;
    Ok(0)
}

fn cmd_vqe(a: &RunArgs) -> Result<i32> {
    let mut cfg = a.config()?;
    cfg.cabs_mode = CabsMode::None;
    let out = run_single(&cfg)?;
    if let Some(dir) = out_dir(&a.out)? {
        write_trace_csv(&out.trace, &dir.join("trace.csv"))?;
        out.rdms.write(fs::File::create(dir.join("rdm.bin"))?)?;
    }
    let r = &out.record;
    print_json(&json!({
        "e_hf": r.e_hf,
        "e_vqe": r.e_vqe,
        "e_fci_obs": r.e_fci_obs,
        "n_qubits": r.n_qubits,
        "iterations": r.vqe_iterations,
        "converged": r.vqe_converged,
        "grad_norm": r.grad_norm,
        "theta": out.theta,
    }))?;
    Ok(0)
}

fn cmd_correct(a: &RunArgs) -> Result<i32> {
    let cfg = a.config()?;
    let out = run_single(&cfg)?;
    let r = &out.record;
    let report = json!({
        "e_ref": r.e_vqe,
        "e_correction": r.e_correction,
        "e_total": r.e_total,
        "e_fci_obs": r.e_fci_obs,
        "n_obs": r.n_obs,
        "n_cabs": r.n_cabs,
        "gamma": r.gamma,
        "fit_rms": r.fit_rms,
        "frozen_core": cfg.frozen_core,
        "terms": out.terms,
    });
    if let Some(dir) = out_dir(&a.out)? {
        fs::write(dir.join("correction.json"), serde_json::to_string_pretty(&report)?)?;
        out.rdms.write(fs::File::create(dir.join("rdm.bin"))?)?;
    }
    print_json(&report)?;
    Ok(0)
}

fn cmd_pes(a: &RunArgs) -> Result<i32> {
    let cfg = a.config()?;
    let report = run_scan(&cfg, out_dir(&a.out)?)?;
    if a.out.is_none() {
        report.write_csv(std::io::stdout())?;
    }
    for f in &report.failures {
        eprintln!("R = {}: {}", f.r, f.error);
    }
    Ok(report.exit_code())
}

fn cmd_metrics(a: &MetricsArgs) -> Result<i32> {
    let report: ScanReport = serde_json::from_str(&fs::read_to_string(&a.records)?)?;
    let curve: Vec<(f64, f64)> = report
        .records
        .iter()
        .map(|r| {
            let e = match a.column.as_str() {
                "e_vqe" => r.e_vqe,
                "e_hf" => r.e_hf,
                _ => r.e_total,
            };
            r.r.map(|x| (x, e)).ok_or_else(|| Error::Invalid("record without R".into()))
        })
        .collect::<Result<_>>()?;
    let reference = read_curve_csv(fs::File::open(&a.reference)?)?;
    let m = compute_metrics(&curve, &reference)?;
    print_json(&json!({
        "npe_mEh": m.npe * 1e3,
        "max_mEh": m.max * 1e3,
        "deviations_mEh": m.deviations.iter().map(|d| d * 1e3).collect::<Vec<_>>(),
    }))?;
    Ok(0)
}

fn cmd_fit(a: &FitArgs) -> Result<i32> {
    let grid = FitGrid { r_max: a.r_max, ..FitGrid::default() };
    let fit = fit_geminal(a.gamma, a.terms, &grid, DEFAULT_FIT_THRESHOLD)?;
    print_json(&json!({
        "gamma": fit.gamma,
        "terms": fit.terms.iter().map(|(c, e)| json!({"coefficient": c, "exponent": e})).collect::<Vec<_>>(),
        "fit_rms": fit.fit_rms,
    }))?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Scf(a) => cmd_scf(a),
        Command::Vqe(a) => cmd_vqe(a),
        Command::Correct(a) => cmd_correct(a),
        Command::Pes(a) => cmd_pes(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::FitGeminal(a) => cmd_fit(a),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
