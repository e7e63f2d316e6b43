use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use scatter2d_core::forward::derive_seed;
use scatter2d_core::iterate::{run_full_data, RunError};
use scatter2d_core::metrics::long_form_csv;
use scatter2d_core::*;

use crate::config::{ExperimentConfig, NoiseAt};
use crate::verify::{hat_study, trig_study};
use crate::Usage;

/// Writes via a temporary sibling and a rename, so readers never see half a file.
pub fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn prepare_out(cfg: &ExperimentConfig) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    write_atomic(&cfg.out.join("config.txt"), &cfg.echo())?;
    Ok(cfg.out.clone())
}

/// Simulated data of the configured phantom: one dataset, or one per angle
/// for full data.
fn simulate(cfg: &ExperimentConfig, grid: GridSpec, scenario: &ScatteringScenario) -> anyhow::Result<(NodalField, Vec<FarFieldDataset>)> {
    let v = cfg.phantom.sample(grid);
    let mut opts = ForwardOptions::with_tol(cfg.tol);
    if cfg.noise_at == NoiseAt::Field && cfg.noise > 0.0 {
        opts.field_noise = Some(FieldNoise::new(cfg.noise, cfg.seed)?);
    }
    let full = matches!(scenario, ScatteringScenario::FullData { .. });
    let clean = if full {
        synthesize_full_data(&v, scenario, &opts)?
    } else {
        vec![synthesize_dataset(&v, scenario, &opts)?]
    };
    if cfg.noise_at == NoiseAt::Field || cfg.noise == 0.0 {
        return Ok((v, clean));
    }
    let noisy = clean
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let seed = if full { derive_seed(cfg.seed, i as u64) } else { cfg.seed };
            add_noise(d, cfg.noise, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((v, noisy))
}

fn data_names(count: usize) -> Vec<String> {
    if count == 1 {
        vec!["data.csv".into()]
    } else {
        (0..count).map(|i| format!("data_{i}.csv")).collect()
    }
}

pub fn synthesize(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let out = prepare_out(cfg)?;
    let (_, datasets) = simulate(cfg, cfg.grid()?, &cfg.scenario()?)?;
    for (d, name) in datasets.iter().zip(data_names(datasets.len())) {
        write_atomic(&out.join(&name), &d.to_csv())?;
        println!("wrote {} ({} frequencies outside Omega)", out.join(&name).display(), d.out_of_omega_count());
    }
    Ok(())
}

/// Datasets from files, or simulated from the config together with the phantom.
fn load_inputs(
    cfg: &ExperimentConfig,
    files: &[PathBuf],
    reference: Option<&Path>,
) -> anyhow::Result<(Vec<FarFieldDataset>, Option<NodalField>)> {
    let reference = match reference {
        Some(path) => Some(
            NodalField::read_csv(path).map_err(|e| Usage(format!("reference {}: {e}", path.display())))?,
        ),
        None => None,
    };
    if files.is_empty() {
        let (v, datasets) = simulate(cfg, cfg.grid()?, &cfg.scenario()?)?;
        return Ok((datasets, reference.or(Some(v))));
    }
    let datasets = files
        .iter()
        .map(|p| FarFieldDataset::read_csv(p).map_err(|e| Usage(format!("dataset {}: {e}", p.display())).into()))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((datasets, reference))
}

pub fn born(cfg: &ExperimentConfig, files: &[PathBuf], reference: Option<&Path>) -> anyhow::Result<()> {
    let out = prepare_out(cfg)?;
    let (datasets, reference) = load_inputs(cfg, files, reference)?;
    let result = if datasets.len() == 1 {
        born_invert(&datasets[0])
    } else {
        born_full_data(&datasets).map_err(|e| Usage(e.to_string()))?
    };
    write_atomic(&out.join("born.csv"), &result.potential.to_csv())?;
    println!("{}: {} frequencies zero-filled", result.scenario, result.zero_filled_count);
    if let Some(reference) = reference {
        let e = l2_error(&result.potential, &reference).map_err(|e| Usage(e.to_string()))?;
        write_atomic(&out.join("errors.csv"), &format!("n,error\n1,{e:?}\n"))?;
        println!("error {e:.6e}");
    }
    Ok(())
}

fn write_run(out: &Path, run: &ReconstructionRun) -> anyhow::Result<()> {
    for (n, it) in run.iterates.iter().enumerate() {
        write_atomic(&out.join(format!("iterate_{n}.csv")), &it.to_csv())?;
    }
    if !run.errors.is_empty() {
        write_atomic(&out.join("errors.csv"), &run.errors_csv())?;
    }
    Ok(())
}

pub fn iterate(cfg: &ExperimentConfig, files: &[PathBuf], reference: Option<&Path>) -> anyhow::Result<()> {
    let out = prepare_out(cfg)?;
    let (datasets, reference) = load_inputs(cfg, files, reference)?;
    let opts = IterateOptions::with_tol(cfg.tol);
    match run_full_data(&datasets, cfg.iters, reference.as_ref(), &opts) {
        Ok(run) => {
            write_run(&out, &run)?;
            for (n, e) in run.errors.iter().enumerate() {
                println!("n={n} error={e:.6e}");
            }
            println!("{} solves, {} GMRES iterations", run.stats.solves, run.stats.gmres_iterations);
            Ok(())
        }
        Err(RunError { partial, error }) => {
            write_run(&out, &partial)?;
            Err(anyhow::Error::new(error).context(format!("kept {} iterates", partial.iterates.len())))
        }
    }
}

pub fn sweep(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let out = prepare_out(cfg)?;
    match cfg.study.as_str() {
        "aliasing" => sweep_aliasing(cfg, &out),
        "sampling" => sweep_sampling(cfg, &out),
        _ => sweep_iterate(cfg, &out),
    }
}

fn sweep_iterate(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<()> {
    let ks = if cfg.scenario == "fixed-energy" { cfg.ks.clone() } else { vec![cfg.k0] };
    let opts = IterateOptions::with_tol(cfg.tol);
    let mut table = String::from("k,N,n,error\n");
    let mut rates = vec![];
    for n in cfg.sizes() {
        let grid = cfg.grid_of(n)?;
        let mut finals = vec![];
        for &k in &ks {
            let (v, datasets) = simulate(cfg, grid, &cfg.scenario_with_k0(k)?)?;
            let run = run_full_data(&datasets, cfg.iters, Some(&v), &opts).map_err(Error::from)?;
            for (i, e) in run.errors.iter().enumerate().skip(1) {
                let _ = writeln!(table, "{k:?},{n},{i},{e:?}");
            }
            finals.push((k, *run.errors.last().expect("K >= 1")));
            println!("k={k} N={n} errors {:?}", &run.errors[1..]);
        }
        if finals.len() >= 2 {
            match fit_rate(&finals) {
                Ok(fit) => {
                    println!("N={n}: error ~ k^-{:.3} after n={} (residual {:.3})", fit.exponent, cfg.iters, fit.residual);
                    rates.push((format!("N={n}:exponent"), fit.exponent));
                    rates.push((format!("N={n}:residual"), fit.residual));
                }
                Err(e) => println!("N={n}: no rate fit ({e})"),
            }
        }
    }
    write_atomic(&out.join("errors.csv"), &table)?;
    if !rates.is_empty() {
        write_atomic(&out.join("rate.csv"), &long_form_csv(rates.into_iter().map(|(p, v)| ("rate", p, v))))?;
    }
    Ok(())
}

fn sweep_aliasing(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<()> {
    let scenario = cfg.scenario()?;
    if matches!(scenario, ScatteringScenario::FullData { .. }) {
        return Err(Usage("the aliasing study needs a pointwise scenario".into()).into());
    }
    let mut rows = vec![];
    for n in cfg.sizes() {
        let fine = cfg.grid_of(n * cfg.fine_factor)?;
        let (v, datasets) = simulate(cfg, fine, &scenario)?;
        let a = aliasing_study(&v, &datasets[0], n)?;
        println!("N={n}: coarse {:.4e}, fine {:.4e}, low-passed {:.4e}", a.coarse, a.fine, a.lowpass);
        rows.push((format!("N={n}:coarse"), a.coarse));
        rows.push((format!("N={n}:fine"), a.fine));
        rows.push((format!("N={n}:lowpass"), a.lowpass));
    }
    write_atomic(&out.join("aliasing.csv"), &long_form_csv(rows.into_iter().map(|(p, v)| ("aliasing", p, v))))
}

fn sweep_sampling(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<()> {
    let sizes = if cfg.sizes.is_empty() { vec![16, 32, 64, 128] } else { cfg.sizes.clone() };
    let mut rows: Vec<(&str, String, f64)> = vec![];
    for (name, study) in [("trig", trig_study(cfg.r, &sizes)?), ("hat", hat_study(cfg.r, &sizes)?)] {
        for (n, _, e) in &study.errors {
            rows.push(("sampling", format!("{name}:N={n}"), *e));
        }
        // the trigonometric errors sit at roundoff, so a fitted order means nothing
        if let Some(fit) = study.order.as_ref().filter(|_| name == "hat") {
            println!("{name}: fitted order {:.3}", fit.exponent);
            rows.push(("sampling", format!("{name}:order"), fit.exponent));
        }
    }
    write_atomic(&out.join("sampling.csv"), &long_form_csv(rows))
}
