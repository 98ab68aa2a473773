use std::f64::consts::LN_2;
use std::io::Write;

use serde::Serialize;
use treepolymer::laplace::{laplace_curve, render_svg};
use treepolymer::measure::{character_expectation_inf, character_expectation_n, prob_inf_measure, prob_n_measure};
use treepolymer::stats::{
    clt_report, median_log_z_slope, run_ensemble, seneta_heyde_report, variance_report, EnsembleConfig,
    EnsembleSummary, PathEnsembleConfig,
};
use treepolymer::{critical_beta, DisorderSpec, LaplaceCurve, RestrictedMeasure, WeightOracle};

use crate::config::{Format, RunConfig, Runtime};
use crate::output::{csv_bytes, header, json, write};
use crate::CliError;

fn ensemble_config(config: &RunConfig) -> EnsembleConfig {
    EnsembleConfig {
        spec: config.spec,
        depth: config.depth,
        replicates: config.replicates,
        base_seed: config.seed,
        max_depth: config.max_depth,
    }
}

fn path_config(config: &RunConfig) -> PathEnsembleConfig {
    PathEnsembleConfig {
        spec: config.spec,
        depth: config.depth,
        environments: config.replicates,
        paths_per_env: config.paths,
        base_seed: config.seed,
        max_depth: config.max_depth,
    }
}

fn no_svg(config: &RunConfig) -> Result<(), CliError> {
    if config.format == Format::Svg {
        return Err(CliError::config(format!("`{}` has no svg output", config.command)));
    }
    Ok(())
}

#[derive(Serialize)]
struct Classification {
    spec: DisorderSpec,
    disorder_parameter: f64,
    ln_2: f64,
    sigma_squared: f64,
    seneta_heyde_constant: Option<f64>,
    critical_beta: f64,
    regime: String,
}

pub fn classify(config: &RunConfig, _runtime: &Runtime) -> Result<(), CliError> {
    no_svg(config)?;
    let spec = config.spec;
    let c = Classification {
        spec,
        disorder_parameter: spec.disorder_parameter(),
        ln_2: LN_2,
        sigma_squared: spec.sigma_squared(),
        seneta_heyde_constant: spec.seneta_heyde_constant().ok(),
        critical_beta: critical_beta(),
        regime: spec.classify().to_string(),
    };
    if config.format == Format::Json {
        std::io::stdout().write_all(&json(config, &c))?;
        return Ok(());
    }
    println!("spec             {spec}");
    println!("E[X ln X]        {}", c.disorder_parameter);
    println!("ln 2             {}", c.ln_2);
    println!("sigma^2          {}", c.sigma_squared);
    match c.seneta_heyde_constant {
        Some(v) => println!("c = sqrt(2/(pi sigma^2))  {v}"),
        None => println!("c = sqrt(2/(pi sigma^2))  undefined"),
    }
    println!("beta_c           {}", c.critical_beta);
    println!("regime           {}", c.regime);
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    median_log_z_slope: f64,
    summary: &'a EnsembleSummary,
}

pub fn simulate(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    no_svg(config)?;
    let summary = run_ensemble(&ensemble_config(config))?;
    let slope = median_log_z_slope(&summary);
    match config.format {
        Format::Json => {
            let report = SimulateReport {
                median_log_z_slope: slope,
                summary: &summary,
            };
            write(runtime, "simulate.json", &json(config, &report))?;
        }
        _ => {
            let mut lines = header(config);
            lines.push(format!("median_log_z_slope={slope}"));
            write(runtime, "simulate.csv", &csv_bytes(|b| summary.write_csv(b, &lines)))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CharacterRow {
    character: String,
    measure: &'static str,
    depth: usize,
    expectation: f64,
}

#[derive(Serialize)]
struct MeasureReport {
    prob_n: RestrictedMeasure,
    prob_inf: Option<RestrictedMeasure>,
    characters: Vec<CharacterRow>,
    error: Option<String>,
}

pub fn measure(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    no_svg(config)?;
    let oracle = WeightOracle::new(config.seed, config.spec).with_max_depth(config.max_depth);
    let character = config.character();
    let prob_n = prob_n_measure(&oracle, config.depth, config.m)?;
    let mut characters = vec![CharacterRow {
        character: character.to_string(),
        measure: "prob_n",
        depth: config.depth,
        expectation: character_expectation_n(&oracle, config.depth, &character)?,
    }];
    let inf = prob_inf_measure(&oracle, config.m, config.big_n).and_then(|measure| {
        let e = character_expectation_inf(&oracle, &character, config.big_n)?;
        Ok((measure, e))
    });
    let (prob_inf, error) = match inf {
        Ok((measure, e)) => {
            characters.push(CharacterRow {
                character: character.to_string(),
                measure: "prob_inf",
                depth: config.big_n,
                expectation: e,
            });
            (Some(measure), None)
        }
        Err(e) => (None, Some(e)),
    };
    let lines = header(config);
    if config.format == Format::Json {
        let report = MeasureReport {
            prob_n,
            prob_inf,
            characters,
            error: error.as_ref().map(|e| e.to_string()),
        };
        write(runtime, "measure.json", &json(config, &report))?;
    } else {
        write(runtime, "prob_n.csv", &csv_bytes(|b| prob_n.write_csv(b, &lines)))?;
        if let Some(m) = &prob_inf {
            write(runtime, "prob_inf.csv", &csv_bytes(|b| m.write_csv(b, &lines)))?;
        }
        let table = csv_bytes(|b| {
            for line in &lines {
                writeln!(b, "# {line}")?;
            }
            writeln!(b, "character,measure,depth,expectation")?;
            for row in &characters {
                writeln!(b, "\"{}\",{},{},{}", row.character, row.measure, row.depth, row.expectation)?;
            }
            Ok(())
        });
        write(runtime, "characters.csv", &table)?;
    }
    match error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn lognormal_beta(config: &RunConfig) -> Result<f64, CliError> {
    match config.spec {
        DisorderSpec::Lognormal { beta } => Ok(beta),
        other => Err(CliError::config(format!("`{}` needs a lognormal spec, got {other}", config.command))),
    }
}

fn check_failures(curves: &[LaplaceCurve]) -> Result<(), CliError> {
    for c in curves {
        if c.failures.len() * 100 > c.r.len() {
            return Err(CliError::numeric(format!(
                "root finder failed at {} of {} grid points for beta = {}",
                c.failures.len(),
                c.r.len(),
                c.beta
            )));
        }
    }
    Ok(())
}

fn svg_comments(config: &RunConfig) -> Vec<String> {
    header(config)
}

pub fn laplace(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    let beta = lognormal_beta(config)?;
    let curve = laplace_curve(beta, config.r_min, config.r_max, config.steps)?;
    let curves = [curve];
    match config.format {
        Format::Json => {
            write(runtime, "laplace.json", &json(config, &curves[0]))?;
        }
        Format::Csv => {
            let lines = header(config);
            write(runtime, "laplace.csv", &csv_bytes(|b| curves[0].write_csv(b, &lines)))?;
        }
        Format::Svg => {}
    }
    let svg = render_svg(&curves, config.overlay_weak, &svg_comments(config));
    write(runtime, "laplace.svg", svg.as_bytes())?;
    check_failures(&curves)
}

pub fn plot(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    if config.betas.is_empty() {
        return Err(CliError::config("--betas must list at least one value"));
    }
    let curves: Vec<LaplaceCurve> = config
        .betas
        .iter()
        .map(|&beta| laplace_curve(beta, config.r_min, config.r_max, config.steps))
        .collect::<Result<_, _>>()?;
    match config.format {
        Format::Json => {
            write(runtime, "plot.json", &json(config, &curves))?;
        }
        Format::Csv => {
            let table = csv_bytes(|b| {
                for line in header(config) {
                    writeln!(b, "# {line}")?;
                }
                writeln!(b, "beta,r,h,F")?;
                for c in &curves {
                    for i in 0..c.r.len() {
                        writeln!(b, "{},{},{},{}", c.beta, c.r[i], c.h[i], c.f[i])?;
                    }
                }
                Ok(())
            });
            write(runtime, "plot.csv", &table)?;
        }
        Format::Svg => {}
    }
    let svg = render_svg(&curves, config.overlay_weak, &svg_comments(config));
    write(runtime, "plot.svg", svg.as_bytes())?;
    check_failures(&curves)
}

pub fn clt(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    no_svg(config)?;
    let report = clt_report(&path_config(config))?;
    match config.format {
        Format::Json => write(runtime, "clt.json", &json(config, &report))?,
        _ => write(runtime, "clt.csv", &csv_bytes(|b| report.write_csv(b, &header(config))))?,
    };
    Ok(())
}

pub fn variance(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    no_svg(config)?;
    let report = variance_report(&path_config(config))?;
    match config.format {
        Format::Json => write(runtime, "variance.json", &json(config, &report))?,
        _ => write(runtime, "variance.csv", &csv_bytes(|b| report.write_csv(b, &header(config))))?,
    };
    Ok(())
}

pub fn ratio(config: &RunConfig, runtime: &Runtime) -> Result<(), CliError> {
    no_svg(config)?;
    let report = seneta_heyde_report(&ensemble_config(config))?;
    match config.format {
        Format::Json => write(runtime, "ratio.json", &json(config, &report))?,
        _ => write(runtime, "ratio.csv", &csv_bytes(|b| report.write_csv(b, &header(config))))?,
    };
    Ok(())
}
