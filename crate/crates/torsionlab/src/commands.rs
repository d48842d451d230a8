//! The five subcommands, each a function of an already merged and validated
//! config.

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::Path;

use serde_json::{json, Value};
use torsionlab_core::decompose::{dw_decompose, torsion_level_sets};
use torsionlab_core::exponents::{exponent_table, torsion_profile, ExtRational};
use torsionlab_core::oscillatory::Extension;
use torsionlab_core::{GridSpec, PolyCurve};

use crate::config::{CurveSource, ExperimentConfig, FieldFormat};
use crate::exec::Pool;
use crate::formats::{write_exponent_table, FieldDump};
use crate::report::{self, complex, interval, num, poly};
use crate::suites::{self, Ctx, Effort};
use crate::EXIT_FAILED;
use crate::{sweep, CliError};

/// Seed used by `verify` when neither the command line nor the config names one.
pub const DEFAULT_VERIFY_SEED: u64 = 0;

fn out_dir(config: &ExperimentConfig) -> Option<&Path> {
    config.output.dir.as_deref()
}

pub fn analyze(config: &ExperimentConfig) -> Result<Value, CliError> {
    let curve = config.single_curve()?;
    let l = curve.torsion_poly();
    if l.is_zero() {
        return Err(torsionlab_core::Error::DegenerateTorsion.into());
    }
    let profile = torsion_profile(&curve)?;
    let dec = dw_decompose(&curve)?;
    let pieces: Vec<Value> = dec
        .pieces
        .iter()
        .zip(&dec.first_coord)
        .map(|(p, c)| {
            json!({
                "interval": interval(&p.interval),
                "center": complex(p.center),
                "k": p.k,
                "a": num(p.a),
                "ratio_bound": num(p.ratio_bound),
                "first_coordinate": {
                    "center": complex(c.center),
                    "ell": c.ell,
                    "b": num(c.b),
                    "ratio_bound": num(c.ratio_bound),
                },
            })
        })
        .collect();
    let mut levels = Vec::new();
    for n in config.levels.min..=config.levels.max {
        let sets = torsion_level_sets(&curve, n)?;
        levels.push(json!({ "n": n, "intervals": sets.iter().map(interval).collect::<Vec<_>>() }));
    }
    let result = json!({
        "dimension": curve.dim(),
        "components": curve.components().iter().map(poly).collect::<Vec<_>>(),
        "torsion": poly(&l),
        "profile": {
            "k_min": profile.k_min,
            "k_max": profile.k_max,
            "n_min": profile.n_min.to_string(),
            "n_max": profile.n_max.to_string(),
        },
        "pieces": pieces,
        "level_sets": levels,
    });
    let text = report::to_text(&report::envelope("analyze", config, result.clone()));
    report::emit(out_dir(config), "analyze.json", &text)?;
    Ok(result)
}

pub fn verify(config: &ExperimentConfig, pool: &Pool) -> Result<Value, CliError> {
    let suite = config.verify.suite.as_str();
    let checks = suites::suite_members(suite)
        .ok_or_else(|| CliError::usage(format!("unknown suite {suite:?}; expected one of {}", suites::SUITES.join(", "))))?;
    let ctx = Ctx {
        exec: pool,
        seed: config.seed.unwrap_or(DEFAULT_VERIFY_SEED),
        effort: if config.quick { Effort::Quick } else { Effort::Full },
        curves: config.verify.curves,
    };
    let mut outcomes = Vec::new();
    for check in checks {
        let o = (check.run)(&ctx);
        let label = match o.criterion {
            Some(id) => format!("criterion {id:>2}"),
            None => "extra       ".into(),
        };
        eprintln!("{} {label} {}: {}", if o.passed() { "PASS" } else { "FAIL" }, o.name, o.summary());
        outcomes.push(o);
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    let result = json!({
        "suite": suite,
        "passed": failed == 0,
        "failed": failed,
        "checks": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
    });
    let text = report::to_text(&report::envelope("verify", config, result.clone()));
    report::emit(out_dir(config), "verify.json", &text)?;
    if failed > 0 {
        return Err(CliError::new(EXIT_FAILED, format!("{failed} check(s) failed in suite {suite}")));
    }
    Ok(result)
}

pub fn sweep(config: &ExperimentConfig, pool: &Pool) -> Result<Value, CliError> {
    let Some(CurveSource::Random(family)) = &config.curve else {
        return Err(CliError::usage("sweep needs a random curve family"));
    };
    let seed = config.seed_for(family)?;
    let fam = family.generate(seed)?;
    if fam.total_rejected() > 0 {
        eprintln!("rejected {} degenerate draw(s)", fam.total_rejected());
    }
    let s = sweep::run(pool, &fam, &config.grid, &config.search)?;
    for (i, row) in s.rows.iter().enumerate() {
        for (which, r) in [("weighted", &row.weighted), ("unweighted", &row.unweighted)] {
            if let sweep::RowResult::Failed { message, .. } = r {
                eprintln!("curve {i}: {which} search failed: {message}");
            }
        }
    }
    let result = s.to_json();
    let text = report::to_text(&report::envelope("sweep", config, result.clone()));
    report::emit(out_dir(config), "sweep.json", &text)?;
    Ok(result)
}

/// `E_γ χ_support` (or `F_γ` when unweighted) on the configured cube.
pub fn field(config: &ExperimentConfig, pool: &Pool) -> Result<FieldDump, CliError> {
    let curve = config.single_curve()?;
    let dump = compute_field(&curve, config, pool)?;
    let dir = out_dir(config);
    let fmt = config.output.format;
    if matches!(fmt, FieldFormat::Csv | FieldFormat::Both) {
        match dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                dump.write_csv(File::create(dir.join("field.csv"))?)?;
            }
            None => dump.write_csv(io::stdout().lock())?,
        }
    }
    if matches!(fmt, FieldFormat::Binary | FieldFormat::Both) {
        let dir = dir.ok_or_else(|| CliError::usage("binary field dumps need --out"))?;
        std::fs::create_dir_all(dir)?;
        dump.write_binary(BufWriter::new(File::create(dir.join("field.bin"))?))?;
    }
    Ok(dump)
}

pub fn compute_field(curve: &PolyCurve, config: &ExperimentConfig, pool: &Pool) -> Result<FieldDump, CliError> {
    let g = &config.grid;
    let grid = GridSpec::cube(curve.dim(), g.half_width, g.resolution, g.nodes, g.support())?;
    let op = Extension::for_grid(curve, &grid, g.weighted)?;
    let f = op.sample_real(|_| 1.0);
    let values = op.field(pool, &f, &grid)?;
    Ok(FieldDump::from_grid(&grid, values))
}

pub fn exponents(config: &ExperimentConfig) -> Result<(), CliError> {
    let qs = config
        .exponents
        .q
        .iter()
        .map(|s| match s.parse::<ExtRational>() {
            Ok(ExtRational::Finite(q)) => Ok(q),
            Ok(ExtRational::Infinite) => Err(CliError::usage("q = inf has no row on the scaling line")),
            Err(e) => Err(CliError::usage(format!("q {s:?}: {e}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = exponent_table(config.exponents.dim, &qs)?;
    let mut buf = Vec::new();
    write_exponent_table(&rows, &mut buf)?;
    report::emit(out_dir(config), "exponents.csv", &String::from_utf8(buf).expect("ascii table"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dir: &tempfile::TempDir, components: &[&str]) -> ExperimentConfig {
        ExperimentConfig {
            curve: Some(CurveSource::Exprs(components.iter().map(|s| s.to_string()).collect())),
            output: crate::config::OutputConfig { dir: Some(dir.path().to_path_buf()), ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn analyze_examples() {
        let dir = tempfile::tempdir().unwrap();
        let r = analyze(&cfg(&dir, &["t", "t^2/2", "t^3/6"])).unwrap();
        assert_eq!(r["pieces"].as_array().unwrap().len(), 1);
        assert_eq!(r["profile"]["k_max"], 0);
        let r = analyze(&cfg(&dir, &["t", "t^2", "t^4"])).unwrap();
        let pieces = r["pieces"].as_array().unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| p["k"] == 1));
        assert_eq!(r["profile"]["n_min"], "7");
        let err = analyze(&cfg(&dir, &["t", "2t", "t^3"])).unwrap_err();
        assert_eq!(err.code, 2);
    }

    #[test]
    fn field_aliasing_is_exit_3() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(&dir, &["t", "t^2"]);
        c.grid.half_width = 5000.0;
        c.grid.nodes = 16;
        let pool = Pool::new(1).unwrap();
        assert_eq!(field(&c, &pool).unwrap_err().code, 3);
    }

    #[test]
    fn exponent_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(&dir, &["t", "t^2"]);
        c.exponents.q = vec!["2".into(), "1/12".into()];
        c.exponents.dim = 3;
        assert_eq!(exponents(&c).unwrap_err().code, 2);
        c.exponents.q = vec!["2".into(), "7/2".into()];
        exponents(&c).unwrap();
        let text = std::fs::read_to_string(c.output.dir.unwrap().join("exponents.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("\n2,12/11,12,true,0\n"), "{text}");
    }
}
