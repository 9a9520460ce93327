use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dcl_core::mocap::{
    aggregate_trials, analyze_trial, detect_h_base, format_table, frames_to_csv, read_body_map,
    read_frames, standard_body_map, table_csv, trunk_height_series, BodyMap, GroupStats,
    MocapError, ReportRow, SyntheticTrial,
};
use dcl_core::TrialResult;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{AutoTag, HBase};
use crate::error::CliError;
use crate::{derive_seed, Ctx, MocapAnalyzeArgs, MocapSynthArgs, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Truth {
    apex_mm: f64,
    base_mm: f64,
    delta_h_mm: f64,
}

pub fn synth(ctx: &mut Ctx, args: &MocapSynthArgs) -> Result<()> {
    let mut c = ctx.cfg.mocap.synth.clone();
    if let Some(n) = args.trials {
        c.trials_per_group = n;
    }
    if let Some(v) = args.noise_mm {
        c.noise_mm = v;
    }
    if c.groups.is_empty() || c.trials_per_group == 0 {
        return Err(CliError::validation(
            "mocap",
            "synth needs at least one group and one trial",
        ));
    }
    let body_map: BTreeMap<_, _> = standard_body_map()
        .into_iter()
        .map(|(k, v)| (k, v.to_vec()))
        .collect();
    ctx.out.json("body_map.json", &body_map)?;

    let mut truth = BTreeMap::new();
    for (g, group) in c.groups.iter().enumerate() {
        let trial = SyntheticTrial {
            apex_mm: group.apex_mm,
            base_mm: c.base_mm,
            rate_hz: c.rate_hz,
            noise_mm: c.noise_mm,
            ..Default::default()
        };
        trial.validate()?;
        let files: Vec<(String, String)> = (0..c.trials_per_group)
            .into_par_iter()
            .map(|k| {
                let frames = trial.frames(derive_seed(ctx.seed, g as u64, k as u64))?;
                Ok((
                    format!("{}/trial_{:02}.csv", group.name, k + 1),
                    frames_to_csv(&frames),
                ))
            })
            .collect::<std::result::Result<_, MocapError>>()?;
        for (name, text) in files {
            ctx.out.write(&name, text.as_bytes())?;
        }
        truth.insert(
            group.name.clone(),
            Truth {
                apex_mm: group.apex_mm,
                base_mm: c.base_mm,
                delta_h_mm: group.apex_mm - c.base_mm,
            },
        );
    }
    ctx.out.json("ground_truth.json", &truth)?;
    println!(
        "wrote {} groups × {} trials to {}",
        c.groups.len(),
        c.trials_per_group,
        ctx.out.dir().display()
    );
    Ok(())
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = list(dir)?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    Ok(v)
}

fn list(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir)
        .map_err(|e| CliError::io("mocap", format!("{}: {e}", dir.display())))?;
    rd.map(|e| {
        e.map(|e| e.path())
            .map_err(|e| CliError::io("mocap", e.to_string()))
    })
    .collect()
}

/// Trial groups in `dir`: one per sub-directory holding CSV files, or the
/// directory itself when it has none.
fn discover(dir: &Path, preferred: &[String]) -> Result<Vec<(String, Vec<PathBuf>)>> {
    if !dir.is_dir() {
        return Err(CliError::validation(
            "mocap",
            format!("input directory {} does not exist", dir.display()),
        ));
    }
    let mut subdirs: Vec<PathBuf> = list(dir)?.into_iter().filter(|p| p.is_dir()).collect();
    subdirs.sort();
    let mut groups = Vec::new();
    for d in subdirs {
        let files = csv_files(&d)?;
        if !files.is_empty() {
            let name = d
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            groups.push((name, files));
        }
    }
    if groups.is_empty() {
        let files = csv_files(dir)?;
        if files.is_empty() {
            return Err(CliError::validation(
                "mocap",
                format!("no trial CSV files in {}", dir.display()),
            ));
        }
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trials".into());
        groups.push((name, files));
    }
    let rank = |name: &str| {
        preferred
            .iter()
            .position(|p| p.eq_ignore_ascii_case(name))
            .unwrap_or(preferred.len())
    };
    groups.sort_by(|a, b| rank(&a.0).cmp(&rank(&b.0)).then_with(|| a.0.cmp(&b.0)));
    Ok(groups)
}

#[derive(Serialize)]
struct GroupSummary {
    group: String,
    #[serde(flatten)]
    stats: GroupStats,
    truth_delta_h_mm: Option<f64>,
}

pub fn analyze(ctx: &mut Ctx, args: &MocapAnalyzeArgs) -> Result<()> {
    let mut c = ctx.cfg.mocap.clone();
    if let Some(w) = args.smoothing_window {
        c.smoothing_window = w;
    }
    if let Some(h) = &args.h_base {
        c.h_base = if h.eq_ignore_ascii_case("auto") {
            HBase::Auto(AutoTag::Auto)
        } else {
            HBase::Fixed(h.parse().map_err(|_| {
                CliError::validation(
                    "mocap",
                    format!("invalid h_base: '{h}' is neither a number nor 'auto'"),
                )
            })?)
        };
    }
    let preferred: Vec<String> = std::iter::once(c.baseline_group.clone())
        .chain(c.synth.groups.iter().map(|g| g.name.clone()))
        .collect();
    let groups = discover(&args.input, &preferred)?;

    let map_path = args
        .body_map
        .clone()
        .unwrap_or_else(|| args.input.join("body_map.json"));
    let body_map: BodyMap = if map_path.is_file() {
        read_body_map(&map_path)?
    } else if args.body_map.is_some() {
        return Err(CliError::validation(
            "mocap",
            format!("body map {} does not exist", map_path.display()),
        ));
    } else {
        standard_body_map()
    };

    let jobs: Vec<(usize, &Path)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, (_, files))| files.iter().map(move |f| (g, f.as_path())))
        .collect();
    let trials: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(_, path)| -> Result<TrialResult> {
            let frames = read_frames(path).map_err(|e| {
                let kind = matches!(e, MocapError::Io(_));
                let err = CliError::validation("mocap", format!("{}: {e}", path.display()));
                if kind {
                    CliError::io("mocap", err.message)
                } else {
                    err
                }
            })?;
            let series = trunk_height_series(&frames, &body_map, &c.trunk_body)?;
            let h_base = match c.h_base {
                HBase::Fixed(h) => h,
                HBase::Auto(_) => detect_h_base(&series, 0.5, 5.0)?,
            };
            Ok(analyze_trial(&series, h_base, c.smoothing_window)?)
        })
        .collect::<Result<_>>()?;

    let per_group: Vec<Vec<TrialResult>> = (0..groups.len())
        .map(|g| {
            jobs.iter()
                .zip(&trials)
                .filter(|(j, _)| j.0 == g)
                .map(|(_, t)| *t)
                .collect()
        })
        .collect();
    let base_idx = groups
        .iter()
        .position(|(n, _)| n.eq_ignore_ascii_case(&c.baseline_group))
        .unwrap_or(0);
    let base_trials = &per_group[base_idx];
    if base_trials.len() < 2 {
        return Err(MocapError::TooFewTrials(base_trials.len()).into());
    }
    let base_mean = base_trials.iter().map(|t| t.delta_h).sum::<f64>() / base_trials.len() as f64;

    let truth: Option<BTreeMap<String, Truth>> =
        std::fs::read_to_string(args.input.join("ground_truth.json"))
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok());

    let mut trial_csv = String::from("group,trial,h_max_mm,h_base_mm,delta_h_mm\n");
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (g, (name, files)) in groups.iter().enumerate() {
        for (f, t) in files.iter().zip(&per_group[g]) {
            let stem = f
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            trial_csv.push_str(&format!(
                "{name},{stem},{:.3},{:.3},{:.3}\n",
                t.h_max, t.h_base, t.delta_h
            ));
        }
        let stats = aggregate_trials(&per_group[g], base_mean)
            .map_err(|e| CliError::validation("mocap", format!("group '{name}': {e}")))?;
        rows.push(ReportRow {
            group: name.clone(),
            h_max_mm: stats.mean_h_max,
            delta_h_mm: stats.mean_delta_h,
            std_mm: Some(stats.std_delta_h),
            relative_change_pct: (g != base_idx).then_some(stats.delta_percent),
            note: None,
        });
        summaries.push(GroupSummary {
            group: name.clone(),
            stats,
            truth_delta_h_mm: truth
                .as_ref()
                .and_then(|t| t.get(name))
                .map(|t| t.delta_h_mm),
        });
    }

    let table = format_table(&rows);
    ctx.out.write("mocap_trials.csv", trial_csv.as_bytes())?;
    ctx.out
        .write("mocap_table.csv", table_csv(&rows).as_bytes())?;
    ctx.out.write("mocap_table.txt", table.as_bytes())?;
    ctx.out.json("mocap_summary.json", &summaries)?;
    print!("{table}");
    for s in &summaries {
        if let Some(t) = s.truth_delta_h_mm {
            println!(
                "{}: ΔH error vs ground truth {:+.3} mm",
                s.group,
                s.stats.mean_delta_h - t
            );
        }
    }
    println!("wrote {}/mocap_table.txt", ctx.out.dir().display());
    Ok(())
}
