use std::fs;
use std::path::Path;
use std::time::Instant;

use super::config::RunConfig;
use super::output::{self, CaseRecord, EnvelopeRecord, RunManifest};
use super::{ChannelArgs, CliError, Pair, TrajectoryArgs, VerifyArgs, SEED_ENV};
use crate::barycentric::BaryPoint;
use crate::channel::{campaign_specs, run_uq_campaign, solve_channel, solve_channel_from, ChannelSolution};
use crate::exec::{self, Execution};
use crate::fixtures::fixture_tensors;
use crate::tensor::IDENTITY3;
use crate::trajectory::{blend_trajectory, perturbation_trajectory, plane_strain_points, TrajectoryRecord};
use crate::verify::{run_all, VerifyConfig};

/// Plane-strain states used by `--pair custom --target` without `--from`.
const DEFAULT_CUSTOM_POINTS: usize = 5;

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

pub fn run_verify(a: &VerifyArgs) -> Result<(), CliError> {
    if a.instances == 0 {
        return Err(CliError::Usage("--instances must be positive".into()));
    }
    let mut cfg = VerifyConfig { seed: seed(a.seed)?, instances: a.instances, exec: execution(a.sequential), ..Default::default() };
    if a.broken_corners {
        cfg.corners.three_c = BaryPoint::new(0.5, 0.0);
    }
    let start = Instant::now();
    let report = run_all(&cfg);
    println!("seed {}, {} instances per randomized suite", cfg.seed, cfg.instances);
    for s in &report.suites {
        println!("{s}");
    }
    let passed = report.suites.iter().filter(|s| s.passed).count();
    println!("{passed}/{} suites passed in {:.2?}", report.suites.len(), start.elapsed());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(report.failed().iter().map(|s| s.to_string()).collect()))
    }
}

pub fn run_trajectory(a: &TrajectoryArgs) -> Result<(), CliError> {
    if a.steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {}", a.steps)));
    }
    let custom_only = a.target.is_some() || !a.from.is_empty() || a.to.is_some();
    let fx = fixture_tensors();
    let runs: Vec<(String, Vec<TrajectoryRecord>)> = match a.pair {
        Pair::Ab | Pair::Ac if custom_only => {
            return Err(CliError::Usage("--target, --from and --to apply to --pair custom only".into()));
        }
        Pair::Ab => vec![("trajectory_AB.csv".into(), blend_trajectory(&fx.a, &fx.b, a.steps)?)],
        Pair::Ac => vec![("trajectory_AC.csv".into(), blend_trajectory(&fx.a, &fx.c, a.steps)?)],
        Pair::Custom => match (a.to, a.target) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give either --to or --target, not both".into())),
            (None, None) => return Err(CliError::Usage("--pair custom needs --to or --target".into())),
            (Some(to), None) => {
                let [from] = a.from[..] else {
                    return Err(CliError::Usage("--to needs exactly one --from".into()));
                };
                vec![("trajectory_custom.csv".into(), blend_trajectory(&from, &to, a.steps)?)]
            }
            (None, Some(target)) => {
                let sources = if a.from.is_empty() {
                    plane_strain_points(DEFAULT_CUSTOM_POINTS, 1.0, &IDENTITY3).iter().map(|p| p.stress()).collect()
                } else {
                    a.from.clone()
                };
                let runs = exec::map(execution(a.sequential), &sources, |t| {
                    perturbation_trajectory(t, target, a.ev_mode, a.steps)
                });
                runs.into_iter()
                    .enumerate()
                    .map(|(i, r)| Ok((format!("trajectory_custom_{i:02}.csv"), r?)))
                    .collect::<Result<_, CliError>>()?
            }
        },
    };

    prepare_dir(&a.out)?;
    let canonical = format!(
        "pair={:?}\nsteps={}\ntarget={:?}\nev_mode={}\nfrom={:?}\nto={:?}\n",
        a.pair, a.steps, a.target, a.ev_mode, a.from, a.to
    );
    let mut manifest = RunManifest::new("trajectory", super::config::digest_text(&canonical));
    for (name, records) in &runs {
        output::write_trajectory(&a.out.join(name), records)?;
        println!("{name}: {} rows", records.len());
        manifest.outputs.push(name.clone());
    }
    manifest.write(&a.out)?;
    Ok(())
}

fn describe(s: &ChannelSolution) -> String {
    format!(
        "{}: converged={} laminarized={} diverged={} iterations={} residual={:.3e} u+_c={:.4}",
        s.label(),
        s.converged,
        s.laminarized,
        s.diverged,
        s.iterations,
        s.final_residual,
        s.centerline_u_plus()
    )
}

fn file_stem(label: &str) -> String {
    label.replace('.', "p")
}

pub fn run_channel(a: &ChannelArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", a.config.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let overlay = a.dns_overlay.as_deref().map(output::read_overlay).transpose()?;
    prepare_dir(&a.out)?;
    let exec = execution(a.sequential);
    let mut manifest = RunManifest::new("channel", cfg.digest());
    let mut problems = Vec::new();

    let emit = |manifest: &mut RunManifest, name: String, s: &ChannelSolution, campaign: Option<String>| {
        output::write_profile(&a.out.join(&name), s)?;
        println!("{}", describe(s));
        manifest.cases.push(CaseRecord::new(s, campaign, &name));
        manifest.outputs.push(name);
        Ok::<_, CliError>(())
    };

    let base = cfg.baseline();
    let start = Instant::now();
    let baseline = solve_channel(&base)?;
    emit(&mut manifest, "profile_baseline.csv".into(), &baseline, None)?;
    println!("baseline solved in {:.2?}", start.elapsed());

    if !baseline.converged || baseline.diverged {
        problems.push(describe(&baseline));
    } else {
        if let Some(spec) = cfg.perturbation {
            let s = solve_channel_from(&base.perturbed(spec), Some(&baseline.state))?;
            if !s.is_usable() {
                problems.push(describe(&s));
            }
            emit(&mut manifest, format!("profile_case_{}.csv", file_stem(&spec.label())), &s, None)?;
        }
        for kind in a.campaign.or(cfg.campaign.kind).map(|c| c.kinds()).unwrap_or_default() {
            let specs = campaign_specs(kind, cfg.campaign.strength)?;
            let result = run_uq_campaign(&base, &baseline, kind, &specs, exec)?;
            for m in &result.members {
                if !m.solution.is_usable() {
                    problems.push(format!("{kind} {}", describe(&m.solution)));
                }
                let name = format!("profile_{kind}_{}.csv", file_stem(&m.label()));
                emit(&mut manifest, name, &m.solution, Some(kind.to_string()))?;
            }
            let name = format!("envelope_{kind}.csv");
            output::write_envelope(&a.out.join(&name), &result.envelope)?;
            manifest.envelopes.push(EnvelopeRecord::new(&result, &name));
            manifest.outputs.push(name);
        }
    }
    if let Some(rows) = overlay {
        output::write_overlay(&a.out.join("dns_overlay.csv"), &rows)?;
        manifest.outputs.push("dns_overlay.csv".into());
    }
    let path = manifest.write(&a.out)?;
    println!("manifest: {}", path.display());
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(format!("solver did not converge:\n  {}", problems.join("\n  "))))
    }
}
