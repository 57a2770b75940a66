use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use revaudit::assignment::{
    apply_edits, parse_edits, parse_preferences, parse_similarity, solve, tradeoff_sweep, write_assignment_csv,
    write_sweep_csv, AssignmentSpec,
};
use revaudit::citation::{audit_sample, detect_citations, parse_overrides, write_audit_csv, CitationRelation, Stratum};
use revaudit::dataset::io::{apply_references, load_references, load_venue_config, VENUE_FILE};
use revaudit::dataset::{load_dataset, summarize, VenueConfig};
use revaudit::effect_size::{rank_improvement, write_improvements_csv, Averaging, EffectSizeOptions};
use revaudit::filter::{filter as run_filter, missingness_report, AnalysisDataset, FilterReport};
use revaudit::nonparametric::{analyze as run_permutation, match_triples, write_triples_csv, MatchCriteria, MatchedTriple, PermutationResult};
use revaudit::parametric::{build_rows, diagnostics as fit_diagnostics, fit_wls, write_qq_csv, write_residuals_csv, FitResult, ModelSpec};
use revaudit::report::{render_table, BiasReport};
use revaudit::synth::{generate, GeneratorConfig, GroundTruth};
use revaudit::{Pair, Warning};

use crate::error::{CliError, CliResult};
use crate::workdir::{self, open, Workdir};
use crate::{AnalyzeArgs, AssignArgs, EffectSizeArgs, ExtractArgs, FilterArgs, IngestArgs, Preset, SimulateArgs};

fn print_warnings(warnings: &[Warning]) {
    for w in warnings {
        eprintln!("warning: {}: {}", w.context, w.message);
    }
}

pub fn ingest(wd: &Workdir, args: &IngestArgs) -> CliResult<()> {
    let config = match ingest_venue(wd, args)? {
        Some(cfg) => cfg,
        None => {
            return Err(CliError::Usage(format!(
                "no venue configuration: pass --venue-config or put {VENUE_FILE} in {}",
                args.input.display()
            )))
        }
    };
    let mut dataset = load_dataset(&args.input, config)?;
    if let Some(refs) = &args.references {
        apply_references(&mut dataset, load_references(refs)?)?;
    }
    dataset.validate()?;
    wd.ensure()?;
    wd.save_dataset(&dataset)?;
    let (r, s, v) = dataset.counts();
    println!("ingested {r} reviewers, {s} submissions, {v} reviews ({})", dataset.config.label());
    Ok(())
}

/// `--venue-config` if given, else the input directory's venue.json.
fn ingest_venue(wd: &Workdir, args: &IngestArgs) -> CliResult<Option<VenueConfig>> {
    if wd.has_venue_override() {
        return wd.venue().map(Some);
    }
    let p = args.input.join(VENUE_FILE);
    if p.exists() {
        Ok(Some(load_venue_config(&p)?))
    } else {
        Ok(None)
    }
}

pub fn extract_citations(wd: &Workdir, args: &ExtractArgs) -> CliResult<()> {
    let dataset = wd.dataset()?;
    let (mut relation, warnings) = detect_citations(&dataset, &dataset.assigned_pairs())?;
    print_warnings(&warnings);
    if let Some(path) = &args.overrides {
        let overrides = parse_overrides(open(path)?)?;
        // Every row of the file is a manual check, so it counts as audited.
        let decided: Vec<Pair> = overrides.iter().map(|(p, _)| p.clone()).collect();
        relation.mark_audited(&decided);
        for (pair, cited) in overrides {
            relation.apply_override(pair, cited)?;
        }
    }
    if let (Some(n), Some(seed)) = (args.audit_size, args.seed) {
        for (stratum, name) in [(Stratum::Cited, "audit_cited.csv"), (Stratum::Uncited, "audit_uncited.csv")] {
            let pairs = audit_sample(&relation, stratum, n, seed)?;
            wd.write_with(name, |buf| write_audit_csv(buf, &dataset, stratum, &pairs))?;
        }
    }
    wd.write_json(workdir::CITATIONS, &relation)?;
    print!("{}", summarize(&dataset, &relation));
    let unresolved = relation.unresolved().count();
    if unresolved > 0 {
        println!("{unresolved} ambiguous pairs await a manual decision");
    }
    Ok(())
}

#[derive(Serialize)]
struct AssignmentSummary {
    spec: AssignmentSpec,
    pairs: usize,
    objective_quality: f64,
    cited_count: usize,
    papers_with_cited: usize,
    edited: bool,
}

pub fn assign(wd: &Workdir, args: &AssignArgs) -> CliResult<()> {
    let dataset = wd.dataset()?;
    let mut sim = parse_similarity(open(&args.similarity)?)?;
    if let Some(path) = &args.forbid_from_bids {
        let rows = parse_preferences(open(path)?)?;
        sim.apply_preferences(&rows, dataset.config.venue_policy, args.missing_penalty);
    }
    let candidates: BTreeSet<Pair> = sim.sim.keys().cloned().collect();
    let (relation, warnings) = detect_citations(&dataset, &candidates)?;
    print_warnings(&warnings);
    let spec = AssignmentSpec {
        paper_load: args.paper_load,
        reviewer_cap: args.reviewer_cap,
        lambda: args.lambda,
    };
    let mut assignment = solve(&sim, &relation, &spec)?;
    if let Some(path) = &args.edits {
        assignment = apply_edits(&assignment, &parse_edits(open(path)?)?, &sim, &relation, &spec)?;
    }
    wd.ensure()?;
    wd.write_with("assignment.csv", |buf| write_assignment_csv(buf, &assignment, &sim, &relation))?;
    let summary = AssignmentSummary {
        spec,
        pairs: assignment.pairs.len(),
        objective_quality: assignment.objective_quality,
        cited_count: assignment.cited_count,
        papers_with_cited: assignment.papers_with_cited(&relation),
        edited: args.edits.is_some(),
    };
    wd.write_json("assignment.json", &summary)?;
    println!(
        "assigned {} pairs: quality {:.6}, {} cited, {} papers with a cited reviewer",
        summary.pairs, summary.objective_quality, summary.cited_count, summary.papers_with_cited
    );
    if !args.sweep.is_empty() {
        let points = tradeoff_sweep(&sim, &relation, &spec, &args.sweep)?;
        wd.write_with("sweep.csv", |buf| write_sweep_csv(buf, &points))?;
        println!("sweep over {} λ values written to sweep.csv", points.len());
    }
    Ok(())
}

pub fn filter(wd: &Workdir, args: &FilterArgs) -> CliResult<()> {
    let dataset = wd.dataset()?;
    let relation: CitationRelation = wd.read_json(workdir::CITATIONS, "extract-citations")?;
    let (mut data, report) = run_filter(&dataset, &relation)?;
    if args.latent {
        let truth: GroundTruth = wd.read_json(workdir::GROUND_TRUTH, "simulate")?;
        data = data.with_scores(&truth.latent_scores())?;
    }
    let missing = missingness_report(&dataset, &relation)?;
    print_warnings(&report.warnings);
    wd.write_json(workdir::ANALYSIS, &data)?;
    wd.write_json(workdir::FILTER_REPORT, &report)?;
    wd.write_json("missingness.json", &missing)?;
    wd.write_with("exclusions.csv", |buf| report.write_exclusions_csv(buf))?;
    println!(
        "{} submissions, {} reviewers, {} pairs ({} cited) retained; {} pairs dropped for missing values, {} submissions excluded",
        report.eligible_submissions,
        report.retained_reviewers,
        report.retained_pairs,
        report.retained_cited_pairs,
        report.dropped_missing,
        report.excluded_submissions.len()
    );
    print!("{missing}");
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct ParametricArtifact {
    pub fit: FitResult,
    pub warnings: Vec<Warning>,
}

#[derive(Serialize, Deserialize)]
pub struct NonparametricArtifact {
    pub criteria: MatchCriteria,
    pub seed: Option<u64>,
    pub result: PermutationResult,
    pub triples: Vec<MatchedTriple>,
}

pub fn analyze(wd: &Workdir, args: &AnalyzeArgs) -> CliResult<()> {
    let data: AnalysisDataset = wd.read_json(workdir::ANALYSIS, "filter")?;
    if args.parametric {
        let (rows, warnings) = build_rows(&data)?;
        print_warnings(&warnings);
        let fit = fit_wls(&rows, &ModelSpec::for_policy(data.config.venue_policy))?;
        let a = &fit.alpha_star;
        println!(
            "alpha_star = {:.4} (se {:.4}), 95% CI [{:.4}, {:.4}], p = {:.4}, n = {}",
            a.estimate, a.std_error, a.ci95.lo, a.ci95.hi, a.p_value, fit.n_rows
        );
        wd.write_json(workdir::PARAMETRIC, &ParametricArtifact { fit, warnings })?;
        return Ok(());
    }
    if !args.exact && args.seed.is_none() {
        return Err(CliError::Usage("--nonparametric requires --seed (or --exact)".into()));
    }
    let criteria = MatchCriteria {
        overlap_tolerance: args.overlap_tolerance,
    };
    let triples = match_triples(&data, &criteria);
    let seed = args.seed.unwrap_or(0);
    let result = run_permutation(&triples, args.iterations, seed, args.exact)?;
    wd.write_with(workdir::TRIPLES, |buf| write_triples_csv(buf, &triples))?;
    println!(
        "tau = {:.4} over K = {} triples, p = {:.4}{}",
        result.tau,
        result.k,
        result.p_two_sided,
        result
            .ci95_bootstrap
            .map(|ci| format!(", bootstrap 95% CI [{:.4}, {:.4}]", ci.lo, ci.hi))
            .unwrap_or_default()
    );
    wd.write_json(
        workdir::NONPARAMETRIC,
        &NonparametricArtifact {
            criteria,
            seed: args.seed,
            result,
            triples,
        },
    )
}

pub fn effect_size(wd: &Workdir, args: &EffectSizeArgs) -> CliResult<()> {
    let dataset = wd.dataset()?;
    let options = EffectSizeOptions {
        capped: !args.uncapped,
        averaging: if args.per_submission {
            Averaging::PerSubmission
        } else {
            Averaging::AllPairs
        },
    };
    let outcome = rank_improvement(&dataset, options)?;
    wd.write_json("effect_size.json", &outcome)?;
    wd.write_with("improvements.csv", |buf| write_improvements_csv(buf, &outcome))?;
    println!(
        "average rank improvement {:.2}% of {} submissions",
        outcome.average_improvement, outcome.n_submissions
    );
    Ok(())
}

pub fn simulate(wd: &Workdir, args: &SimulateArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(p) => workdir::read_json::<GeneratorConfig>(p)?,
        None => match args.preset {
            Preset::Ec => GeneratorConfig::ec_like(args.seed),
            Preset::Icml => GeneratorConfig::icml_like(args.seed),
        },
    };
    cfg.seed = args.seed;
    if wd.has_venue_override() {
        cfg.venue = wd.venue()?;
    }
    if let Some(v) = args.alpha_star {
        cfg.alpha_star = v;
    }
    if let Some(v) = args.sigma0 {
        cfg.sigma0 = v;
    }
    if let Some(v) = args.n_submissions {
        cfg.n_submissions = v;
    }
    if let Some(v) = args.n_reviewers {
        cfg.n_reviewers = v;
    }
    if let Some(v) = args.citation_prevalence {
        cfg.citation_prevalence = v;
    }
    if let Some(v) = args.confounder_correlation {
        cfg.confounder_correlation = v;
    }
    let g = generate(&cfg)?;
    wd.ensure()?;
    wd.save_dataset(&g.dataset)?;
    wd.write_json(workdir::GENERATOR, &cfg)?;
    wd.write_json(workdir::GROUND_TRUTH, &g.truth)?;
    let (r, s, v) = g.dataset.counts();
    println!(
        "simulated {} with {r} reviewers, {s} submissions, {v} reviews (alpha_star = {})",
        g.dataset.config.label(),
        cfg.alpha_star
    );
    Ok(())
}

pub fn diagnostics(wd: &Workdir) -> CliResult<()> {
    let art: ParametricArtifact = wd.read_json(workdir::PARAMETRIC, "analyze --parametric")?;
    let data: AnalysisDataset = wd.read_json(workdir::ANALYSIS, "filter")?;
    let (rows, _) = build_rows(&data)?;
    let bundle = fit_diagnostics(&art.fit, &rows)?;
    wd.write_with("residuals.csv", |buf| write_residuals_csv(buf, &bundle))?;
    wd.write_with("qq.csv", |buf| write_qq_csv(buf, &bundle))?;
    println!("{} residuals written to residuals.csv and qq.csv", bundle.residuals.len());
    Ok(())
}

pub fn report(wd: &Workdir) -> CliResult<()> {
    let config = wd.venue()?;
    let filter: FilterReport = wd.read_json(workdir::FILTER_REPORT, "filter")?;
    let mut reports = Vec::new();
    if wd.path(workdir::PARAMETRIC).exists() {
        let art: ParametricArtifact = wd.read_json(workdir::PARAMETRIC, "analyze --parametric")?;
        reports.push(BiasReport::parametric(&config, &filter, &art.fit)?);
    }
    if wd.path(workdir::NONPARAMETRIC).exists() {
        let art: NonparametricArtifact = wd.read_json(workdir::NONPARAMETRIC, "analyze --nonparametric")?;
        reports.push(BiasReport::nonparametric(&config, &filter, &art.triples, &art.result)?);
    }
    if reports.is_empty() {
        return Err(CliError::MissingArtifact {
            artifact: format!("{} or {}", workdir::PARAMETRIC, workdir::NONPARAMETRIC),
            stage: "analyze",
        });
    }
    let table = render_table(&reports);
    wd.write("report.txt", table.as_bytes())?;
    wd.write_json("report.json", &reports)?;
    print!("{table}");
    Ok(())
}
