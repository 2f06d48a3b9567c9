//! Colouring strategies, batch experiments and run reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectors::{find_c212, find_c22, ClusterFamily, Scope};
use crate::error::{Error, Result};
use crate::extraction::{base_quadruple, run_pipeline, Branch, FailureInfo, Host, PipelineParams, PipelineReport,
    Quadruple, QuadrupleContext, StageTiming};
use crate::graph::{sample_expander, ExpanderParams, Graph};
use crate::hypergraph::{
    brute_force_longest_mono_tight_path, find_mono_clique, Colour, Hypergraph3, TwoColoring,
};

/// Largest hypergraph the exhaustive oracle may be asked to handle.
pub const MAX_ORACLE_CAP: usize = 15;

/// Independent per-trial generator derived from a base seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Colourer {
    UniformRandom { p_blue: f64 },
    AllBlue,
    AllRed,
    /// Blue clusters; cross-cluster triples blue with probability `p_blue`,
    /// then every blue connector between clusters is broken.
    ConnectorKiller { p_blue: f64 },
    /// Random colouring, then triples inside monochromatic `t`-sets of each
    /// cluster are flipped until none remain or `budget` flips are spent.
    ClusterMixer { budget: usize },
}

impl Colourer {
    pub fn validate(&self) -> Result<()> {
        match self {
            Colourer::UniformRandom { p_blue } | Colourer::ConnectorKiller { p_blue }
                if !(0.0..=1.0).contains(p_blue) =>
            {
                Err(Error::invalid("colourer.p_blue must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

pub fn colour_uniform(h: &Hypergraph3, p_blue: f64, rng: &mut impl Rng) -> TwoColoring {
    TwoColoring::from_fn_ordered(h, |_| if rng.gen_bool(p_blue) { Colour::Blue } else { Colour::Red })
}

/// Cluster pairs sharing a triple of `h` (two vertices in the first cluster)
/// and cluster triangles spanning a triple with one vertex in each.
pub fn cluster_scope(h: &Hypergraph3, family: &ClusterFamily) -> Scope {
    let clusters: Vec<(usize, &[usize])> = family.iter().filter(|(_, c)| !c.is_empty()).collect();
    let mut scope = Scope::default();
    for (i, &(u, cu)) in clusters.iter().enumerate() {
        for (j, &(v, cv)) in clusters.iter().enumerate().skip(i + 1) {
            let linked = (cu.len() >= 2 && h.contains(cu[0], cu[1], cv[0]))
                || (cv.len() >= 2 && h.contains(cv[0], cv[1], cu[0]));
            if linked {
                scope.pairs.push((u, v));
            }
            for &(w, cw) in &clusters[j + 1..] {
                if h.contains(cu[0], cv[0], cw[0]) {
                    scope.triangles.push((u, v, w));
                }
            }
        }
    }
    scope
}

#[derive(Debug, Clone)]
pub struct KillerOutcome {
    pub colouring: TwoColoring,
    /// Triples recoloured red to break a connector.
    pub flips: usize,
    /// Blue connectors still found by the detectors afterwards.
    pub residual: usize,
}

/// Blue (2,2)/(2,1,2)-connectors found in `scope`, counted per cluster
/// combination (at most one per combination and middle choice).
pub fn count_blue_connectors(h: &Hypergraph3, c: &TwoColoring, family: &ClusterFamily, scope: &Scope) -> usize {
    let get = |o: usize| family.get(o).unwrap_or(&[]);
    let pairs = scope.pairs.iter().filter(|&&(u, v)| find_c22(h, c, Colour::Blue, get(u), get(v)).is_some()).count();
    let triangles: usize = scope
        .triangles
        .iter()
        .map(|&(a, b, d)| {
            [(b, a, d), (a, b, d), (a, d, b)]
                .iter()
                .filter(|&&(x, z, y)| find_c212(h, c, Colour::Blue, get(x), get(z), get(y)).is_some())
                .count()
        })
        .sum();
    pairs + triangles
}

/// Colours intra-cluster triples blue and other triples blue with probability
/// `p_blue`, then breaks every blue connector between clusters of `family`
/// by recolouring one of its triples red, and re-runs the detectors.
pub fn colour_connector_killer(h: &Hypergraph3, family: &ClusterFamily, p_blue: f64, seed: u64) -> KillerOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cluster_of = vec![usize::MAX; h.num_vertices()];
    for (o, members) in family.iter() {
        for &v in members {
            cluster_of[v] = o;
        }
    }
    let mut c = TwoColoring::from_fn_ordered(h, |[a, b, x]| {
        let inside = cluster_of[a] != usize::MAX && cluster_of[a] == cluster_of[b] && cluster_of[b] == cluster_of[x];
        if inside || rng.gen_bool(p_blue) { Colour::Blue } else { Colour::Red }
    });
    let scope = cluster_scope(h, family);
    let flips = break_connectors(h, &mut c, family, &scope, &mut rng);
    let residual = count_blue_connectors(h, &c, family, &scope);
    KillerOutcome { colouring: c, flips, residual }
}

fn break_connectors(
    h: &Hypergraph3,
    c: &mut TwoColoring,
    family: &ClusterFamily,
    scope: &Scope,
    rng: &mut impl Rng,
) -> usize {
    let get = |o: usize| family.get(o).unwrap_or(&[]);
    let mut flips = 0;
    let mut kill = |c: &mut TwoColoring, triples: Vec<[usize; 3]>| {
        let [a, b, x] = *triples.choose(rng).expect("connectors have triples");
        c.set(a, b, x, Colour::Red);
        flips += 1;
    };
    for &(u, v) in &scope.pairs {
        while let Some(con) = find_c22(h, c, Colour::Blue, get(u), get(v)) {
            kill(c, con.triples());
        }
    }
    for &(a, b, d) in &scope.triangles {
        for (x, z, y) in [(b, a, d), (a, b, d), (a, d, b)] {
            while let Some(con) = find_c212(h, c, Colour::Blue, get(x), get(z), get(y)) {
                kill(c, con.triples());
            }
        }
    }
    flips
}

/// Random colouring in which each `cluster` of size `t_prime` is pushed away
/// from containing a monochromatic `t`-set. Returns the colouring and the
/// number of clusters that still contain one.
pub fn colour_cluster_mixer(
    h: &Hypergraph3,
    clusters: &[Vec<usize>],
    t: usize,
    budget: usize,
    rng: &mut impl Rng,
) -> Result<(TwoColoring, usize)> {
    let mut c = colour_uniform(h, 0.5, rng);
    let mut spent = 0;
    let mut remaining = 0;
    for cluster in clusters {
        loop {
            let Some((colour, set)) = find_mono_clique(h, &c, cluster, t)? else { break };
            if spent == budget {
                remaining += 1;
                break;
            }
            let mut pick = set.clone();
            pick.shuffle(rng);
            c.set(pick[0], pick[1], pick[2], colour.other());
            spent += 1;
        }
    }
    Ok((c, remaining))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSource {
    /// Random regular graph on `vertices` vertices.
    Sample { vertices: usize, degree: usize, seed: u64 },
    CyclePower { vertices: usize, power: usize },
    File { path: PathBuf },
}

impl InstanceSource {
    pub fn load(&self, params: &PipelineParams) -> Result<Graph> {
        match self {
            InstanceSource::Sample { vertices, degree, seed } => {
                let ep = ExpanderParams { eps: params.eps, a: *vertices, b: *degree, seed: *seed };
                ep.validate()?;
                sample_expander(&ep, 1)
            }
            InstanceSource::CyclePower { vertices, power } => Ok(Graph::cycle_power(*vertices, *power)),
            InstanceSource::File { path } => Graph::from_text(&fs::read_to_string(path)?),
        }
    }
}

fn default_oracle_cap() -> usize {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: PipelineParams,
    pub instance: InstanceSource,
    pub colourer: Colourer,
    pub trials: usize,
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: usize,
    #[serde(default)]
    pub seed: u64,
    /// Directory for replayable instance, colouring and path files.
    #[serde(default)]
    pub artifacts: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials: must be at least 1"));
        }
        if self.oracle_cap > MAX_ORACLE_CAP {
            return Err(Error::invalid(format!("oracle_cap: must be at most {MAX_ORACLE_CAP}")));
        }
        self.colourer.validate()?;
        self.params.validate().map_err(|e| Error::invalid(format!("params: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub outcome: String,
    pub colour: Option<Colour>,
    pub length: Option<usize>,
    pub branch: Option<Branch>,
    pub failure: Option<FailureInfo>,
    /// Set on every success: the output re-validated in its colour.
    pub validated: Option<bool>,
    pub oracle_length: Option<usize>,
    pub within_oracle: Option<bool>,
    pub killer_residual: Option<usize>,
    pub pipeline: PipelineReport,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub successes: usize,
    pub hypothesis_failures: usize,
    pub faults: usize,
    pub blue_branch: usize,
    pub red_branch: usize,
    pub invalid_outputs: usize,
    pub oracle_violations: usize,
    pub failures_by_label: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTiming {
    pub trial: usize,
    pub stages: Vec<StageTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub host_vertices: usize,
    pub host_triples: usize,
    pub rows: Vec<TrialRow>,
    pub aggregate: Aggregate,
    pub timings: Vec<TrialTiming>,
}

impl RunReport {
    /// Report JSON without the wall-clock section.
    pub fn deterministic_json(&self) -> String {
        let stripped = RunReport { timings: Vec::new(), ..self.clone() };
        serde_json::to_string_pretty(&stripped).expect("report serialises")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Colours `host` with `colourer` using the trial generator.
pub fn apply_colourer(
    colourer: &Colourer,
    host: &Host,
    params: &PipelineParams,
    rng: &mut ChaCha8Rng,
) -> Result<(TwoColoring, Option<usize>)> {
    let h = &host.h;
    Ok(match colourer {
        Colourer::UniformRandom { p_blue } => (colour_uniform(h, *p_blue, rng), None),
        Colourer::AllBlue => (TwoColoring::monochromatic(h, Colour::Blue), None),
        Colourer::AllRed => (TwoColoring::monochromatic(h, Colour::Red), None),
        Colourer::ConnectorKiller { p_blue } => {
            let family = ClusterFamily::new((0..host.num_clusters()).map(|v| (v, host.cluster(v))), Colour::Blue)?;
            let out = colour_connector_killer(h, &family, *p_blue, rng.gen());
            (out.colouring, Some(out.residual))
        }
        Colourer::ClusterMixer { budget } => {
            let clusters: Vec<Vec<usize>> = (0..host.num_clusters()).map(|v| host.cluster(v)).collect();
            (colour_cluster_mixer(h, &clusters, params.t, *budget, rng)?.0, None)
        }
    })
}

/// Runs every trial of `config` (in parallel) and assembles the report.
/// Trials are deterministic in `(config.seed, trial index)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let params = &config.params;
    let g = config.instance.load(params)?;
    let host = Host::build(&g, params.k, params.t_prime)?;
    if let Some(dir) = &config.artifacts {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("graph.txt"), g.to_text())?;
        fs::write(dir.join("hypergraph.txt"), host.h.to_text())?;
    }
    let oracle = host.h.num_vertices() <= config.oracle_cap;
    let results: Vec<Result<(TrialRow, TrialTiming)>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, &host, trial, oracle))
        .collect();
    let mut rows = Vec::with_capacity(config.trials);
    let mut timings = Vec::with_capacity(config.trials);
    for res in results {
        let (row, timing) = res?;
        rows.push(row);
        timings.push(timing);
    }
    let mut aggregate = Aggregate { trials: rows.len(), ..Aggregate::default() };
    for row in &rows {
        match row.outcome.as_str() {
            "success" => aggregate.successes += 1,
            "hypothesis" => aggregate.hypothesis_failures += 1,
            _ => aggregate.faults += 1,
        }
        match row.branch {
            Some(Branch::Blue) => aggregate.blue_branch += 1,
            Some(Branch::Red) => aggregate.red_branch += 1,
            None => {}
        }
        if row.validated == Some(false) {
            aggregate.invalid_outputs += 1;
        }
        if row.within_oracle == Some(false) {
            aggregate.oracle_violations += 1;
        }
        if let Some(f) = &row.failure {
            *aggregate.failures_by_label.entry(f.label.clone()).or_default() += 1;
        }
    }
    Ok(RunReport {
        config: config.clone(),
        host_vertices: host.h.num_vertices(),
        host_triples: host.h.num_triples(),
        rows,
        aggregate,
        timings,
    })
}

fn run_trial(config: &ExperimentConfig, host: &Host, trial: usize, oracle: bool) -> Result<(TrialRow, TrialTiming)> {
    let mut rng = trial_rng(config.seed, trial as u64);
    let (c, killer_residual) = apply_colourer(&config.colourer, host, &config.params, &mut rng)?;
    let report = run_pipeline(host, &config.params, &c);
    let outcome = match &report.failure {
        None => "success",
        Some(f) if f.class == "hypothesis" => "hypothesis",
        Some(f) if f.class == "fault" => "fault",
        Some(_) => "error",
    };
    let success = outcome == "success";
    let validated = success.then(|| report.verdict.as_ref().is_some_and(|v| v.valid && v.long_enough));
    let (oracle_length, within_oracle) = if oracle && success {
        let (_, best) = brute_force_longest_mono_tight_path(&host.h, &c, host.h.num_vertices())?;
        let len = report.path.as_ref().map_or(0, Vec::len);
        (Some(best.len()), Some(len <= best.len()))
    } else {
        (None, None)
    };
    if let Some(dir) = &config.artifacts {
        write_artifacts(dir, trial, &c, &report)?;
    }
    let row = TrialRow {
        trial,
        outcome: outcome.into(),
        colour: report.colour.filter(|_| success),
        length: report.path.as_ref().filter(|_| success).map(Vec::len),
        branch: report.branch,
        failure: report.failure.clone(),
        validated,
        oracle_length,
        within_oracle,
        killer_residual,
        pipeline: report.without_timings(),
    };
    Ok((row, TrialTiming { trial, stages: report.timings }))
}

fn write_artifacts(dir: &Path, trial: usize, c: &TwoColoring, report: &PipelineReport) -> Result<()> {
    fs::write(dir.join(format!("trial-{trial}.colouring")), c.to_text())?;
    if let (Some(colour), Some(path)) = (report.colour, &report.path) {
        let text = crate::hypergraph::TightPath3::new(path.clone()).to_text(colour);
        fs::write(dir.join(format!("trial-{trial}.path")), text)?;
    }
    Ok(())
}

/// A window instance for the extension step: two source clusters (window 1)
/// followed by `window_len` clusters (window 2), all of `cluster_size`
/// vertices, on the complete 3-graph.
#[derive(Debug, Clone)]
pub struct SyntheticWindow {
    pub h: Hypergraph3,
    pub ctx: QuadrupleContext,
}

impl SyntheticWindow {
    pub fn new(window_len: usize, cluster_size: usize) -> Result<Self> {
        let count = window_len + 2;
        let h = Hypergraph3::complete(count * cluster_size)?;
        let clusters: Vec<Vec<usize>> =
            (0..count).map(|i| (i * cluster_size..(i + 1) * cluster_size).collect()).collect();
        let windows = vec![vec![0, 1], (2..count).collect()];
        Ok(SyntheticWindow { h, ctx: QuadrupleContext { clusters, windows } })
    }

    pub fn family(&self) -> Result<ClusterFamily> {
        ClusterFamily::new(self.ctx.clusters.iter().cloned().enumerate(), Colour::Blue)
    }

    /// Cluster pairs and the cluster triangles meeting a source cluster: the
    /// combinations the extension step reads.
    pub fn scope(&self) -> Scope {
        let count = self.ctx.clusters.len();
        let mut scope = Scope::default();
        for u in 0..count {
            for v in u + 1..count {
                scope.pairs.push((u, v));
                if u < 2 {
                    for w in v + 1..count {
                        scope.triangles.push((u, v, w));
                    }
                }
            }
        }
        scope
    }

    /// Adversarial colouring with blue clusters and no blue connector in
    /// [`Self::scope`]: random blue density drawn from `[0.2, 0.8]`,
    /// triples across three window-2 clusters red, then every remaining
    /// connector broken. Cluster orders are shuffled so the base pairs vary.
    pub fn adversarial(&self, seed: u64) -> (TwoColoring, QuadrupleContext, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p_blue = rng.gen_range(0.2..0.8);
        let size = self.ctx.clusters[0].len();
        let mut c = TwoColoring::from_fn_ordered(&self.h, |[a, b, x]| {
            let (ca, cb, cx) = (a / size, b / size, x / size);
            if ca == cb && cb == cx {
                Colour::Blue
            } else if ca != cb && cb != cx && ca != cx && ca >= 2 {
                Colour::Red
            } else if rng.gen_bool(p_blue) {
                Colour::Blue
            } else {
                Colour::Red
            }
        });
        let family = self.family().expect("clusters are disjoint");
        let flips = break_connectors(&self.h, &mut c, &family, &self.scope(), &mut rng);
        let mut ctx = self.ctx.clone();
        for cl in &mut ctx.clusters {
            cl.shuffle(&mut rng);
        }
        (c, ctx, flips)
    }

    /// Level-1 quadruple on the source clusters of `ctx`.
    pub fn base(ctx: &QuadrupleContext) -> Result<Quadruple> {
        base_quadruple(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectors::{build_auxiliary_f, Connector};

    #[test]
    fn killer_on_two_small_clusters() {
        let h = Hypergraph3::complete(4).unwrap();
        let family = ClusterFamily::new([(0, vec![0, 1]), (1, vec![2, 3])], Colour::Blue).unwrap();
        for seed in 0..20 {
            let out = colour_connector_killer(&h, &family, 1.0, seed);
            assert_eq!(out.residual, 0);
            for x1 in [0, 1] {
                for y1 in [2, 3] {
                    let k = Connector::c22(x1, 1 - x1, y1, 5 - y1);
                    let [t1, t2] = [k.triples()[0], k.triples()[1]];
                    let both = out.colouring.is(t1[0], t1[1], t1[2], Colour::Blue)
                        && out.colouring.is(t2[0], t2[1], t2[2], Colour::Blue);
                    assert!(!both);
                }
            }
        }
    }

    #[test]
    fn killer_leaves_no_auxiliary_edges() {
        let h = Hypergraph3::complete(18).unwrap();
        let family = ClusterFamily::new((0..3).map(|o| (o, (6 * o..6 * o + 6).collect())), Colour::Blue).unwrap();
        let out = colour_connector_killer(&h, &family, 0.7, 3);
        assert!(out.flips > 0);
        family.check_monochromatic(&h, &out.colouring).unwrap();
        let aux = build_auxiliary_f(&h, &out.colouring, &family, &cluster_scope(&h, &family)).unwrap();
        assert_eq!(aux.f.num_two_edges() + aux.f.num_three_edges(), 0);
    }

    #[test]
    fn mixer_removes_small_cliques() {
        let h = Hypergraph3::complete(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (c, remaining) = colour_cluster_mixer(&h, &[(0..6).collect()], 4, 1000, &mut rng).unwrap();
        assert_eq!(remaining, 0);
        assert!(find_mono_clique(&h, &c, &(0..6).collect::<Vec<_>>(), 4).unwrap().is_none());
    }

    #[test]
    fn config_validation_names_fields() {
        let config = ExperimentConfig {
            params: PipelineParams::relaxed(1, 1, 6, 6, 1, 2),
            instance: InstanceSource::CyclePower { vertices: 2, power: 1 },
            colourer: Colourer::AllBlue,
            trials: 0,
            oracle_cap: 12,
            seed: 0,
            artifacts: None,
        };
        assert!(config.validate().unwrap_err().to_string().contains("trials"));
        let mut capped = config.clone();
        capped.trials = 1;
        capped.oracle_cap = 16;
        assert!(capped.validate().unwrap_err().to_string().contains("oracle_cap"));
    }

    #[test]
    fn synthetic_window_is_connector_free() {
        let w = SyntheticWindow::new(4, 5).unwrap();
        let (c, ctx, _) = w.adversarial(9);
        let family = ClusterFamily::new(ctx.clusters.iter().cloned().enumerate(), Colour::Blue).unwrap();
        assert_eq!(count_blue_connectors(&w.h, &c, &family, &w.scope()), 0);
        assert!(SyntheticWindow::base(&ctx).is_ok());
    }
}
