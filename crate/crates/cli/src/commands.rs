use std::time::Instant;

use anyhow::{bail, Context, Result};
use geocomb::automaton;
use geocomb::combing::{self, count_paths, verify_geodesic, GeodesicReport};
use geocomb::equidist::{self, averaging_report, AveragingPlan, AveragingReport, Enumeration, LimitComparison};
use geocomb::markov::{self, build_markov};
use geocomb::presets::Preset;
use geocomb::spectral::{transition_matrix, Classification, GrowthConstant};
use geocomb::{perron_data, ComponentDecomposition, SpectralData};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// A command's JSON payload and, where it has one, its table.
pub struct Output {
    pub result: serde_json::Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn output(result: impl Serialize, table: Option<Table>) -> Result<Output> {
    Ok(Output { result: serde_json::to_value(result)?, table })
}

fn spectral(preset: &Preset) -> Result<SpectralData> {
    perron_data(&transition_matrix(&preset.graph)).context("spectral analysis failed")
}

fn enumeration(cfg: &ExperimentConfig) -> Enumeration {
    Enumeration { budget: cfg.budget as u128, direction: cfg.direction }
}

#[derive(Serialize)]
struct Analysis {
    preset: String,
    control: bool,
    provenance: Vec<String>,
    vertices: usize,
    initial: usize,
    edges: Vec<(usize, usize, String)>,
    transition_matrix: Vec<Vec<u64>>,
    lambda: f64,
    /// Strongest of `primitive`, `semisimple`, `almost_semisimple`.
    class: &'static str,
    p: Vec<f64>,
    q: Vec<f64>,
    pi: Vec<f64>,
    classification: Classification,
    components: ComponentDecomposition,
    growth: GrowthConstant,
    a_infinity: Vec<Vec<f64>>,
    geodesic_check: GeodesicReport,
}

fn class_name(c: &Classification) -> &'static str {
    if c.primitive {
        "primitive"
    } else if c.semisimple {
        "semisimple"
    } else {
        "almost_semisimple"
    }
}

pub fn analyze(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    let g = &preset.graph;
    let a = transition_matrix(g);
    let data = spectral(preset)?;
    let a_inf = (0..data.a_inf.nrows()).map(|i| data.a_inf.row(i).iter().copied().collect()).collect();
    let rows = (0..g.vertex_count())
        .map(|v| {
            vec![
                v.to_string(),
                data.components.component_of[v].to_string(),
                data.is_large_growth(v).to_string(),
                data.p[v].to_string(),
                data.q[v].to_string(),
                data.pi[v].to_string(),
            ]
        })
        .collect();
    let result = Analysis {
        preset: preset.name.clone(),
        control: preset.control,
        provenance: preset.provenance.clone(),
        vertices: g.vertex_count(),
        initial: g.initial(),
        edges: g.edges().iter().enumerate().map(|(i, e)| (e.src, e.dst, g.label_text(i))).collect(),
        transition_matrix: a.rows(),
        lambda: data.lambda,
        class: class_name(&data.classification),
        p: data.p.clone(),
        q: data.q.clone(),
        pi: data.pi.clone(),
        classification: data.classification.clone(),
        components: data.components.clone(),
        growth: data.growth.clone(),
        a_infinity: a_inf,
        geodesic_check: verify_geodesic(g, cfg.radius),
    };
    output(result, Some(Table { header: vec!["vertex", "component", "large_growth", "p", "q", "pi"], rows }))
}

#[derive(Serialize)]
struct SphereRow {
    n: usize,
    /// Paths of length `n` from the initial vertex, i.e. the sphere size.
    sphere: String,
    /// Paths of length `n` from any vertex.
    omega: String,
    /// `sphere / lambda^n`.
    normalized: f64,
}

pub fn spheres(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    let g = &preset.graph;
    let lambda = spectral(preset)?.lambda;
    let rows: Vec<SphereRow> = (0..=cfg.n_max)
        .map(|n| {
            let sphere = count_paths(g, g.initial(), None, n);
            let omega: num_bigint::BigUint = (0..g.vertex_count()).map(|v| count_paths(g, v, None, n)).sum();
            let normalized = sphere.to_string().parse::<f64>().unwrap_or(f64::INFINITY) / lambda.powi(n as i32);
            SphereRow { n, sphere: sphere.to_string(), omega: omega.to_string(), normalized }
        })
        .collect();
    let table = rows.iter().map(|r| vec![r.n.to_string(), r.sphere.clone(), r.omega.clone(), r.normalized.to_string()]).collect();
    output(&rows, Some(Table { header: vec!["n", "sphere", "omega", "normalized"], rows: table }))
}

pub fn equidist(preset: &Preset, cfg: &ExperimentConfig, timing: bool) -> Result<Output> {
    let x = cfg.basepoint()?;
    let f = cfg.test_function()?;
    let data = spectral(preset).ok();
    let plan = AveragingPlan { mode: cfg.mode, budget: cfg.budget as u128, samples: cfg.samples, seed: cfg.seed, direction: cfg.direction };
    let start = Instant::now();
    let mut report: AveragingReport = averaging_report(&preset.graph, data.as_ref(), &x, &f, cfg.n_max, plan)?;
    if timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.path_count.to_string(),
                r.spherical.re.to_string(),
                r.spherical.im.to_string(),
                r.cesaro.re.to_string(),
                r.cesaro.im.to_string(),
                serde_json::to_value(r.mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                r.stderr.map(|s| s.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let header = vec!["n", "path_count", "spherical_re", "spherical_im", "cesaro_re", "cesaro_im", "mode", "stderr"];
    output(&report, Some(Table { header, rows }))
}

#[derive(Serialize)]
struct Series {
    source: Option<usize>,
    target: Option<usize>,
    value: Complex64,
    predicted: Option<Complex64>,
    series: Vec<Complex64>,
}

fn series_output(c: LimitComparison, source: Option<usize>, target: Option<usize>) -> Result<Output> {
    let rows = c
        .series
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let mut row = vec![(i + 1).to_string(), z.re.to_string(), z.im.to_string()];
            if let Some(p) = c.predicted {
                row.push(p.re.to_string());
                row.push(p.im.to_string());
            } else {
                row.extend([String::new(), String::new()]);
            }
            row
        })
        .collect();
    let table = Table { header: vec!["n", "value_re", "value_im", "predicted_re", "predicted_im"], rows };
    output(Series { source, target, value: c.value, predicted: c.predicted, series: c.series }, Some(table))
}

pub fn kappa(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    let data = spectral(preset)?;
    let x = cfg.basepoint()?;
    let f = cfg.test_function()?;
    let c = equidist::kappa_average(&preset.graph, &data, &x, &f, cfg.n_max, cfg.source, cfg.target, enumeration(cfg))?;
    series_output(c, cfg.source, cfg.target)
}

pub fn markov_cesaro(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    let (Some(i), Some(j)) = (cfg.source, cfg.target) else {
        bail!("markov-cesaro needs both --source and --target");
    };
    let data = spectral(preset)?;
    let model = build_markov(&preset.graph, &data)?;
    let x = cfg.basepoint()?;
    let f = cfg.test_function()?;
    let c = equidist::markov_cesaro(&model, &data, &x, &f, cfg.n_max, i, j, enumeration(cfg))?;
    series_output(c, Some(i), Some(j))
}

#[derive(Serialize)]
struct TvRow {
    n: usize,
    tv: f64,
}

pub fn tv(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    let data = spectral(preset)?;
    let rows = (1..=cfg.n_max)
        .map(|n| Ok(TvRow { n, tv: markov::lambda_prime_tv(&preset.graph, &data, n)? }))
        .collect::<Result<Vec<_>>>()?;
    let table = rows.iter().map(|r| vec![r.n.to_string(), r.tv.to_string()]).collect();
    output(&rows, Some(Table { header: vec!["n", "tv"], rows: table }))
}

#[derive(Serialize)]
struct Ray {
    seed: u64,
    word: Vec<String>,
    average: Complex64,
}

#[derive(Serialize)]
struct Rays {
    length: usize,
    rays: Vec<Ray>,
    mean: Complex64,
}

pub fn sample_geodesic(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    if cfg.rays == 0 {
        bail!("rays must be at least 1");
    }
    let data = spectral(preset)?;
    let model = build_markov(&preset.graph, &data)?;
    let x = cfg.basepoint()?;
    let f = cfg.test_function()?;
    let sys = preset.graph.system();
    let rays = (0..cfg.rays as u64)
        .map(|r| {
            let seed = cfg.seed.wrapping_add(r);
            let average = equidist::random_geodesic_average(&model, &x, &f, cfg.n_max, seed, cfg.direction)?;
            let path = model.sample_path(preset.graph.initial(), cfg.n_max, seed);
            let word = path.word.iter().map(|&s| sys.label(s).to_string()).collect();
            Ok(Ray { seed, word, average })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = rays.iter().map(|r| r.average).sum::<Complex64>() / rays.len() as f64;
    let table = rays
        .iter()
        .map(|r| vec![r.seed.to_string(), r.average.re.to_string(), r.average.im.to_string(), r.word.join(" ")])
        .collect();
    output(Rays { length: cfg.n_max, rays, mean }, Some(Table { header: vec!["seed", "average_re", "average_im", "word"], rows: table }))
}

#[derive(Serialize)]
struct BuiltCombing {
    radius: usize,
    lookahead: usize,
    vertices: usize,
    edges: usize,
    written_to: Option<String>,
    geodesic_check: GeodesicReport,
    automaton: automaton::AutomatonFile,
}

pub fn build_combing(preset: &Preset, cfg: &ExperimentConfig) -> Result<Output> {
    let graph = combing::cone_type_combing(preset.system.clone(), cfg.radius, cfg.lookahead)?;
    if let Some(path) = &cfg.output {
        automaton::save(&graph, path).with_context(|| format!("writing {path}"))?;
    }
    let result = BuiltCombing {
        radius: cfg.radius,
        lookahead: cfg.lookahead,
        vertices: graph.vertex_count(),
        edges: graph.edges().len(),
        written_to: cfg.output.clone(),
        geodesic_check: verify_geodesic(&graph, cfg.radius),
        automaton: automaton::AutomatonFile::from_graph(&graph),
    };
    output(result, None)
}
