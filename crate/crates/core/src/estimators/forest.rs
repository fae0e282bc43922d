//! Honest causal forest.
//!
//! Each tree draws a subsample without replacement and splits it into a
//! structure half, which chooses the splits, and an estimation half, which
//! fills the leaves. Splits maximize `sum_c n_c * tau_c^2` over the children,
//! with `tau_c` the inverse-propensity-weighted effect of the structure rows
//! in child `c`.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Result};
use crate::rng::{domain, StreamKey};

pub const DEFAULT_TREES: usize = 500;
pub const DEFAULT_MTRY: usize = 7;
pub const DEFAULT_MIN_NODE: usize = 20;
pub const DEFAULT_ARM_MIN: usize = 5;
pub const DEFAULT_HONEST_FRACTION: f64 = 0.5;
pub const DEFAULT_SUBSAMPLE_FRACTION: f64 = 0.5;
pub const DEFAULT_CANDIDATE_QUANTILES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub trees: usize,
    pub mtry: usize,
    pub min_node: usize,
    pub arm_min: usize,
    pub honest_fraction: f64,
    pub subsample_fraction: f64,
    /// Upper bound on the number of candidate thresholds per feature.
    pub candidate_quantiles: usize,
    /// `None` grows until the node-size floors stop it.
    pub max_depth: Option<usize>,
    /// Weight leaf effects by the logged propensities. When off, leaves use
    /// the plain difference of arm means.
    pub ipw_weighting: bool,
    pub seed: u64,
    /// Record each tree's structure and estimation rows.
    pub keep_samples: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: DEFAULT_TREES,
            mtry: DEFAULT_MTRY,
            min_node: DEFAULT_MIN_NODE,
            arm_min: DEFAULT_ARM_MIN,
            honest_fraction: DEFAULT_HONEST_FRACTION,
            subsample_fraction: DEFAULT_SUBSAMPLE_FRACTION,
            candidate_quantiles: DEFAULT_CANDIDATE_QUANTILES,
            max_depth: None,
            ipw_weighting: true,
            seed: 0,
            keep_samples: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left. `feature` is an encoded
    /// dataset column.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        tau: f64,
        n_treated: usize,
        n_control: usize,
    },
}

/// Training rows (indices into the fitting dataset) behind one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSamples {
    pub structure: Vec<usize>,
    pub estimation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalTree {
    /// Flat node list; the root is node 0.
    pub nodes: Vec<Node>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<TreeSamples>,
}

impl CausalTree {
    /// Index of the leaf that `row` (a full encoded row) routes to.
    pub fn leaf_index(&self, row: impl Fn(usize) -> f64) -> usize {
        let mut k = 0;
        loop {
            match &self.nodes[k] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => k = if row(*feature) <= *threshold { *left } else { *right },
                Node::Leaf { .. } => return k,
            }
        }
    }

    pub fn predict_with(&self, row: impl Fn(usize) -> f64) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { tau, .. } => tau,
            Node::Split { .. } => unreachable!("leaf_index stops at a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], k: usize) -> usize {
            match nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Leaf { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalForest {
    pub trees: Vec<CausalTree>,
    /// Encoded columns eligible for splitting.
    pub columns: Vec<usize>,
    pub mtry: usize,
    pub min_node: usize,
    pub arm_min: usize,
    pub honest_fraction: f64,
    pub subsample_fraction: f64,
}

impl CausalForest {
    /// Mean over trees of the leaf effect each row routes to.
    pub fn predict(&self, ds: &Dataset) -> Vec<f64> {
        let x = ds.x();
        let t = self.trees.len() as f64;
        (0..ds.n())
            .into_par_iter()
            .with_min_len(256)
            .map(|i| {
                let sum: f64 = self.trees.iter().map(|tree| tree.predict_with(|f| x[[i, f]])).sum();
                sum / t
            })
            .collect()
    }
}

/// Per-row statistics feeding the split criterion.
struct Rows {
    treated: Vec<bool>,
    /// Treated contribution: `Y/e` with weighting, `Y` without.
    a: Vec<f64>,
    /// Control contribution: `Y/(1-e)` with weighting, `Y` without.
    b: Vec<f64>,
}

#[derive(Clone, Copy, Default)]
struct Stats {
    n: usize,
    nt: usize,
    nc: usize,
    a: f64,
    b: f64,
}

impl Stats {
    fn add(&mut self, rows: &Rows, i: usize) {
        self.n += 1;
        if rows.treated[i] {
            self.nt += 1;
            self.a += rows.a[i];
        } else {
            self.nc += 1;
            self.b += rows.b[i];
        }
    }

    fn minus(&self, o: &Stats) -> Stats {
        Stats {
            n: self.n - o.n,
            nt: self.nt - o.nt,
            nc: self.nc - o.nc,
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }

    fn effect(&self, ipw: bool) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        if ipw {
            (self.a - self.b) / self.n as f64
        } else {
            let mt = if self.nt > 0 { self.a / self.nt as f64 } else { 0.0 };
            let mc = if self.nc > 0 { self.b / self.nc as f64 } else { 0.0 };
            mt - mc
        }
    }

    fn gain(&self, ipw: bool) -> f64 {
        let t = self.effect(ipw);
        self.n as f64 * t * t
    }

    fn admissible(&self, min_node: usize, arm_min: usize) -> bool {
        self.n >= min_node && self.nt >= arm_min && self.nc >= arm_min
    }
}

struct Grower<'a> {
    params: &'a ForestParams,
    columns: &'a [usize],
    rows: &'a Rows,
    /// Training rows of this tree, structure half first.
    sample: Vec<usize>,
    thresholds: Vec<Vec<f64>>,
    /// `bins[f][local]`: number of thresholds of feature `f` below the value.
    bins: Vec<Vec<u8>>,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn stats(&self, local: &[u32]) -> Stats {
        let mut s = Stats::default();
        for &l in local {
            s.add(self.rows, self.sample[l as usize]);
        }
        s
    }

    fn leaf(&mut self, slot: usize, estimation: &[u32]) {
        let s = self.stats(estimation);
        self.nodes[slot] = Node::Leaf {
            tau: s.effect(self.params.ipw_weighting),
            n_treated: s.nt,
            n_control: s.nc,
        };
    }

    fn grow<R: rand::Rng>(&mut self, rng: &mut R, structure: Vec<u32>, estimation: Vec<u32>, depth: usize) -> usize {
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf {
            tau: 0.0,
            n_treated: 0,
            n_control: 0,
        });
        let p = self.params;
        if p.max_depth.is_some_and(|m| depth >= m) || structure.len() < 2 * p.min_node {
            self.leaf(slot, &estimation);
            return slot;
        }
        let parent = self.stats(&structure);
        let parent_gain = parent.gain(p.ipw_weighting);
        let parent_est = self.stats(&estimation);

        let k = p.mtry.min(self.columns.len());
        let mut features = sample(rng, self.columns.len(), k).into_vec();
        features.sort_unstable();

        let mut best: Option<(f64, usize, usize)> = None;
        for &f in &features {
            let nb = self.thresholds[f].len();
            if nb == 0 {
                continue;
            }
            let bins = &self.bins[f];
            let mut hs = vec![Stats::default(); nb + 1];
            let mut he = vec![Stats::default(); nb + 1];
            for &l in &structure {
                hs[bins[l as usize] as usize].add(self.rows, self.sample[l as usize]);
            }
            for &l in &estimation {
                he[bins[l as usize] as usize].add(self.rows, self.sample[l as usize]);
            }
            let mut ls = Stats::default();
            let mut le = Stats::default();
            for b in 0..nb {
                let (h, g) = (&hs[b], &he[b]);
                ls = Stats {
                    n: ls.n + h.n,
                    nt: ls.nt + h.nt,
                    nc: ls.nc + h.nc,
                    a: ls.a + h.a,
                    b: ls.b + h.b,
                };
                le = Stats {
                    n: le.n + g.n,
                    nt: le.nt + g.nt,
                    nc: le.nc + g.nc,
                    a: 0.0,
                    b: 0.0,
                };
                let rs = parent.minus(&ls);
                let re = Stats {
                    n: parent_est.n - le.n,
                    nt: parent_est.nt - le.nt,
                    nc: parent_est.nc - le.nc,
                    a: 0.0,
                    b: 0.0,
                };
                if !(ls.admissible(p.min_node, p.arm_min)
                    && rs.admissible(p.min_node, p.arm_min)
                    && le.admissible(p.min_node, p.arm_min)
                    && re.admissible(p.min_node, p.arm_min))
                {
                    continue;
                }
                let gain = ls.gain(p.ipw_weighting) + rs.gain(p.ipw_weighting);
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, b));
                }
            }
        }

        match best {
            Some((gain, f, b)) if gain > parent_gain => {
                let bins = &self.bins[f];
                let (sl, sr): (Vec<u32>, Vec<u32>) =
                    structure.iter().partition(|&&l| (bins[l as usize] as usize) <= b);
                let (el, er): (Vec<u32>, Vec<u32>) =
                    estimation.iter().partition(|&&l| (bins[l as usize] as usize) <= b);
                let threshold = self.thresholds[f][b];
                let feature = self.columns[f];
                drop(structure);
                drop(estimation);
                let left = self.grow(rng, sl, el, depth + 1);
                let right = self.grow(rng, sr, er, depth + 1);
                self.nodes[slot] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
            }
            _ => self.leaf(slot, &estimation),
        }
        slot
    }
}

/// Midpoints between evenly spaced order statistics of `values` and the next
/// larger distinct value; at most `q` thresholds, strictly increasing.
fn candidate_thresholds(values: &mut [f64], q: usize) -> Vec<f64> {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    let mut out: Vec<f64> = Vec::with_capacity(q);
    if n < 2 || q == 0 {
        return out;
    }
    let mut distinct = values.to_vec();
    distinct.dedup();
    if distinct.len() <= q + 1 {
        return distinct.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    for j in 1..=q {
        let v = values[j * n / (q + 1)];
        let next = distinct.partition_point(|&u| u <= v);
        if next < distinct.len() {
            let t = 0.5 * (v + distinct[next]);
            if out.last().is_none_or(|&last| t > last) {
                out.push(t);
            }
        }
    }
    out
}

fn fit_tree(ds: &Dataset, params: &ForestParams, columns: &[usize], rows: &Rows, index: usize) -> CausalTree {
    let n = ds.n();
    let mut rng = StreamKey::new(params.seed, domain::FOREST, 0).rng(index as u64);
    let m = subsample_size(n, params.subsample_fraction);
    let sample_rows = sample(&mut rng, n, m).into_vec();
    let s = structure_size(m, params.honest_fraction);

    let x = ds.x();
    let mut thresholds = Vec::with_capacity(columns.len());
    let mut bins = Vec::with_capacity(columns.len());
    let mut buf = vec![0.0; s];
    for &c in columns {
        for (v, &i) in buf.iter_mut().zip(&sample_rows[..s]) {
            *v = x[[i, c]];
        }
        let th = candidate_thresholds(&mut buf, params.candidate_quantiles.min(255));
        bins.push(
            sample_rows
                .iter()
                .map(|&i| {
                    let v = x[[i, c]];
                    th.partition_point(|&t| t < v) as u8
                })
                .collect::<Vec<u8>>(),
        );
        thresholds.push(th);
    }

    let mut grower = Grower {
        params,
        columns,
        rows,
        sample: sample_rows,
        thresholds,
        bins,
        nodes: Vec::new(),
    };
    let structure: Vec<u32> = (0..s as u32).collect();
    let estimation: Vec<u32> = (s as u32..m as u32).collect();
    grower.grow(&mut rng, structure, estimation, 0);
    let samples = params.keep_samples.then(|| TreeSamples {
        structure: grower.sample[..s].to_vec(),
        estimation: grower.sample[s..].to_vec(),
    });
    CausalTree {
        nodes: grower.nodes,
        samples,
    }
}

fn subsample_size(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).min(n)
}

fn structure_size(m: usize, honest_fraction: f64) -> usize {
    (m as f64 * honest_fraction).round() as usize
}

/// Fit an honest causal forest on the observed columns of `ds`.
pub fn fit_causal_forest(ds: &Dataset, params: &ForestParams) -> Result<CausalForest> {
    let n = ds.n();
    if params.trees == 0 || params.mtry == 0 || params.min_node == 0 {
        return Err(invalid("forest needs at least one tree, mtry >= 1 and min_node >= 1"));
    }
    if !(params.honest_fraction > 0.0 && params.honest_fraction < 1.0) {
        return Err(invalid("honest_fraction must lie strictly inside (0, 1)"));
    }
    if !(params.subsample_fraction > 0.0 && params.subsample_fraction <= 1.0) {
        return Err(invalid("subsample_fraction must lie in (0, 1]"));
    }
    if n < 4 * params.min_node {
        return Err(invalid(format!(
            "forest with min_node {} needs at least {} rows, got {n}",
            params.min_node,
            4 * params.min_node
        )));
    }
    let m = subsample_size(n, params.subsample_fraction);
    let s = structure_size(m, params.honest_fraction);
    if s < params.min_node || m - s < params.min_node {
        return Err(invalid(format!(
            "subsample of {m} rows leaves honest halves of {s} and {} rows, below min_node {}",
            m - s,
            params.min_node
        )));
    }
    if let Some(i) = ds.treatment().iter().position(|&d| d > 1) {
        return Err(invalid(format!("row {i} has unsupported treatment arm {}", ds.treatment()[i])));
    }
    let columns = ds.observed_indices();
    let (d, y, e) = (ds.treatment(), ds.outcome(), ds.propensity());
    let w = params.ipw_weighting;
    let rows = Rows {
        treated: d.iter().map(|&v| v == 1).collect(),
        a: (0..n)
            .map(|i| f64::from(y[i]) / if w { e[i] } else { 1.0 })
            .collect(),
        b: (0..n)
            .map(|i| f64::from(y[i]) / if w { 1.0 - e[i] } else { 1.0 })
            .collect(),
    };
    let trees: Vec<CausalTree> = (0..params.trees)
        .into_par_iter()
        .map(|t| fit_tree(ds, params, &columns, &rows, t))
        .collect();
    Ok(CausalForest {
        trees,
        columns,
        mtry: params.mtry,
        min_node: params.min_node,
        arm_min: params.arm_min,
        honest_fraction: params.honest_fraction,
        subsample_fraction: params.subsample_fraction,
    })
}
