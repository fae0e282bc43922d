//! Rank and variance homogeneity tests, with p-values from the chi-square and
//! F distributions.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, FisherSnedecor};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub df: usize,
    pub p_value: f64,
    /// All observations were identical, so the statistic is undefined and
    /// reported as zero.
    pub degenerate: bool,
}

/// Mid-ranks (1-based) of `values`, plus the tie-correction sum `sum (t^3 - t)`.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

fn check_groups(groups: &[Vec<f64>], min_size: usize) -> Result<()> {
    if groups.len() < 2 {
        return Err(invalid("need at least two groups"));
    }
    if groups.iter().any(|g| g.len() < min_size) {
        return Err(invalid(format!("every group needs at least {min_size} observations")));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("observations must be finite"));
    }
    Ok(())
}

/// Kruskal-Wallis H test with mid-rank tie correction.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis> {
    check_groups(groups, 1)?;
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let df = groups.len() - 1;
    let (ranks, ties) = mid_ranks(&all);
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KruskalWallis {
            h: 0.0,
            df,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    let p_value = ChiSquared::new(df as f64)
        .map_err(|e| Error::Numerical(e.to_string()))?
        .sf(h);
    Ok(KruskalWallis {
        h,
        df,
        p_value,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Levene {
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p_value: f64,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Levene's test: one-way ANOVA on absolute deviations from each group's
/// center (mean, or median for the Brown-Forsythe variant).
pub fn levene(groups: &[Vec<f64>], center: Center) -> Result<Levene> {
    check_groups(groups, 2)?;
    let k = groups.len();
    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let c = match center {
                Center::Mean => g.iter().sum::<f64>() / g.len() as f64,
                Center::Median => median(g),
            };
            g.iter().map(|v| (v - c).abs()).collect()
        })
        .collect();
    let n: usize = groups.iter().map(Vec::len).sum();
    let means: Vec<f64> = deviations
        .iter()
        .map(|z| z.iter().sum::<f64>() / z.len() as f64)
        .collect();
    let grand = deviations.iter().flatten().sum::<f64>() / n as f64;
    let between: f64 = deviations
        .iter()
        .zip(&means)
        .map(|(z, m)| z.len() as f64 * (m - grand) * (m - grand))
        .sum();
    let within: f64 = deviations
        .iter()
        .zip(&means)
        .map(|(z, m)| z.iter().map(|v| (v - m) * (v - m)).sum::<f64>())
        .sum();
    if deviations.iter().flatten().all(|&z| z == 0.0) {
        return Err(Error::Numerical(
            "Levene test undefined: every group is constant".into(),
        ));
    }
    let (df1, df2) = (k - 1, n - k);
    // Identical deviations inside every group: equal spreads give F = 0,
    // different spreads an infinitely strong rejection.
    let (f, p_value) = if within <= 0.0 {
        if between <= 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = (df2 as f64 / df1 as f64) * between / within;
        let p = FisherSnedecor::new(df1 as f64, df2 as f64)
            .map_err(|e| Error::Numerical(e.to_string()))?
            .sf(f);
        (f, p)
    };
    Ok(Levene { f, df1, df2, p_value })
}

/// Two-sided exact binomial test of `successes` out of `trials` against
/// success probability `p`: the total probability of outcomes no more likely
/// than the observed one.
pub fn binomial_test(successes: u64, trials: u64, p: f64) -> Result<f64> {
    if successes > trials {
        return Err(invalid("more successes than trials"));
    }
    let dist = Binomial::new(p, trials).map_err(|e| invalid(e.to_string()))?;
    let observed = dist.pmf(successes);
    let limit = observed * (1.0 + 1e-7);
    let total: f64 = (0..=trials).map(|k| dist.pmf(k)).filter(|&q| q <= limit).sum();
    Ok(total.min(1.0))
}
