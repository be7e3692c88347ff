//! The statistical comparison battery: paired and two-sample t-tests,
//! Kendall's tau-b, one-way ANOVA with Tukey's HSD post-hoc, and the
//! distribution functions they need.

use std::sync::OnceLock;

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("invalid degrees of freedom: {0}")]
    InvalidDf(f64),
    #[error("inputs must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Significance stars: `***` below 0.001, `**` below 0.01, `*` below 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Outcome of one two-sided test. `winner` names the side with the larger
/// mean, only when the test is significant at 0.05.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub winner: Option<String>,
    pub stars: &'static str,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, sides: (&str, &str), mean_diff: f64) -> TestResult {
        let winner = if p_value < 0.05 {
            Some(if mean_diff > 0.0 { sides.0.to_string() } else { sides.1.to_string() })
        } else {
            None
        };
        TestResult { statistic, p_value, winner, stars: stars(p_value) }
    }
}

pub fn t_cdf(x: f64, df: f64) -> Result<f64, StatsError> {
    if df < 1.0 {
        return Err(StatsError::InvalidDf(df));
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|_| StatsError::InvalidDf(df))?;
    Ok(dist.cdf(x))
}

pub fn f_cdf(x: f64, df1: f64, df2: f64) -> Result<f64, StatsError> {
    if df1 < 1.0 || df2 < 1.0 {
        return Err(StatsError::InvalidDf(df1.min(df2)));
    }
    let dist = FisherSnedecor::new(df1, df2).map_err(|_| StatsError::InvalidDf(df1))?;
    Ok(dist.cdf(x.max(0.0)))
}

pub fn chi_square_sf(x: f64, df: f64) -> Result<f64, StatsError> {
    if df < 1.0 {
        return Err(StatsError::InvalidDf(df));
    }
    let dist = ChiSquared::new(df).map_err(|_| StatsError::InvalidDf(df))?;
    Ok(dist.sf(x.max(0.0)))
}

fn normal() -> &'static Normal {
    static NORMAL: OnceLock<Normal> = OnceLock::new();
    NORMAL.get_or_init(|| Normal::new(0.0, 1.0).unwrap())
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order);
    let n = order as f64;
    for i in 0..order {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=order {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        let dp = n * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

fn gl_nodes() -> &'static Vec<(f64, f64)> {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(24))
}

fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let nodes = gl_nodes();
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + width / 2.0;
        let half = width / 2.0;
        for &(x, w) in nodes {
            total += w * f(mid + half * x);
        }
    }
    total * (b - a) / (2.0 * panels as f64)
}

/// P(range of k iid standard normals <= r).
fn normal_range_cdf(r: f64, k: usize) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let phi = |z: f64| normal().pdf_local(z);
    let cap_phi = |z: f64| normal().cdf(z);
    let integrand = |z: f64| phi(z) * (cap_phi(z) - cap_phi(z - r)).powi(k as i32 - 1);
    k as f64 * integrate(&integrand, -8.0, 8.0 + r.min(30.0), 12)
}

trait PdfLocal {
    fn pdf_local(&self, z: f64) -> f64;
}

impl PdfLocal for Normal {
    fn pdf_local(&self, z: f64) -> f64 {
        (-(z * z) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }
}

/// Survival function of the studentized range distribution with `k`
/// groups and `df` error degrees of freedom, by the standard double
/// integral over the scaled chi density.
pub fn studentized_range_sf(q: f64, k: usize, df: f64) -> Result<f64, StatsError> {
    if k < 2 {
        return Err(StatsError::InvalidParameter("studentized range needs k >= 2"));
    }
    if df < 1.0 {
        return Err(StatsError::InvalidDf(df));
    }
    if q <= 0.0 {
        return Ok(1.0);
    }
    // density of u = s/sigma: chi_df / sqrt(df)
    let ln_gamma_half_df = statrs::function::gamma::ln_gamma(df / 2.0);
    let ln_coeff = (1.0 - df / 2.0) * std::f64::consts::LN_2 + (df / 2.0) * df.ln() - ln_gamma_half_df;
    let chi_scaled_pdf = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        (ln_coeff + (df - 1.0) * u.ln() - df * u * u / 2.0).exp()
    };
    let upper = (1.0 + 14.0 / df.sqrt()).max(10.0 / df.sqrt());
    let cdf = integrate(&|u: f64| chi_scaled_pdf(u) * normal_range_cdf(q * u, k), 1e-12, upper, 24);
    Ok((1.0 - cdf).clamp(0.0, 1.0))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Two-sided paired t-test on per-method score pairs. `sides` names the
/// two conditions for the winner column.
pub fn paired_t_test(x: &[f64], y: &[f64], sides: (&str, &str)) -> Result<TestResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: x.len() });
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let m = mean(&diffs);
    let sd = sample_variance(&diffs).sqrt();
    if sd == 0.0 {
        if m == 0.0 {
            return Err(StatsError::Degenerate("all paired differences are zero"));
        }
        // constant non-zero difference: t is infinite, p below any threshold
        let statistic = if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        return Ok(TestResult::new(statistic, 0.0, sides, m));
    }
    let n = diffs.len() as f64;
    let t = m / (sd / n.sqrt());
    let p = 2.0 * (1.0 - t_cdf(t.abs(), n - 1.0)?);
    Ok(TestResult::new(t, p.clamp(0.0, 1.0), sides, m))
}

/// Two-sided Student's t-test with pooled variance.
pub fn two_sample_t_test(a: &[f64], b: &[f64], sides: (&str, &str)) -> Result<TestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: a.len().min(b.len()) });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if pooled == 0.0 {
        if ma == mb {
            return Err(StatsError::Degenerate("both groups constant and equal"));
        }
        let statistic = if ma > mb { f64::INFINITY } else { f64::NEG_INFINITY };
        return Ok(TestResult::new(statistic, 0.0, sides, ma - mb));
    }
    let t = (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let p = 2.0 * (1.0 - t_cdf(t.abs(), na + nb - 2.0)?);
    Ok(TestResult::new(t, p.clamp(0.0, 1.0), sides, ma - mb))
}

/// Kendall's tau-b by merge-sort inversion counting, O(n log n).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b]).unwrap().then(y[a].partial_cmp(&y[b]).unwrap())
    });

    let pairs = |t: u64| t * (t - 1) / 2;
    // tie counts in x, and joint ties, over the x-sorted order
    let (mut ties_x, mut ties_xy) = (0u64, 0u64);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        ties_x += pairs((j - i + 1) as u64);
        let mut a = i;
        while a <= j {
            let mut b = a;
            while b + 1 <= j && y[idx[b + 1]] == y[idx[a]] {
                b += 1;
            }
            ties_xy += pairs((b - a + 1) as u64);
            a = b + 1;
        }
        i = j + 1;
    }
    let mut ties_y = 0u64;
    {
        let mut ys: Vec<f64> = y.to_vec();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && ys[j + 1] == ys[i] {
                j += 1;
            }
            ties_y += pairs((j - i + 1) as u64);
            i = j + 1;
        }
    }

    // discordant pairs = strict inversions of the y sequence
    let mut seq: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buffer = vec![0.0; n];
    let discordant = count_inversions(&mut seq, &mut buffer);

    let n0 = pairs(n as u64);
    let denom = ((n0 - ties_x) as f64) * ((n0 - ties_y) as f64);
    if denom == 0.0 {
        return Err(StatsError::Degenerate("kendall tau undefined for an all-tied vector"));
    }
    let concordant_plus_discordant = n0 as i64 - ties_x as i64 - ties_y as i64 + ties_xy as i64;
    let concordant_minus_discordant = concordant_plus_discordant as f64 - 2.0 * discordant as f64;
    Ok(concordant_minus_discordant / denom.sqrt())
}

/// Strict inversions (`a[i] > a[j]`, `i < j`) via bottom-up merge sort.
fn count_inversions(a: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = a.len();
    let mut count = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (mid + width).min(n);
            // merge a[lo..mid] and a[mid..hi]
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if a[i] <= a[j] {
                    buf[k] = a[i];
                    i += 1;
                } else {
                    count += (mid - i) as u64;
                    buf[k] = a[j];
                    j += 1;
                }
                k += 1;
            }
            while i < mid {
                buf[k] = a[i];
                i += 1;
                k += 1;
            }
            while j < hi {
                buf[k] = a[j];
                j += 1;
                k += 1;
            }
            a[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub p_value: f64,
    pub ms_within: f64,
    pub df_within: f64,
    pub group_means: Vec<f64>,
    pub group_sizes: Vec<usize>,
}

/// One-way ANOVA over two or more groups.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::InvalidParameter("ANOVA needs at least two groups"));
    }
    for g in groups {
        if g.len() < 2 {
            return Err(StatsError::TooFewValues { needed: 2, got: g.len() });
        }
    }
    let k = groups.len() as f64;
    let total: usize = groups.iter().map(Vec::len).sum();
    let grand_mean = groups.iter().flatten().sum::<f64>() / total as f64;
    let group_means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let ssb: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.len() as f64 * (m - grand_mean) * (m - grand_mean))
        .sum();
    let ssw: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.iter().map(|x| (x - m) * (x - m)).sum::<f64>())
        .sum();
    let df_between = k - 1.0;
    let df_within = total as f64 - k;
    let ms_within = ssw / df_within;
    if ms_within == 0.0 {
        return Err(StatsError::Degenerate("zero within-group variance"));
    }
    let f = (ssb / df_between) / ms_within;
    let p = 1.0 - f_cdf(f, df_between, df_within)?;
    Ok(AnovaResult {
        f_statistic: f,
        p_value: p.clamp(0.0, 1.0),
        ms_within,
        df_within,
        group_means,
        group_sizes: groups.iter().map(Vec::len).collect(),
    })
}

/// One pairwise comparison from Tukey's HSD.
#[derive(Debug, Clone, PartialEq)]
pub struct TukeyComparison {
    pub left: usize,
    pub right: usize,
    pub result: TestResult,
}

/// Tukey(-Kramer) HSD over all group pairs, using the studentized range
/// distribution with the ANOVA's pooled error.
pub fn tukey_hsd(groups: &[Vec<f64>], labels: &[&str]) -> Result<Vec<TukeyComparison>, StatsError> {
    if labels.len() != groups.len() {
        return Err(StatsError::LengthMismatch(labels.len(), groups.len()));
    }
    let anova = one_way_anova(groups)?;
    let k = groups.len();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let (ni, nj) = (anova.group_sizes[i] as f64, anova.group_sizes[j] as f64);
            let diff = anova.group_means[i] - anova.group_means[j];
            let se = (anova.ms_within / 2.0 * (1.0 / ni + 1.0 / nj)).sqrt();
            let q = diff.abs() / se;
            let p = studentized_range_sf(q, k, anova.df_within)?;
            out.push(TukeyComparison {
                left: i,
                right: j,
                result: TestResult::new(q, p, (labels[i], labels[j]), diff),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n^2) tau-b oracle: direct pair enumeration.
    fn kendall_tau_naive(x: &[f64], y: &[f64]) -> Option<f64> {
        let n = x.len();
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = x[i].partial_cmp(&x[j]).unwrap() as i64;
                let dy = y[i].partial_cmp(&y[j]).unwrap() as i64;
                match (dx, dy) {
                    (0, 0) => {}
                    (0, _) => tx += 1,
                    (_, 0) => ty += 1,
                    _ if dx == dy => c += 1,
                    _ => d += 1,
                }
            }
        }
        let denom = (((c + d + tx) as f64) * ((c + d + ty) as f64)).sqrt();
        if denom == 0.0 {
            None
        } else {
            Some((c - d) as f64 / denom)
        }
    }

    #[test]
    fn t_cdf_basics() {
        for df in [1.0, 3.0, 10.0, 50.0] {
            assert_abs_diff_eq!(t_cdf(0.0, df).unwrap(), 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(t_cdf(1.0, 10.0).unwrap(), 0.82955, epsilon = 5e-6);
        assert!(t_cdf(1.0, 0.5).is_err());
    }

    #[test]
    fn f_cdf_basics() {
        let c = f_cdf(3.0, 2.0, 6.0).unwrap();
        assert_abs_diff_eq!(1.0 - c, 0.125, epsilon = 1e-6);
        assert!(f_cdf(1.0, 0.0, 3.0).is_err());
    }

    #[test]
    fn studentized_range_tabulated_critical_value() {
        // published upper-5% point of the studentized range, k=3, df=12
        let sf = studentized_range_sf(3.77, 3, 12.0).unwrap();
        assert_abs_diff_eq!(sf, 0.05, epsilon = 2e-3);

        // recover the critical value by bisection
        let (mut lo, mut hi) = (1.0, 10.0);
        for _ in 0..60 {
            let mid = (lo + hi) / 2.0;
            if studentized_range_sf(mid, 3, 12.0).unwrap() > 0.05 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!((lo + hi) / 2.0, 3.77, epsilon = 0.01);
    }

    #[test]
    fn studentized_range_limits_and_monotonicity() {
        assert_eq!(studentized_range_sf(0.0, 3, 10.0).unwrap(), 1.0);
        assert_eq!(studentized_range_sf(-1.0, 3, 10.0).unwrap(), 1.0);
        let mut last = 1.0;
        for q in [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 9.0] {
            let sf = studentized_range_sf(q, 4, 20.0).unwrap();
            assert!(sf <= last + 1e-12, "sf must decrease in q");
            assert!((0.0..=1.0).contains(&sf));
            last = sf;
        }
        assert!(studentized_range_sf(1.0, 1, 10.0).is_err());
    }

    #[test]
    fn paired_t_cases() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(
            paired_t_test(&x, &x, ("a", "b")).unwrap_err(),
            StatsError::Degenerate("all paired differences are zero")
        );

        // constant positive difference: infinite t
        let y = [0.0, 1.0, 2.0];
        let r = paired_t_test(&x, &y, ("x", "y")).unwrap();
        assert!(r.statistic.is_infinite() && r.statistic > 0.0);
        assert!(r.p_value < 1e-15);
        assert_eq!(r.winner.as_deref(), Some("x"));
        assert_eq!(r.stars, "***");
    }

    #[test]
    fn paired_t_reference_value() {
        // d = [2, -1, 3, 0, 1]
        let x = [2.0, -1.0, 3.0, 0.0, 1.0];
        let y = [0.0; 5];
        let r = paired_t_test(&x, &y, ("x", "y")).unwrap();
        // scipy.stats.ttest_rel reference
        assert_abs_diff_eq!(r.statistic, 1.414213562373095, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_value, 0.23019964108049873, epsilon = 1e-9);
        assert_eq!(r.winner, None);
    }

    #[test]
    fn paired_t_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..12).map(|_| rng.gen()).collect();
        let y: Vec<f64> = (0..12).map(|_| rng.gen()).collect();
        let a = paired_t_test(&x, &y, ("x", "y")).unwrap();
        let b = paired_t_test(&y, &x, ("y", "x")).unwrap();
        assert_abs_diff_eq!(a.statistic, -b.statistic, epsilon = 1e-12);
        assert_abs_diff_eq!(a.p_value, b.p_value, epsilon = 1e-12);
    }

    #[test]
    fn two_sample_t_cases() {
        let a = [1.0, 2.0, 3.0];
        let r = two_sample_t_test(&a, &a, ("a", "b")).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.winner, None);

        let b = [4.0, 5.0, 6.0];
        let r = two_sample_t_test(&a, &b, ("a", "b")).unwrap();
        assert_abs_diff_eq!(r.statistic, -3.6742346141747673, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_value, 0.021311641128756727, epsilon = 1e-9);
        assert_eq!(r.winner.as_deref(), Some("b"));

        // shift invariance
        let shifted_a: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
        let shifted_b: Vec<f64> = b.iter().map(|x| x + 10.0).collect();
        let s = two_sample_t_test(&shifted_a, &shifted_b, ("a", "b")).unwrap();
        assert_abs_diff_eq!(s.statistic, r.statistic, epsilon = 1e-12);
        assert_abs_diff_eq!(s.p_value, r.p_value, epsilon = 1e-12);

        assert!(two_sample_t_test(&[1.0, 1.0], &[1.0, 1.0], ("a", "b")).is_err());
    }

    #[test]
    fn kendall_examples() {
        assert_abs_diff_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap(),
            -1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(),
            4.0 / 6.0,
            epsilon = 1e-12
        );
        assert!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn kendall_fast_path_equals_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..1000 {
            let n = rng.gen_range(2..60);
            let levels = if trial % 2 == 0 { 1000 } else { rng.gen_range(2..6) };
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
            match kendall_tau_naive(&x, &y) {
                Some(expected) => {
                    assert_abs_diff_eq!(kendall_tau(&x, &y).unwrap(), expected, epsilon = 1e-12);
                }
                None => assert!(kendall_tau(&x, &y).is_err()),
            }
        }
    }

    #[test]
    fn anova_fixture() {
        let groups = vec![vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0]];
        let r = one_way_anova(&groups).unwrap();
        assert_abs_diff_eq!(r.f_statistic, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 0.125, epsilon = 1e-3);

        let same = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]];
        let r = one_way_anova(&same).unwrap();
        assert_eq!(r.f_statistic, 0.0);
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-12);

        let degenerate = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(one_way_anova(&degenerate).is_err());
    }

    #[test]
    fn anova_two_groups_equals_t_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let a: Vec<f64> = (0..rng.gen_range(3..10)).map(|_| rng.gen::<f64>()).collect();
            let b: Vec<f64> = (0..rng.gen_range(3..10)).map(|_| rng.gen::<f64>()).collect();
            let t = two_sample_t_test(&a, &b, ("a", "b")).unwrap();
            let f = one_way_anova(&[a, b].to_vec()).unwrap();
            assert_abs_diff_eq!(f.f_statistic, t.statistic * t.statistic, epsilon = 1e-9);
            assert_abs_diff_eq!(f.p_value, t.p_value, epsilon = 1e-9);
        }
    }

    #[test]
    fn tukey_identical_and_separated_groups() {
        let same = vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]];
        let comparisons = tukey_hsd(&same, &["g1", "g2", "g3"]).unwrap();
        assert_eq!(comparisons.len(), 3);
        for c in &comparisons {
            assert_abs_diff_eq!(c.result.p_value, 1.0, epsilon = 1e-9);
            assert_eq!(c.result.winner, None);
        }

        let groups = vec![
            vec![0.0, 0.1, 0.2],
            vec![5.0, 5.1, 5.2],
            vec![5.0, 5.05, 5.15],
        ];
        let comparisons = tukey_hsd(&groups, &["low", "high", "high2"]).unwrap();
        let get = |i: usize, j: usize| comparisons.iter().find(|c| c.left == i && c.right == j).unwrap();
        assert!(get(0, 1).result.p_value < 0.001);
        assert_eq!(get(0, 1).result.winner.as_deref(), Some("high"));
        assert!(get(0, 2).result.p_value < 0.001);
        assert!(get(1, 2).result.p_value > 0.05);
        assert_eq!(get(1, 2).result.winner, None);
    }

    #[test]
    fn tukey_p_symmetric_in_pair_order() {
        let groups = vec![vec![1.0, 2.0, 3.5], vec![2.0, 2.5, 4.0], vec![0.5, 1.5, 2.5]];
        let forward = tukey_hsd(&groups, &["a", "b", "c"]).unwrap();
        let swapped: Vec<Vec<f64>> = vec![groups[1].clone(), groups[0].clone(), groups[2].clone()];
        let backward = tukey_hsd(&swapped, &["b", "a", "c"]).unwrap();
        let f01 = &forward.iter().find(|c| (c.left, c.right) == (0, 1)).unwrap().result;
        let b01 = &backward.iter().find(|c| (c.left, c.right) == (0, 1)).unwrap().result;
        assert_abs_diff_eq!(f01.p_value, b01.p_value, epsilon = 1e-12);
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.0005), "***");
        assert_eq!(stars(0.003), "**");
        assert_eq!(stars(0.011), "*");
        assert_eq!(stars(0.03), "*");
        assert_eq!(stars(0.2), "");
        assert_eq!(stars(0.05), "");
        assert_eq!(stars(0.01), "*");
        assert_eq!(stars(0.001), "**");
    }

    proptest! {
        #[test]
        fn p_values_in_unit_interval(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..20);
            let x: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            if let Ok(r) = paired_t_test(&x, &y, ("x", "y")) {
                prop_assert!((0.0..=1.0).contains(&r.p_value));
            }
            if let Ok(r) = two_sample_t_test(&x, &y, ("x", "y")) {
                prop_assert!((0.0..=1.0).contains(&r.p_value));
            }
            if let Ok(t) = kendall_tau(&x, &y) {
                prop_assert!((-1.0..=1.0).contains(&t));
            }
        }

        #[test]
        fn cdfs_monotone_on_grids(df in 1u32..40) {
            let df = df as f64;
            let mut last_t = 0.0;
            for i in 0..40 {
                let x = -4.0 + 0.2 * i as f64;
                let c = t_cdf(x, df).unwrap();
                prop_assert!(c >= last_t - 1e-12);
                last_t = c;
            }
            let mut last_f = 0.0;
            for i in 0..30 {
                let x = 0.2 * i as f64;
                let c = f_cdf(x, df, df + 2.0).unwrap();
                prop_assert!(c >= last_f - 1e-12);
                last_f = c;
            }
        }
    }
}
