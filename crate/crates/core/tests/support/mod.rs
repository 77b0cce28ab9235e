//! Independent reference implementations used by the oracle tests.
//!
//! Nothing here calls into the metric code under test. Shared with the
//! acceptance suite of the CLI crate.

#![allow(dead_code)]

pub mod checks;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    Nominal,
    Ordinal,
    Interval,
}

/// Krippendorff's alpha by enumerating every pair of pairable values.
///
/// Returns `None` when fewer than two values are pairable or the expected
/// disagreement is zero.
pub fn krippendorff_oracle(rows: &[Vec<Option<f64>>], level: Level) -> Option<f64> {
    let items = rows[0].len();
    let mut units: Vec<Vec<f64>> = Vec::new();
    for i in 0..items {
        let unit: Vec<f64> = rows.iter().filter_map(|r| r[i]).collect();
        if unit.len() >= 2 {
            units.push(unit);
        }
    }
    let pooled: Vec<f64> = units.iter().flatten().copied().collect();
    let n = pooled.len();
    if n < 2 {
        return None;
    }

    let delta = |c: f64, k: f64| -> f64 {
        match level {
            Level::Nominal => {
                if c == k {
                    0.0
                } else {
                    1.0
                }
            }
            Level::Interval => (c - k) * (c - k),
            Level::Ordinal => {
                if c == k {
                    return 0.0;
                }
                let (lo, hi) = if c < k { (c, k) } else { (k, c) };
                let between = pooled.iter().filter(|&&v| v >= lo && v <= hi).count() as f64;
                let n_lo = pooled.iter().filter(|&&v| v == lo).count() as f64;
                let n_hi = pooled.iter().filter(|&&v| v == hi).count() as f64;
                let d = between - (n_lo + n_hi) / 2.0;
                d * d
            }
        }
    };

    let mut observed = 0.0;
    for unit in &units {
        let m = unit.len() as f64;
        for i in 0..unit.len() {
            for j in 0..unit.len() {
                if i != j {
                    observed += delta(unit[i], unit[j]) / (m - 1.0);
                }
            }
        }
    }
    observed /= n as f64;

    let mut expected = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                expected += delta(pooled[i], pooled[j]);
            }
        }
    }
    expected /= (n * (n - 1)) as f64;
    if expected == 0.0 {
        return None;
    }
    Some(1.0 - observed / expected)
}

/// Cohen's kappa from raw counts.
pub fn kappa_oracle(a: &[i8], b: &[i8]) -> f64 {
    let n = a.len() as f64;
    let mut agree = 0.0;
    for i in 0..a.len() {
        if a[i] == b[i] {
            agree += 1.0;
        }
    }
    let p_o = agree / n;
    let mut p_e = 0.0;
    for cat in [-1i8, 0, 1] {
        let ca = a.iter().filter(|&&x| x == cat).count() as f64;
        let cb = b.iter().filter(|&&x| x == cat).count() as f64;
        p_e += (ca / n) * (cb / n);
    }
    if p_e == 1.0 {
        return 1.0;
    }
    (p_o - p_e) / (1.0 - p_e)
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mut sum = 0.0;
    for x in xs {
        sum += x;
    }
    let mean = sum / n;
    let mut ss = 0.0;
    for x in xs {
        ss += (x - mean) * (x - mean);
    }
    ss / (n - 1.0)
}

/// Cronbach's alpha with raters as items, written out longhand.
pub fn cronbach_oracle(rows: &[Vec<f64>]) -> Option<f64> {
    let r = rows.len() as f64;
    let n = rows[0].len();
    let mut item_var = 0.0;
    for row in rows {
        item_var += sample_variance(row);
    }
    let mut totals = vec![0.0; n];
    for row in rows {
        for (t, v) in totals.iter_mut().zip(row) {
            *t += v;
        }
    }
    let total_var = sample_variance(&totals);
    if total_var == 0.0 {
        return None;
    }
    Some(r / (r - 1.0) * (1.0 - item_var / total_var))
}

/// Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn t_density(x: f64, df: f64) -> f64 {
    let c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    (c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp()
}

/// Composite Simpson over [a, b].
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Two-sided p-value as 1 - 2 * integral of the t density over [0, |t|].
pub fn t_p_value_oracle(t: f64, df: f64) -> f64 {
    let mass = simpson(|x| t_density(x, df), 0.0, t.abs(), 40_000);
    (1.0 - 2.0 * mass).max(0.0)
}

/// (t, df, p) computed longhand.
pub fn t_test_oracle(a: &[f64], b: &[f64], paired: bool) -> (f64, f64, f64) {
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let (t, df) = if paired {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let n = d.len() as f64;
        (mean(&d) / (sample_variance(&d) / n).sqrt(), n - 1.0)
    } else {
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
        let t = (mean(a) - mean(b)) / (va + vb).sqrt();
        let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
        (t, df)
    };
    (t, df, t_p_value_oracle(t, df))
}

/// Ratings matrix with `missing` probability of an absent cell.
pub fn random_rows(
    rng: &mut ChaCha8Rng,
    raters: usize,
    items: usize,
    missing: f64,
    integer: bool,
) -> Vec<Vec<Option<f64>>> {
    (0..raters)
        .map(|_| {
            (0..items)
                .map(|_| {
                    if rng.random::<f64>() < missing {
                        None
                    } else if integer {
                        Some(rng.random_range(0..5) as f64)
                    } else {
                        Some(rng.random_range(-3.0..3.0))
                    }
                })
                .collect()
        })
        .collect()
}

/// Frequency estimate from linear fits through interpolated upward and
/// downward zero crossings inside `[center - half, center + half]` seconds.
///
/// A triangle wave crosses zero twice per cycle, so crossing index against
/// time has slope `2 f`.
pub fn zero_crossing_frequency(samples: &[i16], sample_rate: u32, center: f64, half: f64) -> f64 {
    let sr = sample_rate as f64;
    let lo = ((center - half) * sr).max(0.0) as usize;
    let hi = (((center + half) * sr) as usize).min(samples.len() - 1);
    let mut times = Vec::new();
    for i in lo..hi {
        let (a, b) = (samples[i] as f64, samples[i + 1] as f64);
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            let frac = a / (a - b);
            times.push((i as f64 + frac) / sr);
        }
    }
    assert!(times.len() >= 3, "too few zero crossings near {center}s");
    let n = times.len() as f64;
    let mean_t = times.iter().sum::<f64>() / n;
    let mean_k = (n - 1.0) / 2.0;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, t) in times.iter().enumerate() {
        sxy += (t - mean_t) * (k as f64 - mean_k);
        sxx += (t - mean_t) * (t - mean_t);
    }
    sxy / sxx / 2.0
}

/// Parses a binary PPM into (width, height, pixels).
pub fn decode_ppm(bytes: &[u8]) -> (usize, usize, Vec<[u8; 3]>) {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap().to_string());
    }
    pos += 1;
    assert_eq!(fields[0], "P6");
    assert_eq!(fields[3], "255");
    let w: usize = fields[1].parse().unwrap();
    let h: usize = fields[2].parse().unwrap();
    let pixels = bytes[pos..]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect::<Vec<_>>();
    assert_eq!(pixels.len(), w * h);
    (w, h, pixels)
}

/// Random strictly increasing map built from positive-slope pieces.
pub struct MonotoneMap {
    knots: Vec<(f64, f64)>,
    cubic: f64,
}

impl MonotoneMap {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut x = -10.0;
        let mut y = rng.random_range(-5.0..5.0);
        let mut knots = vec![(x, y)];
        for _ in 0..8 {
            x += rng.random_range(0.1..5.0);
            y += rng.random_range(0.01..10.0);
            knots.push((x, y));
        }
        Self {
            knots,
            cubic: rng.random_range(0.0..2.0),
        }
    }

    pub fn apply(&self, v: f64) -> f64 {
        let k = &self.knots;
        let (x0, y0) = k[0];
        let (xn, yn) = k[k.len() - 1];
        let base = if v <= x0 {
            y0 + (v - x0)
        } else if v >= xn {
            yn + (v - xn)
        } else {
            let i = k.iter().position(|&(x, _)| x > v).unwrap();
            let (xa, ya) = k[i - 1];
            let (xb, yb) = k[i];
            ya + (v - xa) * (yb - ya) / (xb - xa)
        };
        base + self.cubic * v * v * v
    }
}
