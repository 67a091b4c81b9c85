//! Extrema of finite cosine sums `f(t) = Σ w_j cos(ω_j t)` over a long time
//! grid.
//!
//! Several weight rows sharing the same frequencies are scanned together.
//! Cosines advance by complex rotation between grid points and are
//! re-anchored exactly at the start of every chunk, so the cost per sample is
//! a few flops per mode. The best grid extrema are then polished by
//! golden-section search on direct evaluations.

use rayon::prelude::*;

const CHUNK: usize = 2048;
/// Candidate brackets kept per row and chunk.
const PER_CHUNK: usize = 16;
/// Candidate brackets refined per row.
const REFINED: usize = 256;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Extremes found for one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowExtrema {
    pub max: f64,
    pub t_max: f64,
    pub min: f64,
    pub t_min: f64,
    /// Whether an interior grid maximum was available for refinement.
    pub max_bracketed: bool,
    pub min_bracketed: bool,
}

/// A family of cosine sums over common frequencies.
#[derive(Debug, Clone)]
pub struct CosineSums {
    freqs: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl CosineSums {
    /// Modes whose weight vanishes in every row are dropped.
    pub fn new(freqs: &[f64], rows: Vec<Vec<f64>>) -> Self {
        let keep: Vec<usize> = (0..freqs.len()).filter(|&j| rows.iter().any(|r| r[j] != 0.0)).collect();
        CosineSums {
            freqs: keep.iter().map(|&j| freqs[j]).collect(),
            rows: rows.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect(),
        }
    }

    pub fn eval(&self, row: usize, t: f64) -> f64 {
        self.rows[row]
            .iter()
            .zip(&self.freqs)
            .map(|(w, om)| w * (om * t).cos())
            .sum()
    }

    /// Bound on how far a true local extremum can exceed the nearest grid
    /// value at spacing `h`: `h²/8 · Σ |w_j| ω_j²`.
    fn grid_slack(&self, row: usize, h: f64) -> f64 {
        let curv: f64 = self.rows[row]
            .iter()
            .zip(&self.freqs)
            .map(|(w, om)| w.abs() * om * om)
            .sum();
        h * h / 8.0 * curv
    }

    /// Extremes over `t_i = i·h`, `i = 0..=samples`, refined between grid
    /// points to an absolute time tolerance `t_tol`.
    pub fn extrema(&self, h: f64, samples: usize, t_tol: f64) -> Vec<RowExtrema> {
        let nrows = self.rows.len();
        let chunks = samples / CHUNK + 1;
        let partial: Vec<ChunkScan> = (0..chunks)
            .into_par_iter()
            .map(|c| self.scan_chunk(h, samples, c * CHUNK, ((c + 1) * CHUNK).min(samples + 1)))
            .collect();

        (0..nrows)
            .map(|row| {
                let mut best_max = (f64::NEG_INFINITY, 0usize);
                let mut best_min = (f64::INFINITY, 0usize);
                let mut maxima = Vec::new();
                let mut minima = Vec::new();
                for p in &partial {
                    let s = &p.rows[row];
                    if s.max.0 > best_max.0 {
                        best_max = s.max;
                    }
                    if s.min.0 < best_min.0 {
                        best_min = s.min;
                    }
                    maxima.extend_from_slice(&s.maxima);
                    minima.extend_from_slice(&s.minima);
                }
                let slack = self.grid_slack(row, h);
                let (max, t_max) = self.polish(row, h, t_tol, best_max, &mut maxima, slack, 1.0);
                let (min, t_min) = self.polish(row, h, t_tol, best_min, &mut minima, slack, -1.0);
                RowExtrema {
                    max,
                    t_max,
                    min,
                    t_min,
                    max_bracketed: !maxima.is_empty(),
                    min_bracketed: !minima.is_empty(),
                }
            })
            .collect()
    }

    /// Refines the candidates within `slack` of the grid optimum. `dir` is
    /// `+1` for maxima and `-1` for minima.
    #[allow(clippy::too_many_arguments)]
    fn polish(
        &self,
        row: usize,
        h: f64,
        t_tol: f64,
        grid_best: (f64, usize),
        candidates: &mut Vec<(f64, usize)>,
        slack: f64,
        dir: f64,
    ) -> (f64, f64) {
        let mut best = (grid_best.0, grid_best.1 as f64 * h);
        candidates.sort_by(|a, b| (dir * b.0).total_cmp(&(dir * a.0)).then(a.1.cmp(&b.1)));
        candidates.truncate(REFINED);
        for &(v, i) in candidates.iter() {
            if dir * (grid_best.0 - v) > slack {
                break;
            }
            let (t, fv) = golden_section(
                |t| dir * self.eval(row, t),
                (i - 1) as f64 * h,
                (i + 1) as f64 * h,
                t_tol,
            );
            let fv = dir * fv;
            if dir * (fv - best.0) > 0.0 {
                best = (fv, t);
            }
        }
        best
    }

    fn scan_chunk(&self, h: f64, samples: usize, start: usize, end: usize) -> ChunkScan {
        let nrows = self.rows.len();
        let nm = self.freqs.len();
        // one extra sample on each side decides whether the edges are local extrema
        let lo = start.saturating_sub(1);
        let hi = (end + 1).min(samples + 1);
        let t0 = lo as f64 * h;
        let mut c: Vec<f64> = self.freqs.iter().map(|om| (om * t0).cos()).collect();
        let mut s: Vec<f64> = self.freqs.iter().map(|om| (om * t0).sin()).collect();
        let rot_c: Vec<f64> = self.freqs.iter().map(|om| (om * h).cos()).collect();
        let rot_s: Vec<f64> = self.freqs.iter().map(|om| (om * h).sin()).collect();

        let width = hi - lo;
        let mut values = vec![vec![0.0; width]; nrows];
        for idx in 0..width {
            for (row, out) in values.iter_mut().enumerate() {
                out[idx] = self.rows[row].iter().zip(&c).map(|(w, cv)| w * cv).sum();
            }
            for j in 0..nm {
                let (cj, sj) = (c[j], s[j]);
                c[j] = cj * rot_c[j] - sj * rot_s[j];
                s[j] = sj * rot_c[j] + cj * rot_s[j];
            }
        }

        let rows = values
            .iter()
            .map(|v| {
                let mut scan = RowScan {
                    max: (f64::NEG_INFINITY, start),
                    min: (f64::INFINITY, start),
                    maxima: Vec::new(),
                    minima: Vec::new(),
                };
                for i in start..end {
                    let x = v[i - lo];
                    if x > scan.max.0 {
                        scan.max = (x, i);
                    }
                    if x < scan.min.0 {
                        scan.min = (x, i);
                    }
                    if i == 0 || i == samples {
                        continue;
                    }
                    let (prev, next) = (v[i - 1 - lo], v[i + 1 - lo]);
                    if x >= prev && x >= next {
                        push_bounded(&mut scan.maxima, (x, i), 1.0);
                    }
                    if x <= prev && x <= next {
                        push_bounded(&mut scan.minima, (x, i), -1.0);
                    }
                }
                scan
            })
            .collect();
        ChunkScan { rows }
    }
}

struct RowScan {
    max: (f64, usize),
    min: (f64, usize),
    maxima: Vec<(f64, usize)>,
    minima: Vec<(f64, usize)>,
}

struct ChunkScan {
    rows: Vec<RowScan>,
}

/// Keeps the `PER_CHUNK` best entries (largest `dir·value`).
fn push_bounded(list: &mut Vec<(f64, usize)>, item: (f64, usize), dir: f64) {
    if list.len() < PER_CHUNK {
        list.push(item);
        return;
    }
    let (worst, _) = list
        .iter()
        .enumerate()
        .min_by(|a, b| (dir * a.1 .0).total_cmp(&(dir * b.1 .0)))
        .map(|(i, v)| (i, *v))
        .expect("non-empty");
    if dir * item.0 > dir * list[worst].0 {
        list[worst] = item;
    }
}

/// Maximises `f` on `[lo, hi]`, returning the best point seen and its value.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.max(0.0), hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn golden_section_finds_parabola_top() {
        let (t, v) = golden_section(|t| 1.0 - (t - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert_abs_diff_eq!(t, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn single_cosine_extrema() {
        let sums = CosineSums::new(&[1.0], vec![vec![-1.0]]);
        let h = 2.0 * PI / 16.0 * 0.93;
        let ex = sums.extrema(h, 200, 1e-9);
        assert_abs_diff_eq!(ex[0].max, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex[0].min, -1.0, epsilon = 1e-12);
        assert!(ex[0].max_bracketed);
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let freqs = [0.1, 0.77, 1.3, 1.99];
        let w = vec![0.4, -1.2, 0.3, 0.05];
        let sums = CosineSums::new(&freqs, vec![w.clone()]);
        let h = 0.2;
        let samples = 3 * CHUNK + 17;
        let ex = sums.extrema(h, samples, 1e-9);
        let mut brute_max = f64::NEG_INFINITY;
        for i in 0..=samples * 20 {
            brute_max = brute_max.max(sums.eval(0, i as f64 * h / 20.0));
        }
        assert!(ex[0].max >= brute_max - 1e-9, "{} vs {brute_max}", ex[0].max);
        assert!(ex[0].max <= w.iter().map(|x: &f64| x.abs()).sum::<f64>());
    }

    #[test]
    fn single_sample_grid() {
        let sums = CosineSums::new(&[1.0, 3.0], vec![vec![1.0, 2.0]]);
        let ex = sums.extrema(0.1, 0, 1e-9);
        assert_eq!(ex[0].max, 3.0);
        assert_eq!(ex[0].min, 3.0);
        assert!(!ex[0].max_bracketed);
    }
}
